//! Sample a rotated bivariate Laplacian and recover its parameters by
//! maximum likelihood.

use std::f64::consts::FRAC_PI_6;

use bltv::bld::{fit, nll, sample_bld, BldParams, SampleSet};

fn main() -> bltv::Result<()> {
    let truth = BldParams::new(2.0, 0.5, FRAC_PI_6)?;
    println!(
        "truth:    lambda1={:.4} lambda2={:.4} theta={:.4} rad",
        truth.lambda1, truth.lambda2, truth.theta
    );

    for n in [100, 10_000, 100_000] {
        let samples = sample_bld(&truth, n, 7)?;
        let est = fit(&samples, 180, 1e-4, 1e4, 1e-4);
        println!(
            "n={n:<7} lambda1={:.4} lambda2={:.4} theta={:.4}  nll/n={:.4}",
            est.lambda1,
            est.lambda2,
            est.theta,
            nll(&est, &samples) / n as f64
        );
    }

    // Degenerate input: a flat neighborhood has only zero gradients; the
    // scales land on the upper clamp and the angle defaults to zero.
    let flat = SampleSet::new(vec![[0.0, 0.0]; 9])?;
    let est = fit(&flat, 180, 1e-4, 1e4, 1e-4);
    println!(
        "flat window: lambda1={} lambda2={} theta={}",
        est.lambda1, est.lambda2, est.theta
    );
    Ok(())
}
