//! ADMM driver for the TV-L2 and BLTV-L2 restoration models.
//!
//! The model `min_u R(u) + (mu/2) ||K u - g||_2^2` is rewritten with two
//! auxiliary variables, `w = K u - g` and `t = D u`, and solved by
//! alternating exact minimizations with multiplier ascent:
//!
//! 1. `u`: a linear system diagonalized by the 2-D DFT (both `K` and `D`
//!    are periodic, hence circulant);
//! 2. `w`: a closed form that simultaneously picks the fidelity weight `mu`
//!    so the residual satisfies the discrepancy principle
//!    `||K u - g|| <= tau sigma sqrt(n)`;
//! 3. `t`: a per-pixel proximal step — rotated anisotropic soft threshold
//!    for the BLTV model, Euclidean shrinkage for plain TV;
//! 4. gradient ascent on the two multiplier vectors.
//!
//! For the BLTV model the parameter maps are estimated from the observation
//! before the first iteration and optionally re-estimated from the current
//! iterate on a fixed schedule.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::map_estimation::{estimate_maps, EstimationConfig};
use crate::operators::{build_symbols, gradient, FourierSymbols};
use crate::regularization::{prox_anisotropic_l1, prox_euclidean_norm, ProxInput};
use crate::types::{BlurKernel, ParameterMaps, Raster};

/// Which regularizer the solver minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Isotropic TV with unit weight everywhere.
    Tv,
    /// Space-variant anisotropic penalty with estimated parameter maps.
    Bltv,
}

/// Full solver configuration.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub model: Model,
    /// Quadratic penalty on the `t = D u` constraint.
    pub beta_t: f64,
    /// Quadratic penalty on the `w = K u - g` constraint.
    pub beta_w: f64,
    /// Discrepancy factor: the residual target is `tau sigma sqrt(n)`.
    pub tau: f64,
    /// Known noise standard deviation.
    pub sigma: f64,
    pub max_iter: usize,
    /// Stop once the relative iterate change drops to this value.
    pub tol: f64,
    /// Re-estimate the maps every this many iterations; 0 disables updates.
    pub map_refresh_every: usize,
    /// When set, skip the discrepancy update and keep `mu` at this value.
    pub fixed_mu: Option<f64>,
    pub estimation: EstimationConfig,
}

impl SolverConfig {
    /// Defaults for a given model and noise level.
    pub fn new(model: Model, sigma: f64) -> Self {
        SolverConfig {
            model,
            beta_t: 1.0,
            beta_w: 1.0,
            tau: 1.0,
            sigma,
            max_iter: 1500,
            tol: 1e-6,
            map_refresh_every: 300,
            fixed_mu: None,
            estimation: EstimationConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta_t.is_finite() && self.beta_t > 0.0)
            || !(self.beta_w.is_finite() && self.beta_w > 0.0)
        {
            return Err(Error::argument("penalties beta_t, beta_w must be positive"));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::argument("discrepancy factor tau must be positive"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::argument("noise sigma must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::argument("max_iter must be at least 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::argument("tolerance must be positive"));
        }
        if let Some(mu) = self.fixed_mu {
            if !(mu.is_finite() && mu >= 0.0) {
                return Err(Error::argument("fixed mu must be non-negative"));
            }
        }
        if self.model == Model::Bltv {
            self.estimation.validate()?;
        }
        Ok(())
    }
}

/// Per-iteration diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationReport {
    pub k: usize,
    /// Relative iterate change `||u_k - u_{k-1}|| / ||u_{k-1}||`.
    pub delta: f64,
    /// `||t - D u||_2`.
    pub primal_res_t: f64,
    /// `||w - (K u - g)||_2`.
    pub primal_res_w: f64,
    pub mu: f64,
    /// `R(u) + (mu/2) ||K u - g||_2^2` with the current `mu`.
    pub objective: f64,
}

/// The solver's mutable state: iterate, auxiliaries and multipliers.
///
/// `t` and `rho_t` interleave the horizontal/vertical pair per pixel.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub u: Raster,
    pub w: Vec<f64>,
    pub t: Vec<f64>,
    pub rho_w: Vec<f64>,
    pub rho_t: Vec<f64>,
    pub mu: f64,
    pub k: usize,
}

/// Result of a solver run.
#[derive(Debug, Clone)]
pub struct Restoration {
    pub image: Raster,
    /// The parameter maps in effect when the solver stopped.
    pub maps: ParameterMaps,
    pub history: Vec<IterationReport>,
    /// How many times the maps were re-estimated during the run.
    pub map_refreshes: usize,
}

/// Precomputed spectral data for the quadratic `u`-subproblem
/// `(beta_t D^T D + beta_w K^T K) u = rhs`.
struct UStepEngine {
    fft: Fft2,
    conj_dh: Vec<Complex64>,
    conj_dv: Vec<Complex64>,
    conj_k: Vec<Complex64>,
    sym_k: Vec<Complex64>,
    denom: Vec<f64>,
    beta_t: f64,
    beta_w: f64,
}

impl UStepEngine {
    fn new(symbols: &FourierSymbols, beta_t: f64, beta_w: f64) -> Self {
        let n = symbols.width() * symbols.height();
        let mut denom = Vec::with_capacity(n);
        for i in 0..n {
            let d = beta_t * (symbols.sym_dh()[i].norm_sqr() + symbols.sym_dv()[i].norm_sqr())
                + beta_w * symbols.sym_k()[i].norm_sqr();
            // Normalized kernels have |sym_k| = 1 at zero frequency and the
            // difference symbols vanish only there, so this cannot trip.
            assert!(d > 0.0, "singular u-step denominator at frequency {i}");
            denom.push(d);
        }
        UStepEngine {
            fft: Fft2::new(symbols.width(), symbols.height()),
            conj_dh: symbols.sym_dh().iter().map(|z| z.conj()).collect(),
            conj_dv: symbols.sym_dv().iter().map(|z| z.conj()).collect(),
            conj_k: symbols.sym_k().iter().map(|z| z.conj()).collect(),
            sym_k: symbols.sym_k().to_vec(),
            denom,
            beta_t,
            beta_w,
        }
    }

    /// Applies the blur operator through its symbol.
    fn apply_k(&self, u: &[f64]) -> Vec<f64> {
        let mut spec = self.fft.forward_real(u);
        for (z, k) in spec.iter_mut().zip(self.sym_k.iter()) {
            *z *= k;
        }
        self.fft.inverse_real(spec)
    }

    /// Solves the normal equations, returning the new iterate and its blur.
    fn solve(
        &self,
        t: &[f64],
        rho_t: &[f64],
        w: &[f64],
        rho_w: &[f64],
        g: &[f64],
    ) -> (Vec<f64>, Vec<f64>) {
        let n = g.len();
        let mut vh = vec![0.0; n];
        let mut vv = vec![0.0; n];
        let mut z = vec![0.0; n];
        for i in 0..n {
            vh[i] = self.beta_t * t[2 * i] - rho_t[2 * i];
            vv[i] = self.beta_t * t[2 * i + 1] - rho_t[2 * i + 1];
            z[i] = self.beta_w * (w[i] + g[i]) - rho_w[i];
        }
        let fh = self.fft.forward_real(&vh);
        let fv = self.fft.forward_real(&vv);
        let fz = self.fft.forward_real(&z);
        let mut u_hat = Vec::with_capacity(n);
        for i in 0..n {
            let numerator = self.conj_dh[i] * fh[i] + self.conj_dv[i] * fv[i] + self.conj_k[i] * fz[i];
            u_hat.push(numerator / self.denom[i]);
        }
        let ku_hat: Vec<Complex64> = u_hat
            .iter()
            .zip(self.sym_k.iter())
            .map(|(a, b)| a * b)
            .collect();
        let u = self.fft.inverse_real(u_hat);
        let ku = self.fft.inverse_real(ku_hat);
        (u, ku)
    }
}

/// One exact `u`-minimization: solves
/// `(beta_t D^T D + beta_w K^T K) u = D^T (beta_t t - rho_t) + K^T (beta_w (w + g) - rho_w)`
/// frequency by frequency.
pub fn u_step(
    symbols: &FourierSymbols,
    t: &[f64],
    rho_t: &[f64],
    w: &[f64],
    rho_w: &[f64],
    g: &Raster,
    beta_t: f64,
    beta_w: f64,
) -> Raster {
    let engine = UStepEngine::new(symbols, beta_t, beta_w);
    let (u, _) = engine.solve(t, rho_t, w, rho_w, g.pixels());
    Raster::from_raw(g.width(), g.height(), u)
}

/// Exact `w`-minimization combined with the discrepancy-principle update of
/// `mu`.
///
/// With `v = (K u - g) + rho_w / beta_w` and `delta = tau sigma sqrt(n)`:
/// if `||v|| <= delta` then `mu = 0, w = v`; otherwise
/// `mu = beta_w (||v|| / delta - 1)` and `w = delta v / ||v||`. Both cases
/// equal the minimizer `w = (rho_w + beta_w (K u - g)) / (mu + beta_w)`.
pub fn w_step(ku_minus_g: &[f64], rho_w: &[f64], cfg: &SolverConfig) -> (Vec<f64>, f64) {
    let n = ku_minus_g.len();
    if let Some(mu) = cfg.fixed_mu {
        let w = (0..n)
            .map(|i| (rho_w[i] + cfg.beta_w * ku_minus_g[i]) / (mu + cfg.beta_w))
            .collect();
        return (w, mu);
    }
    let delta = cfg.tau * cfg.sigma * (n as f64).sqrt();
    let v: Vec<f64> = (0..n)
        .map(|i| ku_minus_g[i] + rho_w[i] / cfg.beta_w)
        .collect();
    let norm_v = norm2(&v);
    if norm_v <= delta {
        (v, 0.0)
    } else {
        let mu = cfg.beta_w * (norm_v / delta - 1.0);
        let scale = delta / norm_v;
        (v.iter().map(|x| scale * x).collect(), mu)
    }
}

/// Per-pixel proximal step on the interleaved auxiliary `t`.
///
/// The anchor is `q_i = (D u)_i + rho_{t,i} / beta_t`; the BLTV model applies
/// the rotated anisotropic soft threshold with the pixel's `(lambda, theta)`,
/// the TV model the Euclidean shrinkage with threshold `1 / beta_t`.
pub fn t_step(du: &[f64], rho_t: &[f64], maps: &ParameterMaps, cfg: &SolverConfig) -> Vec<f64> {
    let n = du.len() / 2;
    debug_assert_eq!(du.len(), rho_t.len());
    debug_assert_eq!(maps.len(), n);
    let mut t = vec![0.0; 2 * n];
    match cfg.model {
        Model::Tv => {
            let threshold = 1.0 / cfg.beta_t;
            for i in 0..n {
                let q = [
                    du[2 * i] + rho_t[2 * i] / cfg.beta_t,
                    du[2 * i + 1] + rho_t[2 * i + 1] / cfg.beta_t,
                ];
                let out = prox_euclidean_norm(q, threshold);
                t[2 * i] = out[0];
                t[2 * i + 1] = out[1];
            }
        }
        Model::Bltv => {
            for i in 0..n {
                let (lambda1, lambda2, theta) = maps.at(i);
                let input = ProxInput {
                    q: [
                        du[2 * i] + rho_t[2 * i] / cfg.beta_t,
                        du[2 * i + 1] + rho_t[2 * i + 1] / cfg.beta_t,
                    ],
                    lambda1,
                    lambda2,
                    theta,
                    beta: cfg.beta_t,
                };
                let out = prox_anisotropic_l1(&input);
                t[2 * i] = out[0];
                t[2 * i + 1] = out[1];
            }
        }
    }
    t
}

/// Multiplier ascent:
/// `rho_w <- rho_w - beta_w (w - (K u - g))`,
/// `rho_t <- rho_t - beta_t (t - D u)`.
pub fn multiplier_step(state: &mut SolverState, du: &[f64], ku_minus_g: &[f64], cfg: &SolverConfig) {
    for i in 0..state.rho_w.len() {
        state.rho_w[i] -= cfg.beta_w * (state.w[i] - ku_minus_g[i]);
    }
    for j in 0..state.rho_t.len() {
        state.rho_t[j] -= cfg.beta_t * (state.t[j] - du[j]);
    }
}

/// Re-estimates the parameter maps from the current iterate.
pub fn refresh_maps(u: &Raster, cfg: &SolverConfig) -> Result<ParameterMaps> {
    estimate_maps(u, &cfg.estimation)
}

/// Runs the full ADMM loop, discarding per-iteration callbacks.
pub fn solve(g: &Raster, kernel: &BlurKernel, cfg: &SolverConfig) -> Result<Restoration> {
    solve_with(g, kernel, cfg, |_| {})
}

/// Runs the full ADMM loop, invoking `sink` once per iteration.
///
/// Stops as soon as `k >= max_iter` or the relative iterate change drops to
/// `tol`; the first change is measured against the initial iterate `u_0 = g`.
pub fn solve_with<F>(
    g: &Raster,
    kernel: &BlurKernel,
    cfg: &SolverConfig,
    mut sink: F,
) -> Result<Restoration>
where
    F: FnMut(&IterationReport),
{
    cfg.validate()?;
    let (width, height) = (g.width(), g.height());
    let n = g.len();
    let symbols = build_symbols(kernel, width, height)?;
    let engine = UStepEngine::new(&symbols, cfg.beta_t, cfg.beta_w);

    let mut maps = match cfg.model {
        Model::Tv => ParameterMaps::uniform(n, 1.0, 1.0, 0.0)?,
        Model::Bltv => estimate_maps(g, &cfg.estimation)?,
    };

    // The discrepancy principle pins ||Ku - g||, so the minimizer is
    // invariant to the regularizer's overall scale. Dividing the fitted
    // weights by their median brings them to O(1) -- the scale the
    // penalties beta are calibrated for -- without changing the model.
    // The same scale is reused after map refreshes; reports convert mu and
    // the objective back to the units of the raw maps.
    let scale = match cfg.model {
        Model::Tv => 1.0,
        Model::Bltv => median_lambda(&maps),
    };
    let mut working_maps = normalize_maps(&maps, scale);
    let mut wcfg = cfg.clone();
    if let Some(mu) = cfg.fixed_mu {
        wcfg.fixed_mu = Some(mu / scale);
    }

    // Warm start at the observation: u0 = g, t0 = D u0, w0 = K u0 - g.
    let ku0 = engine.apply_k(g.pixels());
    let mut state = SolverState {
        u: g.clone(),
        w: ku0.iter().zip(g.pixels()).map(|(a, b)| a - b).collect(),
        t: gradient(g).interleaved(),
        rho_w: vec![0.0; n],
        rho_t: vec![0.0; 2 * n],
        mu: 0.0,
        k: 0,
    };
    let mut prev_u: Vec<f64> = g.pixels().to_vec();
    let mut history = Vec::new();
    let mut map_refreshes = 0;

    for k in 1..=cfg.max_iter {
        state.k = k;
        let (u_new, ku_new) = engine.solve(&state.t, &state.rho_t, &state.w, &state.rho_w, g.pixels());
        if !u_new.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical(format!(
                "solver diverged: non-finite iterate at iteration {k}"
            )));
        }
        state.u = Raster::from_raw(width, height, u_new);
        let ku_minus_g: Vec<f64> = ku_new.iter().zip(g.pixels()).map(|(a, b)| a - b).collect();

        let (w_new, mu) = w_step(&ku_minus_g, &state.rho_w, &wcfg);
        state.w = w_new;
        state.mu = mu;

        let du = gradient(&state.u).interleaved();
        state.t = t_step(&du, &state.rho_t, &working_maps, cfg);

        multiplier_step(&mut state, &du, &ku_minus_g, cfg);

        let delta = norm2_diff(state.u.pixels(), &prev_u) / norm2(&prev_u).max(f64::MIN_POSITIVE);
        let fidelity: f64 = ku_minus_g.iter().map(|r| r * r).sum::<f64>();
        // Reported in raw-map units: J = R(u; maps) + (mu_raw / 2) ||Ku-g||^2.
        let mu_raw = mu * scale;
        let report = IterationReport {
            k,
            delta,
            primal_res_t: norm2_diff(&state.t, &du),
            primal_res_w: norm2_diff(&state.w, &ku_minus_g),
            mu: mu_raw,
            objective: regularizer_value(&du, &maps, cfg.model) + 0.5 * mu_raw * fidelity,
        };
        sink(&report);
        history.push(report);

        // The warm start makes the first u-step reproduce g exactly (its
        // right-hand side is the operator applied to g), so delta_1 is
        // rounding noise and must not trip the tolerance.
        if (k > 1 && delta <= cfg.tol) || k == cfg.max_iter {
            break;
        }
        if cfg.model == Model::Bltv
            && cfg.map_refresh_every > 0
            && k % cfg.map_refresh_every == 0
        {
            maps = estimate_maps(&state.u, &cfg.estimation)?;
            working_maps = normalize_maps(&maps, scale);
            map_refreshes += 1;
        }
        prev_u.copy_from_slice(state.u.pixels());
    }

    Ok(Restoration {
        image: state.u,
        maps,
        history,
        map_refreshes,
    })
}

/// Median of the pooled per-pixel weights; the solver's internal
/// normalization constant.
fn median_lambda(maps: &ParameterMaps) -> f64 {
    let mut pooled: Vec<f64> = maps
        .lambda1()
        .iter()
        .chain(maps.lambda2().iter())
        .copied()
        .collect();
    pooled.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pooled[pooled.len() / 2]
}

fn normalize_maps(maps: &ParameterMaps, scale: f64) -> ParameterMaps {
    if scale == 1.0 {
        return maps.clone();
    }
    ParameterMaps::from_raw(
        maps.lambda1().iter().map(|l| l / scale).collect(),
        maps.lambda2().iter().map(|l| l / scale).collect(),
        maps.theta().to_vec(),
    )
}

fn regularizer_value(du: &[f64], maps: &ParameterMaps, model: Model) -> f64 {
    let n = du.len() / 2;
    let mut acc = 0.0;
    match model {
        Model::Tv => {
            for i in 0..n {
                acc += du[2 * i].hypot(du[2 * i + 1]);
            }
        }
        Model::Bltv => {
            for i in 0..n {
                let (l1, l2, theta) = maps.at(i);
                let (sin, cos) = theta.sin_cos();
                let (x, y) = (du[2 * i], du[2 * i + 1]);
                acc += l1 * (cos * x + sin * y).abs() + l2 * (cos * y - sin * x).abs();
            }
        }
    }
    acc
}

pub(crate) fn norm2(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn norm2_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
