//! Deterministic random number generation.
//!
//! Every stochastic operation in the crate draws from this one generator so
//! that a `(seed, parameters)` pair fixes the output byte-for-byte across
//! runs and platforms. The stream is specified as follows:
//!
//! * the 64-bit seed is expanded into a ChaCha8 key with SplitMix64
//!   (`rand_core`'s `seed_from_u64`), and raw words come from the ChaCha8
//!   stream cipher;
//! * uniforms on `[0, 1)` take the top 53 bits of each 64-bit word:
//!   `(word >> 11) * 2^-53`;
//! * standard normal pairs use the Box-Muller transform on two uniforms;
//! * Laplace variates use the inverse CDF of one uniform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A seeded, reproducible random stream.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform draw on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.inner.next_u64() >> 11) as f64 * SCALE
    }

    /// One Box-Muller pair of independent standard normal variates.
    ///
    /// The radial uniform is mapped to `(0, 1]` so the logarithm is finite.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let phi = 2.0 * std::f64::consts::PI * u2;
        (r * phi.cos(), r * phi.sin())
    }

    /// Fills `out` with independent `N(0, sigma^2)` variates.
    ///
    /// Values are taken pairwise from [`normal_pair`](Self::normal_pair); for
    /// odd lengths the second variate of the last pair is discarded.
    pub fn fill_normal(&mut self, sigma: f64, out: &mut [f64]) {
        let mut i = 0;
        while i + 1 < out.len() {
            let (a, b) = self.normal_pair();
            out[i] = sigma * a;
            out[i + 1] = sigma * b;
            i += 2;
        }
        if i < out.len() {
            let (a, _) = self.normal_pair();
            out[i] = sigma * a;
        }
    }

    /// Zero-centered Laplace variate with the given scale, via inverse CDF.
    ///
    /// A uniform draw of exactly 0.5 maps to exactly 0.
    #[inline]
    pub fn laplace(&mut self, scale: f64) -> f64 {
        laplace_inverse_cdf(self.uniform(), scale)
    }
}

/// Inverse CDF of the zero-centered Laplace distribution, `u` in `[0, 1)`.
#[inline]
pub fn laplace_inverse_cdf(u: f64, scale: f64) -> f64 {
    let centered = u - 0.5;
    // 1 - 2|u - 0.5| is 0 only at u = 0; clamp so ln stays finite.
    let t = (1.0 - 2.0 * centered.abs()).max(f64::MIN_POSITIVE);
    -scale * centered.signum() * t.ln()
}
