//! Synthetic degradation: Gaussian blur kernels and seeded additive white
//! Gaussian noise, producing observations `g = K u + e`.

use crate::error::{Error, Result};
use crate::operators::convolve;
use crate::rng::SeededRng;
use crate::types::{BlurKernel, Raster};

/// Additive white Gaussian noise specification. `sigma` is expressed on the
/// `[0, 255]` intensity scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::argument(format!(
                "noise sigma must be non-negative, got {sigma}"
            )));
        }
        Ok(NoiseSpec { sigma, seed })
    }
}

/// Sampled isotropic Gaussian kernel with odd side length, normalized to
/// unit sum: `w(x, y) ~ exp(-(x^2 + y^2) / (2 sigma^2))` over integer
/// offsets in `[-(size-1)/2, (size-1)/2]`.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Result<BlurKernel> {
    if size == 0 || size % 2 == 0 {
        return Err(Error::argument(format!(
            "kernel size must be odd and positive, got {size}"
        )));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::argument(format!(
            "kernel sigma must be positive, got {sigma}"
        )));
    }
    let half = (size as isize - 1) / 2;
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    let mut weights = Vec::with_capacity(size * size);
    for y in -half..=half {
        for x in -half..=half {
            weights.push((-((x * x + y * y) as f64) * inv_two_sigma_sq).exp());
        }
    }
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    BlurKernel::new(size, sigma, weights)
}

/// Blurs `u` and adds seeded white Gaussian noise. With `sigma == 0` the
/// result is exactly the blurred image; the noise is never clipped.
pub fn degrade(u: &Raster, kernel: &BlurKernel, noise: &NoiseSpec) -> Result<Raster> {
    if !(noise.sigma.is_finite() && noise.sigma >= 0.0) {
        return Err(Error::argument("noise sigma must be non-negative"));
    }
    let mut blurred = convolve(u, kernel)?;
    if noise.sigma == 0.0 {
        return Ok(blurred);
    }
    let mut rng = SeededRng::new(noise.seed);
    let mut e = vec![0.0; blurred.len()];
    rng.fill_normal(noise.sigma, &mut e);
    for (px, noise) in blurred.pixels_mut().iter_mut().zip(e.iter()) {
        *px += noise;
    }
    Ok(blurred)
}
