//! Restoration quality metrics: ISNR and SSIM.

use crate::error::{Error, Result};
use crate::types::Raster;

/// SSIM parameters; defaults are the canonical 11-tap Gaussian window with
/// sigma 1.5 and stabilizers `k1 = 0.01`, `k2 = 0.03` on a 255 dynamic
/// range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimConfig {
    pub window_size: usize,
    pub window_sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
}

impl Default for SsimConfig {
    fn default() -> Self {
        SsimConfig {
            window_size: 11,
            window_sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 255.0,
        }
    }
}

impl SsimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_size < 3 || self.window_size % 2 == 0 {
            return Err(Error::argument("SSIM window size must be odd and >= 3"));
        }
        if !(self.window_sigma.is_finite() && self.window_sigma > 0.0) {
            return Err(Error::argument("SSIM window sigma must be positive"));
        }
        if !(self.k1 > 0.0 && self.k2 > 0.0) {
            return Err(Error::argument("SSIM stabilizers k1, k2 must be positive"));
        }
        if !(self.dynamic_range.is_finite() && self.dynamic_range > 0.0) {
            return Err(Error::argument("SSIM dynamic range must be positive"));
        }
        Ok(())
    }
}

/// Improved signal-to-noise ratio in dB:
/// `10 log10( ||g - u||^2 / ||u* - u||^2 )` for restoration `u*`, observation
/// `g` and ground truth `u`.
///
/// Returns `+inf` when the restoration equals the truth exactly (zero
/// denominator).
pub fn isnr(restored: &Raster, observed: &Raster, truth: &Raster) -> Result<f64> {
    if !restored.same_shape(observed) || !restored.same_shape(truth) {
        return Err(Error::dimension(
            "ISNR inputs must share the same dimensions".to_string(),
        ));
    }
    let num: f64 = observed
        .pixels()
        .iter()
        .zip(truth.pixels())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let den: f64 = restored
        .pixels()
        .iter()
        .zip(truth.pixels())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if den == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (num / den).log10())
}

/// Mean structural similarity over all fully interior window positions
/// (windows never wrap), using a Gaussian-weighted window.
pub fn ssim(a: &Raster, b: &Raster, cfg: &SsimConfig) -> Result<f64> {
    cfg.validate()?;
    if !a.same_shape(b) {
        return Err(Error::dimension(
            "SSIM inputs must share the same dimensions".to_string(),
        ));
    }
    let ws = cfg.window_size;
    if a.width() < ws || a.height() < ws {
        return Err(Error::dimension(format!(
            "image {}x{} is smaller than the {ws}x{ws} SSIM window",
            a.width(),
            a.height()
        )));
    }

    // Normalized Gaussian window.
    let half = (ws as isize - 1) / 2;
    let mut weights = Vec::with_capacity(ws * ws);
    for y in -half..=half {
        for x in -half..=half {
            weights.push(
                (-((x * x + y * y) as f64) / (2.0 * cfg.window_sigma * cfg.window_sigma)).exp(),
            );
        }
    }
    let wsum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= wsum;
    }

    let c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
    let c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);

    let (width, height) = (a.width(), a.height());
    let (pa, pb) = (a.pixels(), b.pixels());
    let mut total = 0.0;
    let mut count = 0usize;
    for r0 in 0..=(height - ws) {
        for c0 in 0..=(width - ws) {
            let (mut mx, mut my) = (0.0, 0.0);
            let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
            let mut wi = 0;
            for dr in 0..ws {
                let row = (r0 + dr) * width + c0;
                for dc in 0..ws {
                    let wgt = weights[wi];
                    wi += 1;
                    let x = pa[row + dc];
                    let y = pb[row + dc];
                    mx += wgt * x;
                    my += wgt * y;
                    sxx += wgt * x * x;
                    syy += wgt * y * y;
                    sxy += wgt * x * y;
                }
            }
            let vx = sxx - mx * mx;
            let vy = syy - my * my;
            let cxy = sxy - mx * my;
            let local = ((2.0 * mx * my + c1) * (2.0 * cxy + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
            total += local;
            count += 1;
        }
    }
    Ok(total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn noisy(base: &Raster, sigma: f64, seed: u64) -> Raster {
        let mut rng = SeededRng::new(seed);
        let mut e = vec![0.0; base.len()];
        rng.fill_normal(sigma, &mut e);
        let data: Vec<f64> = base.pixels().iter().zip(e.iter()).map(|(a, b)| a + b).collect();
        Raster::new(base.width(), base.height(), data).unwrap()
    }

    #[test]
    fn isnr_of_observation_is_zero() {
        let truth = crate::synthetic::piecewise_shapes(16, 16);
        let g = noisy(&truth, 10.0, 1);
        let v = isnr(&g, &g, &truth).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn isnr_direct_ratio() {
        // ||g - u||^2 = 100, ||u* - u||^2 = 10 gives exactly 10 dB.
        let truth = Raster::filled(10, 1, 0.0).unwrap();
        let g = Raster::new(10, 1, vec![10.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let mut restored_data = vec![0.0; 10];
        restored_data[0] = 10f64.sqrt();
        let restored = Raster::new(10, 1, restored_data).unwrap();
        let v = isnr(&restored, &g, &truth).unwrap();
        assert!((v - 10.0).abs() <= 1e-12);
    }

    #[test]
    fn isnr_perfect_restoration_is_infinite() {
        let truth = crate::synthetic::piecewise_shapes(8, 8);
        let g = noisy(&truth, 5.0, 2);
        let v = isnr(&truth, &g, &truth).unwrap();
        assert!(v.is_infinite() && v > 0.0);
    }

    #[test]
    fn isnr_antisymmetry() {
        let truth = crate::synthetic::piecewise_shapes(12, 12);
        let g = noisy(&truth, 8.0, 3);
        let r = noisy(&truth, 4.0, 4);
        let forward = isnr(&r, &g, &truth).unwrap();
        let swapped = isnr(&g, &r, &truth).unwrap();
        assert!((forward + swapped).abs() <= 1e-12);
    }

    #[test]
    fn isnr_rejects_mismatched_shapes() {
        let a = Raster::filled(4, 4, 0.0).unwrap();
        let b = Raster::filled(5, 4, 0.0).unwrap();
        assert!(isnr(&a, &b, &a).is_err());
    }

    #[test]
    fn ssim_identical_images_is_one() {
        let a = crate::synthetic::piecewise_shapes(32, 32);
        let v = ssim(&a, &a, &SsimConfig::default()).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn ssim_penalizes_mean_shift() {
        let a = crate::synthetic::piecewise_shapes(32, 32);
        let shifted: Vec<f64> = a.pixels().iter().map(|v| v + 120.0).collect();
        let b = Raster::new(32, 32, shifted).unwrap();
        let v = ssim(&a, &b, &SsimConfig::default()).unwrap();
        assert!(v < 1.0, "ssim {v}");
    }

    #[test]
    fn ssim_is_symmetric() {
        let truth = crate::synthetic::piecewise_shapes(24, 24);
        let a = noisy(&truth, 12.0, 5);
        let b = noisy(&truth, 20.0, 6);
        let cfg = SsimConfig::default();
        let ab = ssim(&a, &b, &cfg).unwrap();
        let ba = ssim(&b, &a, &cfg).unwrap();
        assert!((ab - ba).abs() <= 1e-12);
    }

    #[test]
    fn ssim_rejects_small_images() {
        let a = Raster::filled(8, 8, 0.0).unwrap();
        assert!(ssim(&a, &a, &SsimConfig::default()).is_err());
    }

    #[test]
    fn ssim_config_validation() {
        let mut cfg = SsimConfig::default();
        cfg.window_size = 10;
        assert!(cfg.validate().is_err());
        cfg.window_size = 1;
        assert!(cfg.validate().is_err());
        cfg = SsimConfig {
            k1: 0.0,
            ..SsimConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
