//! Per-pixel parameter maps from sliding-window maximum-likelihood fits.
//!
//! For every pixel the gradient vectors inside the square window of radius
//! `r` centered on it (periodic wrap at the borders, matching the gradient
//! operator) are treated as draws from one local bivariate Laplacian, and
//! the fitted `(lambda1, lambda2, theta)` is written into the maps.

use crate::bld;
use crate::error::{Error, Result};
use crate::operators::gradient;
use crate::types::{GradientField, ParameterMaps, Raster};

/// Windowing and fit parameters for map estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationConfig {
    /// Window radius in pixels; the window holds `(2 radius + 1)^2` samples.
    pub radius: usize,
    /// Number of grid points for the angle search on `[0, pi/2)`.
    pub grid_size: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Degeneracy guard added inside the fit's logarithms and denominators.
    pub eps: f64,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig {
            radius: 8,
            grid_size: 90,
            lambda_min: 1e-4,
            lambda_max: 1e4,
            eps: 1e-4,
        }
    }
}

impl EstimationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radius == 0 {
            return Err(Error::argument("window radius must be at least 1"));
        }
        if self.grid_size < 2 {
            return Err(Error::argument("theta grid must have at least 2 points"));
        }
        if !(self.lambda_min.is_finite() && self.lambda_min > 0.0) {
            return Err(Error::argument("lambda_min must be positive"));
        }
        if !(self.lambda_max.is_finite() && self.lambda_max >= self.lambda_min) {
            return Err(Error::argument("lambda_max must be finite and >= lambda_min"));
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(Error::argument("eps must be non-negative"));
        }
        Ok(())
    }
}

/// Estimates the maps from an image: gradient first, then per-pixel fits.
pub fn estimate_maps(u: &Raster, cfg: &EstimationConfig) -> Result<ParameterMaps> {
    estimate_maps_from_gradient(&gradient(u), cfg)
}

/// Per-pixel fits over an existing gradient field.
///
/// Exposed separately so callers (and tests) can supply gradient samples
/// that did not come from an image.
pub fn estimate_maps_from_gradient(
    field: &GradientField,
    cfg: &EstimationConfig,
) -> Result<ParameterMaps> {
    cfg.validate()?;
    let (w, h) = (field.width(), field.height());
    let n = w * h;
    let side = 2 * cfg.radius + 1;
    let mut lambda1 = vec![0.0; n];
    let mut lambda2 = vec![0.0; n];
    let mut theta = vec![0.0; n];

    // One scratch buffer reused across pixels; the window is always filled
    // in the same relative order, which keeps the result exactly invariant
    // under circular shifts of the input.
    let mut window: Vec<[f64; 2]> = Vec::with_capacity(side * side);
    let radius = cfg.radius as isize;

    for r in 0..h as isize {
        for c in 0..w as isize {
            window.clear();
            for dr in -radius..=radius {
                let rr = (r + dr).rem_euclid(h as isize) as usize;
                for dc in -radius..=radius {
                    let cc = (c + dc).rem_euclid(w as isize) as usize;
                    window.push(field.at(rr * w + cc));
                }
            }
            let p = bld::fit_slice(
                &window,
                cfg.grid_size,
                cfg.lambda_min,
                cfg.lambda_max,
                cfg.eps,
            );
            let i = (r as usize) * w + c as usize;
            lambda1[i] = p.lambda1;
            lambda2[i] = p.lambda2;
            // The grid search already confines the angle to [0, pi/2).
            theta[i] = p.theta;
        }
    }
    Ok(ParameterMaps::from_raw(lambda1, lambda2, theta))
}
