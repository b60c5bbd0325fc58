//! Dense data containers shared by the whole crate.
//!
//! Images are stored as flat `f64` arrays in row-major order with the pixel
//! at `(row, col)` living at index `row * width + col`. All arithmetic is
//! carried out in double precision; 8-bit images are promoted on load and
//! only clipped back to `[0, 255]` when exported.

use crate::error::{Error, Result};

/// A dense 2-D grayscale image.
///
/// Intensities are nominally on the `[0, 255]` scale but intermediate
/// iterates of the solver are allowed to leave that range. Values must be
/// finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Raster {
    /// Builds a raster from row-major data, validating shape and finiteness.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::argument(format!(
                "raster dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::dimension(format!(
                "raster data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::argument("raster contains non-finite values"));
        }
        Ok(Raster {
            width,
            height,
            data,
        })
    }

    /// Constant-filled raster.
    pub fn filled(width: usize, height: usize, fill: f64) -> Result<Self> {
        if !fill.is_finite() {
            return Err(Error::argument("fill value must be finite"));
        }
        Raster::new(width, height, vec![fill; width.saturating_mul(height)])
    }

    /// Internal constructor for data known to be valid (solver hot paths).
    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Raster {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of pixels.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.data
    }

    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.data
    }

    /// Flat index of `(row, col)`.
    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.width + col] = value;
    }

    pub(crate) fn same_shape(&self, other: &Raster) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Per-pixel forward differences of an image, one horizontal and one
/// vertical component per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    width: usize,
    height: usize,
    dh: Vec<f64>,
    dv: Vec<f64>,
}

impl GradientField {
    pub fn new(width: usize, height: usize, dh: Vec<f64>, dv: Vec<f64>) -> Result<Self> {
        let n = width * height;
        if width == 0 || height == 0 {
            return Err(Error::argument("gradient field dimensions must be positive"));
        }
        if dh.len() != n || dv.len() != n {
            return Err(Error::dimension(format!(
                "gradient component lengths {}/{} do not match {width}x{height}",
                dh.len(),
                dv.len()
            )));
        }
        if !dh.iter().chain(dv.iter()).all(|v| v.is_finite()) {
            return Err(Error::argument("gradient field contains non-finite values"));
        }
        Ok(GradientField {
            width,
            height,
            dh,
            dv,
        })
    }

    pub(crate) fn from_raw(width: usize, height: usize, dh: Vec<f64>, dv: Vec<f64>) -> Self {
        debug_assert_eq!(dh.len(), width * height);
        debug_assert_eq!(dv.len(), width * height);
        GradientField {
            width,
            height,
            dh,
            dv,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.dh.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dh.is_empty()
    }

    pub fn dh(&self) -> &[f64] {
        &self.dh
    }

    pub fn dv(&self) -> &[f64] {
        &self.dv
    }

    /// Gradient vector at one pixel.
    #[inline]
    pub fn at(&self, i: usize) -> [f64; 2] {
        [self.dh[i], self.dv[i]]
    }

    /// Pixel-interleaved layout `[dh_0, dv_0, dh_1, dv_1, ...]`, the layout
    /// used for the solver's auxiliary variable and its multiplier.
    pub fn interleaved(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.dh.len());
        for i in 0..self.dh.len() {
            out.push(self.dh[i]);
            out.push(self.dv[i]);
        }
        out
    }
}

/// Per-pixel `(lambda1, lambda2, theta)` triples describing the local
/// anisotropic penalty: scales along the two rotated axes and the rotation
/// angle in `[0, pi/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterMaps {
    lambda1: Vec<f64>,
    lambda2: Vec<f64>,
    theta: Vec<f64>,
}

impl ParameterMaps {
    pub fn new(lambda1: Vec<f64>, lambda2: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if lambda1.len() != lambda2.len() || lambda1.len() != theta.len() {
            return Err(Error::dimension(format!(
                "parameter map lengths disagree: {}/{}/{}",
                lambda1.len(),
                lambda2.len(),
                theta.len()
            )));
        }
        if lambda1.is_empty() {
            return Err(Error::argument("parameter maps must not be empty"));
        }
        let scales_ok = lambda1
            .iter()
            .chain(lambda2.iter())
            .all(|v| v.is_finite() && *v > 0.0);
        if !scales_ok {
            return Err(Error::argument("lambda maps must be finite and positive"));
        }
        if !theta
            .iter()
            .all(|t| t.is_finite() && (0.0..std::f64::consts::FRAC_PI_2).contains(t))
        {
            return Err(Error::argument("theta map must lie in [0, pi/2)"));
        }
        Ok(ParameterMaps {
            lambda1,
            lambda2,
            theta,
        })
    }

    /// Maps with the same triple at every pixel. `(1, 1, 0)` reproduces the
    /// plain isotropic TV configuration.
    pub fn uniform(n: usize, lambda1: f64, lambda2: f64, theta: f64) -> Result<Self> {
        ParameterMaps::new(vec![lambda1; n], vec![lambda2; n], vec![theta; n])
    }

    pub(crate) fn from_raw(lambda1: Vec<f64>, lambda2: Vec<f64>, theta: Vec<f64>) -> Self {
        ParameterMaps {
            lambda1,
            lambda2,
            theta,
        }
    }

    pub fn len(&self) -> usize {
        self.lambda1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda1.is_empty()
    }

    pub fn lambda1(&self) -> &[f64] {
        &self.lambda1
    }

    pub fn lambda2(&self) -> &[f64] {
        &self.lambda2
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// `(lambda1, lambda2, theta)` at one pixel.
    #[inline]
    pub fn at(&self, i: usize) -> (f64, f64, f64) {
        (self.lambda1[i], self.lambda2[i], self.theta[i])
    }
}

/// A normalized isotropic blur kernel with odd side length.
#[derive(Debug, Clone, PartialEq)]
pub struct BlurKernel {
    size: usize,
    sigma: f64,
    weights: Vec<f64>,
}

impl BlurKernel {
    /// Validates oddness, normalization and 4-fold symmetry of the weights.
    pub fn new(size: usize, sigma: f64, weights: Vec<f64>) -> Result<Self> {
        if size == 0 || size % 2 == 0 {
            return Err(Error::argument(format!(
                "kernel size must be odd and positive, got {size}"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::argument("kernel sigma must be positive"));
        }
        if weights.len() != size * size {
            return Err(Error::dimension(format!(
                "kernel weight count {} does not match {size}x{size}",
                weights.len()
            )));
        }
        if !weights.iter().all(|w| w.is_finite() && *w >= 0.0) {
            return Err(Error::argument("kernel weights must be finite and non-negative"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::argument(format!(
                "kernel weights must sum to 1, got {sum}"
            )));
        }
        // Isotropy: invariant under 90-degree rotation and reflection.
        let at = |r: usize, c: usize| weights[r * size + c];
        for r in 0..size {
            for c in 0..size {
                let rot = at(c, size - 1 - r);
                let refl = at(r, size - 1 - c);
                if (at(r, c) - rot).abs() > 1e-12 || (at(r, c) - refl).abs() > 1e-12 {
                    return Err(Error::argument("kernel weights are not 4-fold symmetric"));
                }
            }
        }
        Ok(BlurKernel {
            size,
            sigma,
            weights,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Half-width `(size - 1) / 2`; the kernel is centered on that offset.
    pub fn half(&self) -> usize {
        (self.size - 1) / 2
    }

    #[inline]
    pub fn weight(&self, r: usize, c: usize) -> f64 {
        self.weights[r * self.size + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filled_produces_constant_raster() {
        let r = Raster::filled(2, 2, 0.0).unwrap();
        assert_eq!(r.pixels(), &[0.0, 0.0, 0.0, 0.0]);

        let r = Raster::filled(1, 1, 255.0).unwrap();
        assert_eq!(r.pixels(), &[255.0]);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(Raster::filled(0, 3, 1.0).is_err());
        assert!(Raster::filled(3, 0, 1.0).is_err());
    }

    #[test]
    fn data_length_must_match() {
        assert!(Raster::new(2, 2, vec![0.0; 3]).is_err());
        assert!(Raster::new(2, 2, vec![0.0; 4]).is_ok());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(Raster::new(2, 1, vec![0.0, f64::NAN]).is_err());
        assert!(Raster::filled(2, 2, f64::INFINITY).is_err());
        assert!(GradientField::new(1, 2, vec![0.0, f64::INFINITY], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn row_major_indexing() {
        let mut r = Raster::filled(3, 2, 0.0).unwrap();
        r.set(1, 2, 7.0);
        assert_eq!(r.pixels()[5], 7.0);
        assert_eq!(r.get(1, 2), 7.0);
        assert_eq!(r.index(1, 2), 5);
    }

    #[test]
    fn parameter_maps_validation() {
        assert!(ParameterMaps::uniform(4, 1.0, 1.0, 0.0).is_ok());
        assert!(ParameterMaps::uniform(4, 0.0, 1.0, 0.0).is_err());
        assert!(ParameterMaps::uniform(4, 1.0, 1.0, std::f64::consts::FRAC_PI_2).is_err());
        assert!(ParameterMaps::uniform(4, 1.0, 1.0, -0.1).is_err());
        assert!(ParameterMaps::new(vec![1.0], vec![1.0, 2.0], vec![0.0]).is_err());
    }

    #[test]
    fn kernel_validation() {
        assert!(BlurKernel::new(1, 1.0, vec![1.0]).is_ok());
        assert!(BlurKernel::new(2, 1.0, vec![0.25; 4]).is_err());
        assert!(BlurKernel::new(1, 1.0, vec![0.5]).is_err());
        // Asymmetric weights summing to one.
        let mut w = vec![0.0; 9];
        w[0] = 0.5;
        w[8] = 0.5;
        assert!(BlurKernel::new(3, 1.0, w).is_err());
    }

    #[test]
    fn interleaved_layout_pairs_components() {
        let f = GradientField::new(2, 1, vec![1.0, 2.0], vec![3.0, 4.0]).unwrap();
        assert_eq!(f.interleaved(), vec![1.0, 3.0, 2.0, 4.0]);
    }
}
