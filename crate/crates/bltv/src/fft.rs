//! Minimal 2-D FFT plumbing on top of `rustfft`.
//!
//! Transforms are unnormalized in the forward direction; the inverse divides
//! by the pixel count, so `inverse(forward(x)) == x` up to rounding.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

/// Planned row/column transforms for one grid size, reusable across calls.
pub(crate) struct Fft2 {
    width: usize,
    height: usize,
    row_fw: Arc<dyn Fft<f64>>,
    col_fw: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(width: usize, height: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            width,
            height,
            row_fw: planner.plan_fft(width, FftDirection::Forward),
            col_fw: planner.plan_fft(height, FftDirection::Forward),
            row_inv: planner.plan_fft(width, FftDirection::Inverse),
            col_inv: planner.plan_fft(height, FftDirection::Inverse),
        }
    }

    fn pass(&self, data: &mut [Complex64], forward: bool) {
        let (row, col) = if forward {
            (&self.row_fw, &self.col_fw)
        } else {
            (&self.row_inv, &self.col_inv)
        };
        for line in data.chunks_exact_mut(self.width) {
            row.process(line);
        }
        let mut t = transpose(self.width, self.height, data);
        for line in t.chunks_exact_mut(self.height) {
            col.process(line);
        }
        let back = transpose(self.height, self.width, &t);
        data.copy_from_slice(&back);
    }

    /// Forward transform of a real row-major image.
    pub fn forward_real(&self, data: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(data.len(), self.width * self.height);
        let mut buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.pass(&mut buf, true);
        buf
    }

    /// Inverse transform, normalized by `1 / (width * height)`, keeping the
    /// real part. The imaginary parts are rounding noise whenever the
    /// spectrum came from a real-signal computation.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.pass(&mut spectrum, false);
        let scale = 1.0 / (self.width * self.height) as f64;
        spectrum.iter().map(|z| z.re * scale).collect()
    }
}

fn transpose(width: usize, height: usize, data: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for r in 0..height {
        for c in 0..width {
            out[c * height + r] = data[r * width + c];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_recovers_input() {
        let (w, h) = (13, 17);
        let data: Vec<f64> = (0..w * h).map(|i| (i as f64 * 0.37).sin()).collect();
        let fft = Fft2::new(w, h);
        let back = fft.inverse_real(fft.forward_real(&data));
        for (a, b) in data.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn parseval_identity() {
        // ||x||_2 equals ||X||_2 / sqrt(n) for the unnormalized forward DFT.
        let (w, h) = (8, 8);
        let data: Vec<f64> = (0..w * h).map(|i| ((i * 31 % 97) as f64) / 9.7).collect();
        let fft = Fft2::new(w, h);
        let spec = fft.forward_real(&data);
        let space: f64 = data.iter().map(|x| x * x).sum::<f64>().sqrt();
        let freq: f64 = (spec.iter().map(|z| z.norm_sqr()).sum::<f64>() / (w * h) as f64).sqrt();
        assert!((space - freq).abs() <= 1e-10 * space.max(1.0));
    }
}
