//! Discrete image operators: forward-difference gradient, its exact adjoint,
//! periodic convolution, and their diagonalization by the 2-D DFT.
//!
//! Everything here uses periodic (wrap-around) boundaries, which makes both
//! the blur and the difference operators circulant and therefore exactly
//! diagonal in the Fourier basis — the property the solver's direct linear
//! step relies on.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::types::{BlurKernel, GradientField, Raster};

/// DFT eigenvalues of the blur and of the two difference operators on a
/// fixed grid.
#[derive(Debug, Clone)]
pub struct FourierSymbols {
    width: usize,
    height: usize,
    sym_k: Vec<Complex64>,
    sym_dh: Vec<Complex64>,
    sym_dv: Vec<Complex64>,
}

impl FourierSymbols {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn sym_k(&self) -> &[Complex64] {
        &self.sym_k
    }

    pub fn sym_dh(&self) -> &[Complex64] {
        &self.sym_dh
    }

    pub fn sym_dv(&self) -> &[Complex64] {
        &self.sym_dv
    }
}

/// Forward differences with periodic wrap:
/// `dh(r,c) = u(r, c+1 mod W) - u(r,c)`, `dv(r,c) = u(r+1 mod H, c) - u(r,c)`.
pub fn gradient(u: &Raster) -> GradientField {
    let (w, h) = (u.width(), u.height());
    let px = u.pixels();
    let mut dh = vec![0.0; w * h];
    let mut dv = vec![0.0; w * h];
    for r in 0..h {
        let next_r = if r + 1 == h { 0 } else { r + 1 };
        for c in 0..w {
            let next_c = if c + 1 == w { 0 } else { c + 1 };
            let i = r * w + c;
            dh[i] = px[r * w + next_c] - px[i];
            dv[i] = px[next_r * w + c] - px[i];
        }
    }
    GradientField::from_raw(w, h, dh, dv)
}

/// Exact matrix adjoint of [`gradient`], i.e. the negative periodic
/// divergence:
/// `(D^T p)(r,c) = ph(r, c-1) - ph(r,c) + pv(r-1, c) - pv(r,c)` with wrap.
pub fn gradient_adjoint(p: &GradientField) -> Raster {
    let (w, h) = (p.width(), p.height());
    let (dh, dv) = (p.dh(), p.dv());
    let mut out = vec![0.0; w * h];
    for r in 0..h {
        let prev_r = if r == 0 { h - 1 } else { r - 1 };
        for c in 0..w {
            let prev_c = if c == 0 { w - 1 } else { c - 1 };
            let i = r * w + c;
            out[i] = dh[r * w + prev_c] - dh[i] + dv[prev_r * w + c] - dv[i];
        }
    }
    Raster::from_raw(w, h, out)
}

/// Circular 2-D convolution with the kernel centered at its midpoint.
pub fn convolve(u: &Raster, kernel: &BlurKernel) -> Result<Raster> {
    let (w, h) = (u.width(), u.height());
    if kernel.size() > w.min(h) {
        return Err(Error::argument(format!(
            "kernel size {} exceeds image dimensions {w}x{h}",
            kernel.size()
        )));
    }
    let half = kernel.half() as isize;
    let px = u.pixels();
    let mut out = vec![0.0; w * h];
    for r in 0..h as isize {
        for c in 0..w as isize {
            let mut acc = 0.0;
            for dy in -half..=half {
                let rr = (r - dy).rem_euclid(h as isize) as usize;
                let krow = (dy + half) as usize;
                for dx in -half..=half {
                    let cc = (c - dx).rem_euclid(w as isize) as usize;
                    acc += kernel.weight(krow, (dx + half) as usize) * px[rr * w + cc];
                }
            }
            out[(r as usize) * w + c as usize] = acc;
        }
    }
    Ok(Raster::from_raw(w, h, out))
}

/// Builds the DFT eigenvalues of the blur and difference operators.
///
/// The kernel is zero-embedded into the grid and circularly shifted so its
/// center lands on index `(0, 0)`; the difference stencils are embedded the
/// same way. The DFT of those embeddings gives the operators' eigenvalues.
pub fn build_symbols(kernel: &BlurKernel, width: usize, height: usize) -> Result<FourierSymbols> {
    if kernel.size() > width.min(height) {
        return Err(Error::argument(format!(
            "kernel size {} exceeds grid dimensions {width}x{height}",
            kernel.size()
        )));
    }
    let n = width * height;
    let half = kernel.half() as isize;
    let fft = Fft2::new(width, height);

    let mut embedded = vec![0.0; n];
    for dy in -half..=half {
        let r = dy.rem_euclid(height as isize) as usize;
        for dx in -half..=half {
            let c = dx.rem_euclid(width as isize) as usize;
            embedded[r * width + c] +=
                kernel.weight((dy + half) as usize, (dx + half) as usize);
        }
    }
    let sym_k = fft.forward_real(&embedded);

    // Forward difference u(c+1) - u(c) as a circular convolution stencil:
    // weight +1 at offset -1 (wrapped) and -1 at offset 0.
    let mut stencil_h = vec![0.0; n];
    stencil_h[0] -= 1.0;
    stencil_h[width - 1] += 1.0;
    let sym_dh = fft.forward_real(&stencil_h);

    let mut stencil_v = vec![0.0; n];
    stencil_v[0] -= 1.0;
    stencil_v[(height - 1) * width] += 1.0;
    let sym_dv = fft.forward_real(&stencil_v);

    Ok(FourierSymbols {
        width,
        height,
        sym_k,
        sym_dh,
        sym_dv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raster(width: usize, height: usize, data: &[f64]) -> Raster {
        Raster::new(width, height, data.to_vec()).unwrap()
    }

    fn pseudo(seq: &mut u64) -> f64 {
        // Small deterministic generator for test fixtures.
        *seq = seq.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seq >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn random_raster(width: usize, height: usize, seq: &mut u64) -> Raster {
        let data: Vec<f64> = (0..width * height).map(|_| pseudo(seq) * 100.0).collect();
        raster(width, height, &data)
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let u = Raster::filled(5, 4, 3.25).unwrap();
        let g = gradient(&u);
        assert!(g.dh().iter().all(|&v| v == 0.0));
        assert!(g.dv().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_single_row_wraps() {
        let u = raster(3, 1, &[1.0, 2.0, 4.0]);
        let g = gradient(&u);
        assert_eq!(g.dh(), &[1.0, 2.0, -3.0]);
        assert_eq!(g.dv(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn gradient_two_by_two() {
        let u = raster(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let g = gradient(&u);
        assert_eq!(g.dh(), &[-1.0, 1.0, 0.0, 0.0]);
        assert_eq!(g.dv(), &[-1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn adjoint_of_zero_field_is_zero() {
        let p = GradientField::new(3, 3, vec![0.0; 9], vec![0.0; 9]).unwrap();
        let r = gradient_adjoint(&p);
        assert!(r.pixels().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn adjoint_identity_on_random_grid() {
        let mut seq = 99u64;
        let u = random_raster(5, 7, &mut seq);
        let ph: Vec<f64> = (0..35).map(|_| pseudo(&mut seq)).collect();
        let pv: Vec<f64> = (0..35).map(|_| pseudo(&mut seq)).collect();
        let p = GradientField::new(5, 7, ph, pv).unwrap();

        let du = gradient(&u);
        let dtp = gradient_adjoint(&p);
        let lhs: f64 = du
            .dh()
            .iter()
            .zip(p.dh())
            .chain(du.dv().iter().zip(p.dv()))
            .map(|(a, b)| a * b)
            .sum();
        let rhs: f64 = u.pixels().iter().zip(dtp.pixels()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn adjoint_matches_explicit_transpose_on_two_by_two() {
        // Build the 8x4 matrix of D = [Dh; Dv] column by column, transpose it,
        // and apply it to the given field.
        let n = 4;
        let mut d = vec![vec![0.0; n]; 2 * n];
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let g = gradient(&raster(2, 2, &e));
            for i in 0..n {
                d[i][j] = g.dh()[i];
                d[n + i][j] = g.dv()[i];
            }
        }
        let ph = [-1.0, 1.0, 0.0, 0.0];
        let pv = [-1.0, 0.0, 1.0, 0.0];
        let stacked: Vec<f64> = ph.iter().chain(pv.iter()).copied().collect();
        let mut expected = vec![0.0; n];
        for j in 0..n {
            for i in 0..2 * n {
                expected[j] += d[i][j] * stacked[i];
            }
        }

        let field = GradientField::new(2, 2, ph.to_vec(), pv.to_vec()).unwrap();
        let got = gradient_adjoint(&field);
        for (a, b) in got.pixels().iter().zip(expected.iter()) {
            assert!((a - b).abs() <= 1e-12);
        }

        // And the inner products agree for u = [[1,0],[0,0]].
        let u = raster(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let du = gradient(&u);
        let lhs: f64 = du
            .dh()
            .iter()
            .zip(ph.iter())
            .chain(du.dv().iter().zip(pv.iter()))
            .map(|(a, b)| a * b)
            .sum();
        let rhs: f64 = u.pixels().iter().zip(got.pixels()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn convolve_preserves_constants() {
        let kernel = crate::degradation::gaussian_kernel(3, 1.0).unwrap();
        let u = Raster::filled(6, 5, 42.0).unwrap();
        let out = convolve(&u, &kernel).unwrap();
        for &v in out.pixels() {
            assert!((v - 42.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn convolve_places_kernel_around_delta() {
        let kernel = crate::degradation::gaussian_kernel(3, 0.8).unwrap();
        let mut u = Raster::filled(5, 5, 0.0).unwrap();
        u.set(0, 0, 1.0); // corner pixel exercises the wrap
        let out = convolve(&u, &kernel).unwrap();
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let r = dy.rem_euclid(5) as usize;
                let c = dx.rem_euclid(5) as usize;
                let expected = kernel.weight((dy + 1) as usize, (dx + 1) as usize);
                assert!((out.get(r, c) - expected).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn convolve_rejects_oversized_kernel() {
        let kernel = crate::degradation::gaussian_kernel(9, 2.0).unwrap();
        let u = Raster::filled(8, 8, 0.0).unwrap();
        assert!(convolve(&u, &kernel).is_err());
        assert!(build_symbols(&kernel, 8, 8).is_err());
    }

    #[test]
    fn convolve_matches_dense_circulant_oracle() {
        let kernel = crate::degradation::gaussian_kernel(3, 1.0).unwrap();
        let mut seq = 4u64;
        let u = random_raster(8, 8, &mut seq);
        let n = 64;

        // Dense circulant matrix assembled column by column from unit pulses.
        let mut k_mat = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = convolve(&raster(8, 8, &e), &kernel).unwrap();
            for i in 0..n {
                k_mat[i][j] = col.pixels()[i];
            }
        }
        // The oracle multiplies by hand with a different summation order.
        let mut expected = vec![0.0; n];
        for i in (0..n).rev() {
            expected[i] = (0..n).map(|j| k_mat[i][j] * u.pixels()[j]).sum();
        }
        let got = convolve(&u, &kernel).unwrap();
        for (a, b) in got.pixels().iter().zip(expected.iter()) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn identity_kernel_symbol_is_one() {
        let kernel = BlurKernel::new(1, 1.0, vec![1.0]).unwrap();
        let sym = build_symbols(&kernel, 4, 4).unwrap();
        for z in sym.sym_k() {
            assert!((z.re - 1.0).abs() <= 1e-12 && z.im.abs() <= 1e-12);
        }
    }

    #[test]
    fn zero_frequency_values() {
        let kernel = crate::degradation::gaussian_kernel(9, 2.0).unwrap();
        let sym = build_symbols(&kernel, 16, 12).unwrap();
        assert!((sym.sym_k()[0].re - 1.0).abs() <= 1e-12);
        assert!(sym.sym_k()[0].im.abs() <= 1e-12);
        assert!(sym.sym_dh()[0].norm() <= 1e-12);
        assert!(sym.sym_dv()[0].norm() <= 1e-12);
    }

    #[test]
    fn symmetric_kernel_has_real_symbol() {
        let kernel = crate::degradation::gaussian_kernel(9, 2.0).unwrap();
        let sym = build_symbols(&kernel, 16, 16).unwrap();
        let max_im = sym.sym_k().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        assert!(max_im <= 1e-10, "max imaginary part {max_im}");
    }

    #[test]
    fn symbols_reproduce_spatial_operators() {
        let kernel = crate::degradation::gaussian_kernel(3, 1.2).unwrap();
        let (w, h) = (8, 8);
        let mut seq = 17u64;
        let u = random_raster(w, h, &mut seq);
        let sym = build_symbols(&kernel, w, h).unwrap();
        let fft = Fft2::new(w, h);
        let spec = fft.forward_real(u.pixels());

        let apply = |s: &[Complex64]| {
            let prod: Vec<_> = spec.iter().zip(s.iter()).map(|(a, b)| a * b).collect();
            fft.inverse_real(prod)
        };

        let conv_fft = apply(sym.sym_k());
        let conv_direct = convolve(&u, &kernel).unwrap();
        for (a, b) in conv_fft.iter().zip(conv_direct.pixels()) {
            assert!((a - b).abs() <= 1e-10);
        }

        let grad = gradient(&u);
        let dh_fft = apply(sym.sym_dh());
        let dv_fft = apply(sym.sym_dv());
        for i in 0..w * h {
            assert!((dh_fft[i] - grad.dh()[i]).abs() <= 1e-10);
            assert!((dv_fft[i] - grad.dv()[i]).abs() <= 1e-10);
        }
    }
}
