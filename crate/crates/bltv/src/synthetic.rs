//! Deterministic synthetic test images.
//!
//! The restoration experiments need ground-truth images; these generators
//! produce the two kinds used throughout the tests and examples: a
//! piecewise-constant arrangement of shapes and an oriented stripe pattern.

use crate::types::Raster;

/// Piecewise-constant image: two overlapping rectangles and a disk on a
/// dark background, with intensities spread over the `[0, 255]` range.
pub fn piecewise_shapes(width: usize, height: usize) -> Raster {
    let mut data = vec![40.0; width * height];
    let set = |data: &mut Vec<f64>, r: usize, c: usize, v: f64| data[r * width + c] = v;

    for r in height / 8..height * 5 / 8 {
        for c in width / 6..width / 2 {
            set(&mut data, r, c, 210.0);
        }
    }
    for r in height * 2 / 5..height * 7 / 8 {
        for c in width / 3..width * 3 / 4 {
            set(&mut data, r, c, 120.0);
        }
    }
    let (cr, cc) = (height as f64 * 0.3, width as f64 * 0.72);
    let radius = (width.min(height) as f64) * 0.16;
    for r in 0..height {
        for c in 0..width {
            let dr = r as f64 - cr;
            let dc = c as f64 - cc;
            if dr * dr + dc * dc <= radius * radius {
                set(&mut data, r, c, 180.0);
            }
        }
    }
    Raster::from_raw(width, height, data)
}

/// Sinusoidal stripe pattern with wavefronts orthogonal to the integer
/// direction `(a, b)`: pixel `(r, c)` carries
/// `low + (high - low) (1 + sin(2 pi ((a c + b r) mod period) / period)) / 2`.
///
/// A smooth profile keeps the discrete gradients collinear with the true
/// stripe normal, which binary stripes lose to staircase artifacts. The
/// pattern tiles the periodic image domain exactly whenever `a * width`
/// and `b * height` are multiples of `period`, keeping the wrap-around
/// boundaries artifact-free.
pub fn oriented_stripes(
    width: usize,
    height: usize,
    a: i64,
    b: i64,
    period: i64,
    low: f64,
    high: f64,
) -> Raster {
    assert!(period >= 2, "stripe period must be at least 2");
    let mut data = vec![low; width * height];
    let omega = 2.0 * std::f64::consts::PI / period as f64;
    for r in 0..height {
        for c in 0..width {
            // Reducing the integer phase first makes equal phases give
            // bitwise-equal samples, so the pattern tiles exactly.
            let phase = (a * c as i64 + b * r as i64).rem_euclid(period);
            let s = 0.5 + 0.5 * (omega * phase as f64).sin();
            data[r * width + c] = low + (high - low) * s;
        }
    }
    Raster::from_raw(width, height, data)
}
