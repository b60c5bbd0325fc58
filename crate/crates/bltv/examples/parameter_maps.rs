//! Estimate per-pixel (lambda1, lambda2, theta) maps on an oriented image
//! and write min-max-normalized previews.
//!
//! Outputs land in ./bltv-example-out/.

use std::fs;
use std::path::PathBuf;

use bltv::degradation::{degrade, gaussian_kernel, NoiseSpec};
use bltv::io;
use bltv::map_estimation::{estimate_maps, EstimationConfig};
use bltv::synthetic;
use bltv::Raster;

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

fn main() -> bltv::Result<()> {
    let out_dir = PathBuf::from("bltv-example-out");
    fs::create_dir_all(&out_dir)?;

    let truth = synthetic::oriented_stripes(128, 128, 1, 2, 16, 0.0, 255.0);
    let kernel = gaussian_kernel(9, 2.0)?;
    let g = degrade(&truth, &kernel, &NoiseSpec::new(10.0, 3)?)?;

    let cfg = EstimationConfig::default();
    for (name, image) in [("clean", &truth), ("degraded", &g)] {
        let maps = estimate_maps(image, &cfg)?;
        let ratios: Vec<f64> = (0..maps.len())
            .map(|i| {
                let (l1, l2, _) = maps.at(i);
                l1.max(l2) / l1.min(l2)
            })
            .collect();
        println!(
            "{name:<9}: median lambda1 {:.4}, lambda2 {:.4}, anisotropy ratio {:.2}, theta {:.3} rad",
            median(maps.lambda1()),
            median(maps.lambda2()),
            median(&ratios),
            median(maps.theta()),
        );

        for (suffix, data) in [
            ("lambda1", maps.lambda1()),
            ("lambda2", maps.lambda2()),
            ("theta", maps.theta()),
        ] {
            let raster = Raster::new(image.width(), image.height(), data.to_vec())?;
            io::write_pfm(&out_dir.join(format!("{name}_{suffix}.pfm")), &raster)?;
            io::write_png_minmax(&out_dir.join(format!("{name}_{suffix}.png")), &raster)?;
        }
    }
    println!("map previews written to {}", out_dir.display());
    Ok(())
}
