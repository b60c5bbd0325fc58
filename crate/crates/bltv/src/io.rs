//! File formats: PFM float maps, PGM/PNG 8-bit images, JSON metadata
//! sidecars, and the CSV reports.
//!
//! PFM ("Pf", one channel) is the interchange format for full-precision
//! rasters and parameter maps. Samples are 32-bit IEEE floats stored
//! bottom row first; the scale line's sign encodes endianness and files are
//! written little-endian (scale `-1.0`). Reading widens the stored floats
//! to `f64` exactly, so `write(read(file))` reproduces the file and
//! `read(write(raster))` is bit-exact whenever the raster's values are
//! representable in `f32` (true for everything this crate writes).

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::IterationReport;
use crate::types::Raster;

// ---------------------------------------------------------------------------
// PFM

pub fn write_pfm(path: &Path, raster: &Raster) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "Pf\n{} {}\n-1.0\n", raster.width(), raster.height())?;
    let (w, h) = (raster.width(), raster.height());
    for r in (0..h).rev() {
        for c in 0..w {
            let v = raster.get(r, c) as f32;
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_pfm(path: &Path) -> Result<Raster> {
    let mut file = BufReader::new(File::open(path)?);

    // Header: three whitespace-separated tokens ("Pf", "W H", scale).
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        let token = read_token(&mut file)?;
        if token.is_empty() {
            return Err(Error::Format("truncated PFM header".to_string()));
        }
        tokens.push(token);
    }
    if tokens[0] != "Pf" {
        return Err(Error::Format(format!(
            "expected grayscale PFM magic 'Pf', got '{}'",
            tokens[0]
        )));
    }
    let width: usize = tokens[1]
        .parse()
        .map_err(|_| Error::Format("bad PFM width".to_string()))?;
    let height: usize = tokens[2]
        .parse()
        .map_err(|_| Error::Format("bad PFM height".to_string()))?;
    let scale: f64 = tokens[3]
        .parse()
        .map_err(|_| Error::Format("bad PFM scale".to_string()))?;
    if width == 0 || height == 0 {
        return Err(Error::Format("PFM dimensions must be positive".to_string()));
    }
    let little_endian = scale < 0.0;

    let mut bytes = vec![0u8; width * height * 4];
    file.read_exact(&mut bytes)
        .map_err(|_| Error::Format("PFM payload shorter than header promises".to_string()))?;

    let mut data = vec![0.0f64; width * height];
    for r in 0..height {
        for c in 0..width {
            let i = (r * width + c) * 4;
            let raw = [bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]];
            let v = if little_endian {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            };
            // Rows are stored bottom-up.
            data[(height - 1 - r) * width + c] = v as f64;
        }
    }
    Raster::new(width, height, data).map_err(|e| Error::Format(e.to_string()))
}

/// Reads one whitespace-delimited token, skipping leading whitespace.
fn read_token<R: BufRead>(reader: &mut R) -> Result<String> {
    let mut token = String::new();
    let mut byte = [0u8; 1];
    loop {
        let n = reader.read(&mut byte)?;
        if n == 0 {
            return Ok(token);
        }
        let ch = byte[0];
        if ch.is_ascii_whitespace() {
            if token.is_empty() {
                continue;
            }
            return Ok(token);
        }
        token.push(ch as char);
    }
}

// ---------------------------------------------------------------------------
// PGM (P5, maxval 255)

pub fn write_pgm(path: &Path, raster: &Raster) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{} {}\n255\n", raster.width(), raster.height())?;
    let bytes: Vec<u8> = raster.pixels().iter().map(|&v| clip_to_u8(v)).collect();
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

pub fn read_pgm(path: &Path) -> Result<Raster> {
    let mut file = BufReader::new(File::open(path)?);
    let magic = read_pnm_token(&mut file)?;
    if magic != "P5" {
        return Err(Error::Format(format!(
            "expected binary PGM magic 'P5', got '{magic}'"
        )));
    }
    let width: usize = read_pnm_token(&mut file)?
        .parse()
        .map_err(|_| Error::Format("bad PGM width".to_string()))?;
    let height: usize = read_pnm_token(&mut file)?
        .parse()
        .map_err(|_| Error::Format("bad PGM height".to_string()))?;
    let maxval: usize = read_pnm_token(&mut file)?
        .parse()
        .map_err(|_| Error::Format("bad PGM maxval".to_string()))?;
    if maxval != 255 {
        return Err(Error::Format(format!(
            "only 8-bit PGM (maxval 255) is supported, got {maxval}"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::Format("PGM dimensions must be positive".to_string()));
    }
    let mut bytes = vec![0u8; width * height];
    file.read_exact(&mut bytes)
        .map_err(|_| Error::Format("PGM payload shorter than header promises".to_string()))?;
    let data: Vec<f64> = bytes.iter().map(|&b| b as f64).collect();
    Raster::new(width, height, data).map_err(|e| Error::Format(e.to_string()))
}

/// PNM token reader: skips whitespace and `#` comment lines.
fn read_pnm_token<R: BufRead>(reader: &mut R) -> Result<String> {
    let mut token = String::new();
    let mut byte = [0u8; 1];
    let mut in_comment = false;
    loop {
        let n = reader.read(&mut byte)?;
        if n == 0 {
            if token.is_empty() {
                return Err(Error::Format("truncated PNM header".to_string()));
            }
            return Ok(token);
        }
        let ch = byte[0];
        if in_comment {
            if ch == b'\n' {
                in_comment = false;
            }
            continue;
        }
        if ch == b'#' && token.is_empty() {
            in_comment = true;
            continue;
        }
        if ch.is_ascii_whitespace() {
            if token.is_empty() {
                continue;
            }
            return Ok(token);
        }
        token.push(ch as char);
    }
}

// ---------------------------------------------------------------------------
// PNG (8-bit grayscale)

pub fn read_png(path: &Path) -> Result<Raster> {
    let img = image::open(path).map_err(|e| Error::Format(format!("PNG decode: {e}")))?;
    match img {
        image::DynamicImage::ImageLuma8(gray) => {
            let (w, h) = (gray.width() as usize, gray.height() as usize);
            let data: Vec<f64> = gray.into_raw().iter().map(|&b| b as f64).collect();
            Raster::new(w, h, data).map_err(|e| Error::Format(e.to_string()))
        }
        _ => Err(Error::Format(
            "only 8-bit grayscale PNG inputs are supported".to_string(),
        )),
    }
}

fn save_png(path: &Path, width: usize, height: usize, bytes: Vec<u8>) -> Result<()> {
    let buf = image::GrayImage::from_raw(width as u32, height as u32, bytes)
        .expect("buffer length matches dimensions");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Format(format!("PNG encode: {e}")))
}

/// 8-bit preview of an image on the nominal intensity scale: values are
/// clipped to `[0, 255]` and rounded.
pub fn write_png_clipped(path: &Path, raster: &Raster) -> Result<()> {
    let bytes: Vec<u8> = raster.pixels().iter().map(|&v| clip_to_u8(v)).collect();
    save_png(path, raster.width(), raster.height(), bytes)
}

/// 8-bit preview of an arbitrary-range map, min-max normalized; a constant
/// map renders as black.
pub fn write_png_minmax(path: &Path, raster: &Raster) -> Result<()> {
    let min = raster.pixels().iter().cloned().fold(f64::INFINITY, f64::min);
    let max = raster.pixels().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    let bytes: Vec<u8> = raster
        .pixels()
        .iter()
        .map(|&v| {
            if span > 0.0 {
                ((v - min) / span * 255.0).round() as u8
            } else {
                0
            }
        })
        .collect();
    save_png(path, raster.width(), raster.height(), bytes)
}

fn clip_to_u8(v: f64) -> u8 {
    v.clamp(0.0, 255.0).round() as u8
}

/// Reads an image by extension: `.pgm`, `.png` or `.pfm`.
pub fn read_auto(path: &Path) -> Result<Raster> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("pgm") => read_pgm(path),
        Some("png") => read_png(path),
        Some("pfm") => read_pfm(path),
        other => Err(Error::Format(format!(
            "unsupported image extension {:?} (expected pgm, png or pfm)",
            other
        ))),
    }
}

// ---------------------------------------------------------------------------
// Metadata sidecar

/// JSON sidecar describing how an observation was produced, so a later
/// restoration run knows the blur kernel and noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub width: usize,
    pub height: usize,
    pub kernel_size: usize,
    pub kernel_sigma: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solver: Option<SolverSettings>,
}

/// Solver settings echoed into the sidecar of a restoration output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub model: String,
    pub beta_t: f64,
    pub beta_w: f64,
    pub tau: f64,
    pub sigma: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub update_every: usize,
    pub radius: usize,
    pub theta_grid: usize,
}

pub fn write_sidecar(path: &Path, sidecar: &Sidecar) -> Result<()> {
    let json = serde_json::to_string_pretty(sidecar)
        .map_err(|e| Error::Format(format!("sidecar encode: {e}")))?;
    let mut out = File::create(path)?;
    out.write_all(json.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("sidecar decode: {e}")))
}

// ---------------------------------------------------------------------------
// CSV reports

/// Streaming per-iteration CSV log with a fixed header.
pub struct IterationLog {
    out: BufWriter<File>,
}

impl IterationLog {
    pub fn create(path: &Path) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "k,delta,mu,primal_res_t,primal_res_w,objective")?;
        Ok(IterationLog { out })
    }

    pub fn write(&mut self, report: &IterationReport) -> Result<()> {
        writeln!(
            self.out,
            "{},{},{},{},{},{}",
            report.k,
            report.delta,
            report.mu,
            report.primal_res_t,
            report.primal_res_w,
            report.objective
        )?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Appends one evaluation row, creating the file (with header) on first use.
pub fn append_evaluation(
    path: &Path,
    id: &str,
    model: &str,
    sigma: f64,
    isnr_db: f64,
    ssim: f64,
) -> Result<()> {
    let new_file = !path.exists();
    let mut out = OpenOptions::new().create(true).append(true).open(path)?;
    if new_file {
        writeln!(out, "id,model,sigma,isnr_db,ssim")?;
    }
    writeln!(out, "{id},{model},{sigma},{isnr_db},{ssim}")?;
    Ok(())
}
