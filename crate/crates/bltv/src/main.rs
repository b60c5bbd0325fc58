//! Command-line pipeline around the `bltv` library: synthesize observations,
//! estimate parameter maps, run restorations, and evaluate results.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use bltv::error::Error;
use bltv::io::{self, Sidecar, SolverSettings};
use bltv::solver::{Model, SolverConfig};
use bltv::{degradation, map_estimation, metrics, synthetic};

#[derive(Parser)]
#[command(
    name = "bltv",
    version,
    about = "Space-variant anisotropic TV image restoration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Blur an 8-bit image and add seeded Gaussian noise.
    Degrade(DegradeArgs),
    /// Estimate per-pixel (lambda1, lambda2, theta) maps from an image.
    Estimate(EstimateArgs),
    /// Restore a degraded image with the TV or BLTV model.
    Restore(RestoreArgs),
    /// Append an ISNR/SSIM row for a restoration to a CSV report.
    Evaluate(EvaluateArgs),
    /// Draw samples from a bivariate Laplacian into a CSV file.
    SampleBld(SampleBldArgs),
    /// Generate a synthetic ground-truth image.
    Synth(SynthArgs),
}

#[derive(Args)]
struct DegradeArgs {
    /// Input image (PGM P5 or 8-bit grayscale PNG).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output prefix; writes <out>.pfm, <out>.png and <out>.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 9)]
    blur_size: usize,
    #[arg(long, default_value_t = 2.0)]
    blur_sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EstimateArgs {
    /// Input image (PFM, PGM or PNG).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output prefix; writes <out>_{lambda1,lambda2,theta}.{pfm,png}.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 8)]
    radius: usize,
    #[arg(long, default_value_t = 90)]
    theta_grid: usize,
    #[arg(long, default_value_t = 1e-4)]
    lambda_min: f64,
    #[arg(long, default_value_t = 1e4)]
    lambda_max: f64,
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Tv,
    Bltv,
}

#[derive(Args)]
struct RestoreArgs {
    /// Degraded image (PFM, PGM or PNG).
    #[arg(long = "in")]
    input: PathBuf,
    /// Metadata sidecar written by `degrade`; supplies kernel and noise
    /// parameters unless overridden below.
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Output prefix; writes <out>.pfm, <out>.png, <out>_iters.csv,
    /// <out>.json and (BLTV) <out>_{lambda1,lambda2,theta}.pfm.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelArg::Bltv)]
    model: ModelArg,
    /// Noise standard deviation; defaults to the sidecar's value.
    #[arg(long)]
    sigma: Option<f64>,
    /// Blur kernel size; defaults to the sidecar's value.
    #[arg(long)]
    blur_size: Option<usize>,
    /// Blur kernel sigma; defaults to the sidecar's value.
    #[arg(long)]
    blur_sigma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    beta_t: f64,
    #[arg(long, default_value_t = 1.0)]
    beta_w: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 1500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Map refresh period in iterations; 0 freezes the initial maps.
    #[arg(long, default_value_t = 300)]
    update_every: usize,
    #[arg(long, default_value_t = 8)]
    radius: usize,
    #[arg(long, default_value_t = 90)]
    theta_grid: usize,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    restored: PathBuf,
    #[arg(long)]
    observed: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// CSV report to append to (created with a header if missing).
    #[arg(long)]
    out: PathBuf,
    /// Experiment identifier; defaults to the restored file stem.
    #[arg(long)]
    id: Option<String>,
    #[arg(long, default_value = "unknown")]
    model: String,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
}

#[derive(Args)]
struct SampleBldArgs {
    #[arg(long, default_value_t = 1.0)]
    lambda1: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda2: f64,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, short = 'n', default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Two-column CSV of samples.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SynthKind {
    Shapes,
    Stripes,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value_t = SynthKind::Shapes)]
    kind: SynthKind,
    #[arg(long, default_value_t = 128)]
    width: usize,
    #[arg(long, default_value_t = 128)]
    height: usize,
    /// Stripe period in pixels (stripes only).
    #[arg(long, default_value_t = 16)]
    period: i64,
    /// Output image (.pgm or .png).
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // Help goes to stdout, errors to stderr; clap's print handles it.
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Argument(_) | Error::Dimension(_) => 1,
                Error::Io(_) | Error::Format(_) => 2,
                Error::Numerical(_) => 3,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Degrade(args) => cmd_degrade(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Restore(args) => cmd_restore(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::SampleBld(args) => cmd_sample_bld(args),
        Command::Synth(args) => cmd_synth(args),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    prefix.with_file_name(name)
}

fn read_8bit_input(path: &Path) -> Result<bltv::Raster, Error> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("pgm") => io::read_pgm(path),
        Some("png") => io::read_png(path),
        _ => Err(Error::Format(
            "degrade expects an 8-bit PGM or PNG input".to_string(),
        )),
    }
}

fn cmd_degrade(args: DegradeArgs) -> Result<(), Error> {
    let truth = read_8bit_input(&args.input)?;
    let kernel = degradation::gaussian_kernel(args.blur_size, args.blur_sigma)?;
    let noise = degradation::NoiseSpec::new(args.noise_sigma, args.seed)?;
    let observed = degradation::degrade(&truth, &kernel, &noise)?;

    io::write_pfm(&with_suffix(&args.out, ".pfm"), &observed)?;
    io::write_png_clipped(&with_suffix(&args.out, ".png"), &observed)?;
    io::write_sidecar(
        &with_suffix(&args.out, ".json"),
        &Sidecar {
            width: observed.width(),
            height: observed.height(),
            kernel_size: args.blur_size,
            kernel_sigma: args.blur_sigma,
            noise_sigma: args.noise_sigma,
            seed: args.seed,
            solver: None,
        },
    )?;
    Ok(())
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), Error> {
    let image = io::read_auto(&args.input)?;
    let cfg = map_estimation::EstimationConfig {
        radius: args.radius,
        grid_size: args.theta_grid,
        lambda_min: args.lambda_min,
        lambda_max: args.lambda_max,
        eps: args.eps,
    };
    let maps = map_estimation::estimate_maps(&image, &cfg)?;
    write_maps(&args.out, &image, &maps)
}

fn write_maps(
    prefix: &Path,
    image: &bltv::Raster,
    maps: &bltv::ParameterMaps,
) -> Result<(), Error> {
    let (w, h) = (image.width(), image.height());
    for (name, data) in [
        ("_lambda1", maps.lambda1()),
        ("_lambda2", maps.lambda2()),
        ("_theta", maps.theta()),
    ] {
        let raster = bltv::Raster::new(w, h, data.to_vec())?;
        io::write_pfm(&with_suffix(prefix, &format!("{name}.pfm")), &raster)?;
        io::write_png_minmax(&with_suffix(prefix, &format!("{name}.png")), &raster)?;
    }
    Ok(())
}

fn cmd_restore(args: RestoreArgs) -> Result<(), Error> {
    let observed = io::read_auto(&args.input)?;
    let meta = match &args.meta {
        Some(path) => Some(io::read_sidecar(path)?),
        None => None,
    };
    let kernel_size = args
        .blur_size
        .or_else(|| meta.as_ref().map(|m| m.kernel_size))
        .ok_or_else(|| Error::Argument("--blur-size required without --meta".to_string()))?;
    let kernel_sigma = args
        .blur_sigma
        .or_else(|| meta.as_ref().map(|m| m.kernel_sigma))
        .ok_or_else(|| Error::Argument("--blur-sigma required without --meta".to_string()))?;
    let sigma = args
        .sigma
        .or_else(|| meta.as_ref().map(|m| m.noise_sigma))
        .ok_or_else(|| Error::Argument("--sigma required without --meta".to_string()))?;

    let kernel = degradation::gaussian_kernel(kernel_size, kernel_sigma)?;
    let model = match args.model {
        ModelArg::Tv => Model::Tv,
        ModelArg::Bltv => Model::Bltv,
    };
    let cfg = SolverConfig {
        model,
        beta_t: args.beta_t,
        beta_w: args.beta_w,
        tau: args.tau,
        sigma,
        max_iter: args.max_iter,
        tol: args.tol,
        map_refresh_every: args.update_every,
        fixed_mu: None,
        estimation: map_estimation::EstimationConfig {
            radius: args.radius,
            grid_size: args.theta_grid,
            ..map_estimation::EstimationConfig::default()
        },
    };

    let mut log = io::IterationLog::create(&with_suffix(&args.out, "_iters.csv"))?;
    let mut log_err = None;
    let restoration = bltv::solver::solve_with(&observed, &kernel, &cfg, |report| {
        if log_err.is_none() {
            if let Err(e) = log.write(report) {
                log_err = Some(e);
            }
        }
    })?;
    if let Some(e) = log_err {
        return Err(e);
    }
    log.finish()?;

    io::write_pfm(&with_suffix(&args.out, ".pfm"), &restoration.image)?;
    io::write_png_clipped(&with_suffix(&args.out, ".png"), &restoration.image)?;
    if model == Model::Bltv {
        write_maps(&args.out, &restoration.image, &restoration.maps)?;
    }
    io::write_sidecar(
        &with_suffix(&args.out, ".json"),
        &Sidecar {
            width: observed.width(),
            height: observed.height(),
            kernel_size,
            kernel_sigma,
            noise_sigma: sigma,
            seed: meta.as_ref().map(|m| m.seed).unwrap_or(0),
            solver: Some(SolverSettings {
                model: match model {
                    Model::Tv => "tv".to_string(),
                    Model::Bltv => "bltv".to_string(),
                },
                beta_t: args.beta_t,
                beta_w: args.beta_w,
                tau: args.tau,
                sigma,
                max_iter: args.max_iter,
                tol: args.tol,
                update_every: args.update_every,
                radius: args.radius,
                theta_grid: args.theta_grid,
            }),
        },
    )?;
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), Error> {
    let restored = io::read_auto(&args.restored)?;
    let observed = io::read_auto(&args.observed)?;
    let truth = io::read_auto(&args.truth)?;
    let isnr_db = metrics::isnr(&restored, &observed, &truth)?;
    let ssim = metrics::ssim(&restored, &truth, &metrics::SsimConfig::default())?;
    let id = args.id.unwrap_or_else(|| {
        args.restored
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".to_string())
    });
    io::append_evaluation(&args.out, &id, &args.model, args.sigma, isnr_db, ssim)?;
    println!("{id},{},{},{isnr_db},{ssim}", args.model, args.sigma);
    Ok(())
}

fn cmd_sample_bld(args: SampleBldArgs) -> Result<(), Error> {
    let params = bltv::BldParams::new(args.lambda1, args.lambda2, args.theta)?;
    let samples = bltv::bld::sample_bld(&params, args.n, args.seed)?;
    let mut text = String::from("s1,s2\n");
    for s in samples.samples() {
        text.push_str(&format!("{},{}\n", s[0], s[1]));
    }
    std::fs::write(&args.out, text)?;
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), Error> {
    let image = match args.kind {
        SynthKind::Shapes => synthetic::piecewise_shapes(args.width, args.height),
        SynthKind::Stripes => {
            synthetic::oriented_stripes(args.width, args.height, 1, 2, args.period, 0.0, 255.0)
        }
    };
    match args
        .out
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("pgm") => io::write_pgm(&args.out, &image),
        Some("png") => io::write_png_clipped(&args.out, &image),
        _ => Err(Error::Argument(
            "synth output must end in .pgm or .png".to_string(),
        )),
    }
}
