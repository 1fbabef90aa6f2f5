use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use transnum_cli::config::{Command, OutputFormat, Overrides, RunConfig};
use transnum_cli::{output, run, CliError, Status};

/// Translation numbers, Gal–Kędra cocycles, undistortion certificates and
/// Seifert homomorphisms.
#[derive(Parser)]
#[command(name = "transnum", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    max_iterations: Option<usize>,
    /// Quadrature points per axis, or seminorm grid resolution.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Write the rendered output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Local translation number at a point.
    RotLocal,
    /// Mean translation number against an invariant measure.
    RotMean,
    /// Homological translation of an isotopy, compared with the endpoint's translation number.
    RotHomovec,
    /// Evaluate the Gal–Kędra cocycle on a pair of maps.
    GkEval,
    /// Residuals of the coboundary and cocycle identities on random draws.
    GkCheck,
    /// Additivity of the mean translation number on a generated subgroup.
    SplitCheck,
    /// Grid estimate and certified bound of the seminorm.
    Seminorm,
    /// Undistortion certificate against a generating set.
    DistortionCert,
    /// Exact word norm by breadth-first search.
    WordNorm,
    /// Homomorphism nonvanishing on the fiber class of Seifert data.
    SeifertClass,
    /// Parameter sweep over another command.
    Sweep,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::RotLocal => Command::RotLocal,
            Sub::RotMean => Command::RotMean,
            Sub::RotHomovec => Command::RotHomovec,
            Sub::GkEval => Command::GkEval,
            Sub::GkCheck => Command::GkCheck,
            Sub::SplitCheck => Command::SplitCheck,
            Sub::Seminorm => Command::Seminorm,
            Sub::DistortionCert => Command::DistortionCert,
            Sub::WordNorm => Command::WordNorm,
            Sub::SeifertClass => Command::SeifertClass,
            Sub::Sweep => Command::Sweep,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed,
        tolerance: cli.tolerance,
        max_iterations: cli.max_iterations,
        grid: cli.grid,
        format: cli.format,
        out: cli.out.clone(),
    };
    let loaded = match &cli.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    };
    let cfg = match loaded.and_then(|c| c.resolve(cli.command.into(), &overrides)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("transnum: {e}");
            return ExitCode::from(e.status().code() as u8);
        }
    };
    let report = run(&cfg);
    let text = output::render(&report, cfg.output.format.unwrap_or_default());
    let mut status = report.status;
    match &cfg.output.path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                let e = CliError::Io(format!("cannot write {}: {e}", path.display()));
                eprintln!("transnum: {e}");
                status = status.max(Status::Internal);
            }
        }
        None => print!("{text}"),
    }
    if let Some(e) = &report.error {
        eprintln!("transnum: {}", e.message);
    }
    ExitCode::from(status.code() as u8)
}
