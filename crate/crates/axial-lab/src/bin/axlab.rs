use anyhow::Context as _;
use axial_lab::harness::output::execute;
use axial_lab::harness::{RunConfig, StudyKind};
use axial_lab::LabError;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical lab for axial linearized gravity on Schwarzschild.
#[derive(Parser)]
#[command(name = "axlab", version)]
struct Cli {
    #[command(subcommand)]
    study: Study,
    /// TOML run configuration; the baseline run is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for independent mode and resolution jobs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Scheme order (overrides `scheme` in the config).
    #[arg(long, global = true, value_parser = ["2", "4"])]
    scheme: Option<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Study {
    /// Evolve the configured modes and write trajectories and energies.
    Evolve,
    /// Run the exact identity checks and certify the red-shift multiplier.
    Verify,
    /// Measure boundedness and decay along the two foliations.
    Decay,
    /// Richardson orders across three resolutions.
    Converge,
    /// Fit and remove the lowest beta mode with a linearized Kerr solution.
    NormalizeKerr,
}

impl Study {
    fn kind(self) -> StudyKind {
        match self {
            Study::Evolve => StudyKind::Evolve,
            Study::Verify => StudyKind::Verify,
            Study::Decay => StudyKind::Decay,
            Study::Converge => StudyKind::Converge,
            Study::NormalizeKerr => StudyKind::NormalizeKerr,
        }
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CONTACT: u8 = 3;

fn load(cli: &Cli) -> anyhow::Result<RunConfig> {
    let kind = cli.study.kind();
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut cfg = RunConfig::from_toml(&text)?;
            cfg.study = kind;
            cfg
        }
        None => RunConfig::baseline(kind),
    };
    if let Some(s) = &cli.scheme {
        cfg.scheme = s.parse()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<LabError>() {
        Some(LabError::Config(_)) => EXIT_CONFIG,
        Some(LabError::BoundaryContact { .. }) => EXIT_CONTACT,
        Some(_) => EXIT_FAIL,
        None => EXIT_CONFIG,
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = load(cli)?;
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.study.name()));
    let pass = execute(&cfg, &dir)?;
    println!("{}: {} ({})", cfg.study.name(), if pass { "pass" } else { "FAIL" }, dir.display());
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
