//! `qfilter`: batch front end for the single-photon filter simulator.

mod commands;
mod config;
mod manifest;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{load_config, parse_list, parse_range, Experiment, RunConfig};
use manifest::Manifest;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "qfilter", version, about = "Simulate and analyse a quantum-dot single-photon filter")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML or JSON configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "QFILTER_THREADS")]
    threads: Option<usize>,
    /// Comma-separated input photon numbers
    #[arg(long, global = true)]
    n_in: Option<String>,
    /// Pulse length (ps)
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Detuning grid "LO:HI:STEP" in µeV
    #[arg(long, global = true, allow_hyphen_values = true)]
    detuning_range: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Steady-state reflectivity spectrum under CW drive
    CwSpectrum,
    /// Reflectivity and ḡ²(0) versus pulse photon number
    PulsedSweep,
    /// Three-detector coincidence map from simulated clicks
    G3Map,
    /// Split n_out into dot and coherent photons
    Decompose,
    /// Photon-number populations from n_out, ḡ², ḡ³
    Fock,
    /// Fit device parameters to a measured CW spectrum
    Fit,
    /// Simulate a detector click stream
    Clicks,
    /// Run the experiment named in the configuration
    Run,
}

impl Command {
    fn experiment(self, cfg: &RunConfig) -> Experiment {
        match self {
            Self::CwSpectrum => Experiment::CwSpectrum,
            Self::PulsedSweep => Experiment::PulsedSweep,
            Self::G3Map => Experiment::G3Map,
            Self::Decompose => Experiment::Decompose,
            Self::Fock => Experiment::Fock,
            Self::Fit => Experiment::Fit,
            Self::Clicks => Experiment::Clicks,
            Self::Run => cfg.experiment,
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.common.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    let c = &cli.common;
    if let Some(out) = &c.out {
        cfg.out = out.to_string_lossy().into_owned();
    }
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(list) = &c.n_in {
        cfg.pulsed.n_in = parse_list(list)?;
    }
    if let Some(tau) = c.tau {
        cfg.pulsed.tau = tau;
    }
    if let Some(range) = &c.detuning_range {
        parse_range(range)?;
        cfg.cw.detuning_range = range.clone();
    }
    cfg.experiment = cli.command.experiment(&cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let out = PathBuf::from(&cfg.out);
    if let Err(e) = std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display())) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }

    let mut manifest = Manifest::start(&cfg, rayon::current_num_threads());
    let result = commands::run(&cfg, &out, &mut manifest);
    let code = match &result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    };
    manifest.finish(result.err().map(|e| format!("{e:#}")));
    if let Err(e) = manifest.write(&out) {
        eprintln!("error: writing manifest: {e:#}");
        return ExitCode::FAILURE;
    }
    code
}
