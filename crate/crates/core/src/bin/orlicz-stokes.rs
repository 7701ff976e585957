use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orlicz_stokes::harness::{run, Experiment, ExperimentConfig};

/// Runs the verification experiments and writes CSV reports.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on a
/// configuration or solver error.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    experiment: Command,
    /// TOML file overriding the experiment defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: the config's output_dir)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the effective config and exit
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Structural N-function checks over the built-in models
    NfuncVerify,
    /// Random-pair probe of the stress equivalences
    HammerSweep,
    /// Manufactured solutions, Newtonian reduction and energy minimality
    Convergence,
    /// Oscillation decay of V(Dh) for the homogeneous comparison problem
    Decay,
    /// Campanato estimate ratios over G recipes, meshes and rescalings
    MainEstimate,
    /// Hoelder quotient of Du from the stress regularity
    HolderTransfer,
    /// Convective problem and the Campanato seminorm of u (x) u
    NavierStokes,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Experiment {
        match c {
            Command::NfuncVerify => Experiment::NfuncVerify,
            Command::HammerSweep => Experiment::HammerSweep,
            Command::Convergence => Experiment::Convergence,
            Command::Decay => Experiment::Decay,
            Command::MainEstimate => Experiment::MainEstimate,
            Command::HolderTransfer => Experiment::HolderTransfer,
            Command::NavierStokes => Experiment::NavierStokes,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> orlicz_stokes::Result<bool> {
    let exp = Experiment::from(cli.experiment);
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path, Some(exp))?,
        None => ExperimentConfig::defaults(exp),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if cli.print_config {
        print!("{}", cfg.to_toml());
        return Ok(true);
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| orlicz_stokes::Error::Config(format!("threads: {e}")))?;
    }
    let report = run(&cfg)?;
    report.write(&cfg, &cfg.output_dir)?;
    print!("{}", report.summary());
    println!("wrote {}", cfg.output_dir.display());
    Ok(report.passed())
}
