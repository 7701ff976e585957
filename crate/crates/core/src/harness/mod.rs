//! Experiment drivers tying the modules into reproducible runs with CSV
//! reports, a manifest and pass/fail checks.

mod config;
mod decay;
mod drivers;
mod estimate;
mod recipes;
mod report;

pub use config::{Experiment, ExperimentConfig, GRecipe, ModelKind, SolverSection, Sweep};
pub use decay::{run_decay_experiment, DecayFit, DecayVerdict};
pub use drivers::{involution_error, roundtrip_error, run_convergence, run_hammer_sweep, run_navier_stokes, run_nfunc_verification};
pub use estimate::{
    estimate_sides, families, run_holder_transfer, run_main_estimate_experiment, stress_field, transfer_exponent,
    EstimateSides,
};
pub use recipes::recipe_field;
pub use report::{Check, ExperimentReport, Table};

use crate::Result;

/// Runs the experiment named in `cfg`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::NfuncVerify => run_nfunc_verification(cfg),
        Experiment::HammerSweep => run_hammer_sweep(cfg),
        Experiment::Convergence => run_convergence(cfg),
        Experiment::Decay => run_decay_experiment(cfg),
        Experiment::MainEstimate => run_main_estimate_experiment(cfg),
        Experiment::HolderTransfer => run_holder_transfer(cfg),
        Experiment::NavierStokes => run_navier_stokes(cfg),
    }
}
