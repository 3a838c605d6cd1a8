//! Simulation and evaluation: seeded runs of a strategy against a hidden
//! model, batch experiments with confidence intervals, and exact parity
//! checks of finite-memory strategies.

pub mod examples;
pub mod experiment;
pub mod sim;
pub mod stats;
pub mod verify;

use thiserror::Error;

use crate::model::ModelError;
use crate::solver::SolverError;
use crate::strategies::StrategyError;

pub use experiment::{
    emit_report, mec_yardsticks, meets_mp, parse_report, phase_spans, run_experiment, AggregateStats,
    ExperimentConfig, ExperimentOutcome, InstanceSpec, MecStat, ReportFormat, WORKERS_ENV,
};
pub use sim::{simulate, trial_seed, Sampler, SimOptions, Simulation, TrialResult};
pub use stats::{wilson_interval, GuaranteeStat, Z_99};
pub use verify::{verify_parity_exact, ExactParity};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("step {step}: machine chose disabled action {action} at state {state}")]
    InvalidAction { step: u64, state: i64, action: usize },
    #[error("{0}")]
    Empty(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
