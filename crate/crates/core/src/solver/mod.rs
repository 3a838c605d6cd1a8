//! Quantitative solving on known MDPs: optimal gain with unichain
//! memoryless strategies, chain gains, constrained yardsticks and the
//! robustness bounds relating model error to gain error.

mod chain;
mod gain;
mod mdp;
mod robust;
mod yardstick;

pub use chain::{chain_gain, stationary_distribution, MAX_DENSE_CHAIN};
pub use gain::{optimal_gain, GainSolution, SolverOptions};
pub use mdp::{Choice, Mdp};
pub use robust::{robustness_eta, perturbation_gap_bound, RobustnessBound};
pub use yardstick::{component_yardstick, yardstick, YardstickKind, YardstickReport};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("singular linear system")]
    Singular,
    #[error("no convergence within the iteration cap")]
    NoConvergence,
    #[error("chain with {0} states is too large for dense solving")]
    TooLarge(usize),
    #[error("learned model is not support-complete")]
    IncompleteModel,
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
}
