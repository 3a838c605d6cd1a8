//! Sample sizes, empirical models and the schedules driving the learning
//! strategies.

mod bounds;
mod mixing;
mod monitor;
mod observe;
mod schedule;

pub use bounds::{
    ceil_tol, exploration_episode_count, hoeffding_samples, ln_visit_bound, product_threshold, tail_product_lower,
    EpisodeCount,
};
pub use mixing::{mixing_horizon, tail_start, MixingParams, MixingSource};
pub use monitor::{episode_count_for_target, fbstrat_episode_counts, monitor_plan, zeta_lb, MonitorPlan};
pub use observe::{
    estimate_model, exploration_strategy, LearnedModel, LogLayout, ObservationLog, DEFAULT_REWARD_BITS,
};
pub use schedule::{
    f_term, p_term, robust_accuracy, schedule_sigma_infinity, EpisodePlan, EpisodeSchedule, EpsilonSeq, Sizing,
};

use thiserror::Error;

use crate::model::{ActionId, StateId};
use crate::solver::SolverError;

#[derive(Debug, Error, PartialEq)]
pub enum LearnError {
    #[error("{0} = {1} is out of range")]
    Range(&'static str, f64),
    #[error("transition ({0}, {1}, {2}) is not in the support")]
    NotInSupport(StateId, ActionId, StateId),
    #[error("reward mismatch on {transition:?}: first {first}, now {now}")]
    RewardMismatch { transition: (StateId, ActionId, StateId), first: f64, now: f64 },
    #[error("pair ({0}, {1}) has unseen transitions")]
    Incomplete(StateId, ActionId),
    #[error("no allowed action at {0}")]
    EmptyActions(StateId),
    #[error("action {1} is not enabled at {0}")]
    NotEnabled(StateId, ActionId),
    #[error("bad schedule: {0}")]
    Schedule(String),
    #[error(transparent)]
    Solver(SolverError),
}
