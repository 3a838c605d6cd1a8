//! Automata, hidden models, Mealy machines, run traces and product chains.

mod automaton;
mod hidden;
mod ids;
mod machine;
mod product;
pub mod rational;
mod trace;

pub use automaton::{AutomatonDoc, ParityAutomaton, StateDoc, TransitionDoc};
pub use hidden::{validate_compatibility, HiddenDoc, HiddenModel, Outcome, ProbabilityDoc, RewardDoc};
pub use ids::{ActionId, StateId};
pub use machine::{
    truncate_reward, untruncate_reward, ActionDist, MealyMachine, Memoryless, Phase, Step,
    UniformMemoryless,
};
pub use product::{build_product_chain, MarkovChain, ProductChain, ProductEdge, DEFAULT_PRODUCT_CAP};
pub use trace::{finite_mean_payoff, min_priority_seen, RunTrace};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot parse number {0:?}")]
    BadNumber(String),
    #[error("no {0} given")]
    Empty(&'static str),
    #[error("duplicate {0}")]
    Duplicate(String),
    #[error("unknown state id {0}")]
    UnknownState(i64),
    #[error("unknown action {0}")]
    UnknownAction(String),
    #[error("deadlock: state {0} has no outgoing transition")]
    Deadlock(i64),
    #[error("pi_min {0} is outside (0,1]")]
    PiMinRange(String),
    #[error("pi_min times support size exceeds 1 at ({state}, {action}) with {support} successors")]
    PiMinSupport { state: i64, action: String, support: usize },
    #[error("support mismatch: {0}")]
    SupportMismatch(String),
    #[error("probability {prob} at {transition} is below pi_min {pi_min}")]
    BelowPiMin { transition: String, prob: String, pi_min: String },
    #[error("not stochastic: {0}")]
    NotStochastic(String),
    #[error("bad reward: {0}")]
    Reward(String),
    #[error("strategy has infinite memory; product construction needs a finite machine")]
    InfiniteMemory,
    #[error("product chain exceeds the cap of {0} states")]
    ProductCap(usize),
    #[error("empty window {0}..{1}")]
    EmptyWindow(usize, usize),
    #[error("{0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
}
