//! Qualitative structure of automata and chains: end components, their
//! classification, sure and almost-sure parity winning regions, and bottom
//! components of Markov chains.

mod bscc;
mod ec;
pub mod game;
pub mod scc;
mod winning;

pub use bscc::{bscc_decomposition, chain_parity_almost_sure, ParityVerdict};
pub use ec::{
    approach_strategy, classify_ec, distances_to, is_end_component, maximal_good_components, mec_decomposition,
    mec_raw, ActionGraph, Classification, EndComponent, MecDecomposition,
};
pub use winning::{
    almost_sure_winning, restrict_instance, restrict_to_region, sure_winning, winning_regions, Region,
    WinningRegions,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("not an end component")]
    NotEndComponent,
    #[error("empty region")]
    EmptyRegion,
    #[error("cannot restrict to region: {0}")]
    Restriction(String),
}
