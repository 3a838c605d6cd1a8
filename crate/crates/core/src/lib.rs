//! Strategy synthesis for Markov decision processes with a parity condition
//! and a mean-payoff objective, when the transition probabilities are
//! unknown and have to be learned while playing.
//!
//! The controller knows the graph of the process ([`model::ParityAutomaton`])
//! and a lower bound on nonzero probabilities. The probabilities and rewards
//! live in a [`model::HiddenModel`] that only the simulator reads. The
//! [`strategies`] module builds Mealy machines that explore, estimate,
//! optimize and fall back to parity-winning strategies; [`harness`] runs
//! them in seeded, reproducible experiments.
//!
//! ```
//! use mplearn::harness::examples::{builtin, BuiltinParams};
//! use mplearn::harness::{simulate, Sampler, SimOptions};
//! use mplearn::learn::Sizing;
//! use mplearn::strategies::{build, Mode, StrategyParams};
//!
//! let inst = builtin("fig3", &BuiltinParams::default()).unwrap();
//! let params = StrategyParams { mode: Mode::AsGeneral, epsilon: 0.2, gamma: 0.2, sizing: Sizing::desk() };
//! let machine = build(&inst.automaton, &params).unwrap().machine;
//! let sampler = Sampler::new(&inst.automaton, &inst.hidden);
//! let run = simulate(&inst.automaton, &sampler, &machine, &SimOptions::new(50_000), 1, 0).unwrap();
//! assert_eq!(run.result.tail_min_priority % 2, 0);
//! ```
//!
//! A guide with one chapter per concept lives in the `book/` directory of
//! the repository; its code samples are compiled and run as doc-tests.

pub mod cli;
pub mod graphs;
pub mod harness;
pub mod learn;
pub mod model;
pub mod solver;
pub mod strategies;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/end-components.md")]
    mod end_components {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/learning.md")]
    mod learning {}
    #[doc = include_str!("../../../book/src/strategies.md")]
    mod strategies {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
