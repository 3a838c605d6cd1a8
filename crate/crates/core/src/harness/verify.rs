use std::collections::BTreeSet;

use serde::Serialize;

use crate::graphs::chain_parity_almost_sure;
use crate::model::{build_product_chain, HiddenModel, MealyMachine, ModelError, ParityAutomaton, StateId};

/// Outcome of an exact parity check of a finite-memory machine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactParity {
    pub holds: bool,
    /// Automaton states of a reachable bottom component with odd minimal
    /// priority.
    pub witness: Option<BTreeSet<StateId>>,
    pub product_states: usize,
}

/// Decides whether `machine`, started in `start`, satisfies the parity
/// objective with probability one under the hidden model.
///
/// The reachable product of automaton states and machine memories is built
/// (at most `cap` states) and every bottom strongly connected component is
/// checked for an even minimal priority.
pub fn verify_parity_exact<M: MealyMachine>(
    aut: &ParityAutomaton,
    hidden: &HiddenModel,
    machine: &M,
    start: StateId,
    cap: usize,
) -> Result<ExactParity, ModelError> {
    let product = build_product_chain(aut, hidden, machine, start, cap)?;
    let verdict = chain_parity_almost_sure(&product.to_markov_chain());
    let states = product.automaton_states();
    Ok(ExactParity {
        holds: verdict.holds,
        witness: verdict.witness.map(|b| b.into_iter().map(|i| states[i]).collect()),
        product_states: product.len(),
    })
}
