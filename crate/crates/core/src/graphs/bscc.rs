use serde::Serialize;

use super::scc::{bottom_components, reachable_from};
use crate::model::MarkovChain;

/// Bottom strongly connected components of a chain, sorted by their
/// smallest state.
pub fn bscc_decomposition(chain: &MarkovChain) -> Vec<Vec<usize>> {
    bottom_components(&adjacency(chain))
}

fn adjacency(chain: &MarkovChain) -> Vec<Vec<usize>> {
    chain
        .succ
        .iter()
        .map(|row| row.iter().filter(|(_, p)| *p > 0.0).map(|(t, _)| *t).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityVerdict {
    pub holds: bool,
    /// A reachable bottom component with odd minimal priority, if any.
    pub witness: Option<Vec<usize>>,
}

/// Whether every bottom component reachable from state 0 has even minimal
/// priority, i.e. the chain satisfies the parity objective almost surely.
pub fn chain_parity_almost_sure(chain: &MarkovChain) -> ParityVerdict {
    let adj = adjacency(chain);
    let reach = reachable_from(&adj, 0);
    for b in bottom_components(&adj) {
        if !reach[b[0]] {
            continue;
        }
        let min = b.iter().map(|&v| chain.priority[v]).min().expect("nonempty");
        if min % 2 == 1 {
            return ParityVerdict { holds: false, witness: Some(b) };
        }
    }
    ParityVerdict { holds: true, witness: None }
}
