use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::ec::{approach_strategy, maximal_good_components, mec_decomposition, EndComponent};
use super::game::{ParityGame, Player};
use super::GraphError;
use crate::model::{ActionId, HiddenModel, ParityAutomaton, StateId};

/// A winning region with a uniform memoryless deterministic strategy on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Region {
    pub states: BTreeSet<StateId>,
    pub strategy: BTreeMap<StateId, ActionId>,
}

impl Region {
    pub fn is_everything(&self, aut: &ParityAutomaton) -> bool {
        self.states.len() == aut.n_states()
    }

    /// Strategy as a dense table, using the lowest enabled action outside
    /// the region.
    pub fn dense_strategy(&self, aut: &ParityAutomaton) -> Vec<ActionId> {
        aut.states()
            .map(|q| self.strategy.get(&q).copied().unwrap_or(aut.enabled(q)[0]))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WinningRegions {
    pub sure: Region,
    pub almost_sure: Region,
}

pub fn winning_regions(aut: &ParityAutomaton) -> WinningRegions {
    WinningRegions { sure: sure_winning(aut), almost_sure: almost_sure_winning(aut) }
}

/// States from which the controller wins the parity objective whatever
/// successors are taken within the support, with a uniform strategy.
pub fn sure_winning(aut: &ParityAutomaton) -> Region {
    let n = aut.n_states();
    let mut owner = vec![Player::Even; n];
    let mut priority: Vec<u32> = aut.priorities().to_vec();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pair_action = Vec::new();
    for q in aut.states() {
        for &a in aut.enabled(q) {
            let v = owner.len();
            owner.push(Player::Odd);
            priority.push(aut.priority(q));
            succ.push(aut.successors(q, a).iter().map(|t| t.0).collect());
            succ[q.0].push(v);
            pair_action.push(a);
        }
    }
    let game = ParityGame::new(owner, priority, succ);
    let sol = game.solve();
    let mut states = BTreeSet::new();
    let mut strategy = BTreeMap::new();
    for q in aut.states() {
        if sol.even_wins[q.0] {
            states.insert(q);
            let v = sol.even_strategy[q.0].expect("strategy on winning region");
            strategy.insert(q, pair_action[v - n]);
        }
    }
    Region { states, strategy }
}

/// States from which the parity objective holds with probability one for
/// every compatible transition function, with a uniform strategy.
pub fn almost_sure_winning(aut: &ParityAutomaton) -> Region {
    let n = aut.n_states();
    // Target: union of maximal good components; each state is assigned to
    // the component of smallest minimal priority containing it.
    let mut owner_ec: Vec<Option<(u32, usize)>> = vec![None; n];
    let mut goods: Vec<EndComponent> = Vec::new();
    for mec in mec_decomposition(aut).mecs {
        for g in maximal_good_components(aut, &mec) {
            let idx = goods.len();
            for &q in &g.states {
                if owner_ec[q.0].is_none_or(|(d, _)| g.min_priority < d) {
                    owner_ec[q.0] = Some((g.min_priority, idx));
                }
            }
            goods.push(g);
        }
    }
    let mut strategy = BTreeMap::new();
    let per_good: Vec<BTreeMap<StateId, ActionId>> = goods
        .iter()
        .map(|g| approach_strategy(aut, &g.allowed, &g.min_priority_states(aut)))
        .collect();
    let target: Vec<bool> = owner_ec.iter().map(Option::is_some).collect();
    for q in aut.states() {
        if let Some((_, idx)) = owner_ec[q.0] {
            strategy.insert(q, per_good[idx][&q]);
        }
    }
    let mut region = vec![true; n];
    loop {
        let dist = safe_distances(aut, &region, &target);
        let next: Vec<bool> = dist.iter().map(|&d| d != usize::MAX).collect();
        if next == region {
            for q in aut.states() {
                if region[q.0] && !target[q.0] {
                    let d = dist[q.0];
                    let a = *aut
                        .enabled(q)
                        .iter()
                        .find(|&&a| {
                            let s = aut.successors(q, a);
                            s.iter().all(|t| region[t.0]) && s.iter().any(|t| dist[t.0] + 1 == d)
                        })
                        .expect("distance witness");
                    strategy.insert(q, a);
                }
            }
            break;
        }
        region = next;
    }
    let states = aut.states().filter(|q| region[q.0]).collect();
    Region { states, strategy }
}

/// Distances to `target` using only actions whose successors all stay in
/// `region`; `usize::MAX` for states outside the region or unable to reach.
fn safe_distances(aut: &ParityAutomaton, region: &[bool], target: &[bool]) -> Vec<usize> {
    let n = aut.n_states();
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in aut.states().filter(|q| region[q.0]) {
        for &a in aut.enabled(q) {
            let s = aut.successors(q, a);
            if s.iter().all(|t| region[t.0]) {
                for t in s {
                    pred[t.0].push(q.0);
                }
            }
        }
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for q in 0..n {
        if region[q] && target[q] {
            dist[q] = 0;
            queue.push_back(q);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &u in &pred[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Sub-automaton on `region` keeping only actions whose successors stay
/// inside, with the map from new to original indices.
pub fn restrict_to_region(
    aut: &ParityAutomaton,
    region: &BTreeSet<StateId>,
) -> Result<(ParityAutomaton, Vec<StateId>), GraphError> {
    if region.is_empty() {
        return Err(GraphError::EmptyRegion);
    }
    aut.restrict(region, None).map_err(|e| GraphError::Restriction(e.to_string()))
}

/// Restricts both the automaton and the hidden model to `region`.
pub fn restrict_instance(
    aut: &ParityAutomaton,
    hidden: &HiddenModel,
    region: &BTreeSet<StateId>,
) -> Result<(ParityAutomaton, HiddenModel, Vec<StateId>), GraphError> {
    let (sub, origin) = restrict_to_region(aut, region)?;
    let mut h = hidden.restrict(&origin);
    // Drop entries of removed actions.
    let full = h.clone();
    h = HiddenModel::new();
    for (q, a, t) in sub.transitions() {
        let p = full.prob(q, a, t).cloned().expect("restricted probability");
        let r = full.reward(q, a, t).cloned().expect("restricted reward");
        h.set(q, a, t, p, r);
    }
    Ok((sub, h, origin))
}
