use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::scc::strongly_connected_components;
use super::GraphError;
use crate::model::{ActionId, ParityAutomaton, StateId};

/// Support graph of an MDP: for each state, its actions with successor lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionGraph {
    rows: Vec<Vec<(ActionId, Vec<usize>)>>,
}

impl ActionGraph {
    pub fn new(rows: Vec<Vec<(ActionId, Vec<usize>)>>) -> Self {
        Self { rows }
    }

    pub fn from_automaton(aut: &ParityAutomaton) -> Self {
        let rows = aut
            .states()
            .map(|q| {
                aut.enabled(q)
                    .iter()
                    .map(|&a| (a, aut.successors(q, a).iter().map(|t| t.0).collect()))
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn n_states(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, q: usize) -> &[(ActionId, Vec<usize>)] {
        &self.rows[q]
    }

    pub fn successors(&self, q: usize, a: ActionId) -> Option<&[usize]> {
        self.rows[q].iter().find(|(b, _)| *b == a).map(|(_, s)| s.as_slice())
    }
}

/// Result of [`classify_ec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Minimal priority is even.
    Good,
    /// Not good, but contains a good end component.
    WeaklyGood,
    Neither,
}

impl Classification {
    /// Good components count as weakly good as well.
    pub fn contains_good(self) -> bool {
        !matches!(self, Classification::Neither)
    }
}

/// A set of states with allowed actions, closed and strongly connected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndComponent {
    pub states: BTreeSet<StateId>,
    pub allowed: BTreeMap<StateId, Vec<ActionId>>,
    pub min_priority: u32,
    pub classification: Classification,
}

impl EndComponent {
    /// Checks the end-component conditions and classifies the result.
    pub fn new(
        aut: &ParityAutomaton,
        allowed: BTreeMap<StateId, Vec<ActionId>>,
    ) -> Result<Self, GraphError> {
        let states: BTreeSet<StateId> = allowed.keys().copied().collect();
        if !is_end_component(&ActionGraph::from_automaton(aut), &allowed) {
            return Err(GraphError::NotEndComponent);
        }
        Ok(Self::unchecked(aut, states, allowed))
    }

    pub(crate) fn unchecked(
        aut: &ParityAutomaton,
        states: BTreeSet<StateId>,
        allowed: BTreeMap<StateId, Vec<ActionId>>,
    ) -> Self {
        let min_priority = states.iter().map(|&q| aut.priority(q)).min().unwrap_or(0);
        let mut ec = Self { states, allowed, min_priority, classification: Classification::Neither };
        ec.classification = classification_of(aut, &ec);
        ec
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.states.contains(&q)
    }

    pub fn actions(&self, q: StateId) -> &[ActionId] {
        self.allowed.get(&q).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// The whole automaton as a component (not necessarily an end component).
    pub fn whole(aut: &ParityAutomaton) -> Self {
        let allowed = aut.states().map(|q| (q, aut.enabled(q).to_vec())).collect();
        Self::unchecked(aut, aut.states().collect(), allowed)
    }

    /// States of minimal priority.
    pub fn min_priority_states(&self, aut: &ParityAutomaton) -> Vec<StateId> {
        self.states.iter().copied().filter(|&q| aut.priority(q) == self.min_priority).collect()
    }
}

/// Closure plus strong connectivity of `(S, β)` with nonempty action sets.
pub fn is_end_component(g: &ActionGraph, allowed: &BTreeMap<StateId, Vec<ActionId>>) -> bool {
    if allowed.is_empty() {
        return false;
    }
    let n = g.n_states();
    let mut inside = vec![false; n];
    for q in allowed.keys() {
        if q.0 >= n {
            return false;
        }
        inside[q.0] = true;
    }
    let mut adj = vec![Vec::new(); n];
    for (q, acts) in allowed {
        if acts.is_empty() {
            return false;
        }
        for a in acts {
            let Some(succ) = g.successors(q.0, *a) else { return false };
            if succ.iter().any(|&t| !inside[t]) {
                return false;
            }
            adj[q.0].extend_from_slice(succ);
        }
    }
    strongly_connected_components(&adj, &inside).len() == 1
}

/// Maximal end components of the sub-MDP given by `allowed` (states absent
/// from the map are excluded). Returns `(S, β)` pairs sorted by smallest
/// state.
pub fn mec_raw(g: &ActionGraph, allowed: &BTreeMap<usize, Vec<ActionId>>) -> Vec<BTreeMap<usize, Vec<ActionId>>> {
    let n = g.n_states();
    let mut acts: Vec<Vec<ActionId>> = vec![Vec::new(); n];
    for (&q, list) in allowed {
        acts[q] = list.clone();
    }
    loop {
        let active: Vec<bool> = acts.iter().map(|a| !a.is_empty()).collect();
        let mut adj = vec![Vec::new(); n];
        for q in 0..n {
            for a in &acts[q] {
                adj[q].extend(g.successors(q, *a).expect("action in graph").iter().copied());
            }
        }
        let comps = strongly_connected_components(&adj, &active);
        let mut comp_of = vec![usize::MAX; n];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let mut changed = false;
        for q in 0..n {
            if acts[q].is_empty() {
                continue;
            }
            let before = acts[q].len();
            let cq = comp_of[q];
            acts[q].retain(|a| g.successors(q, *a).expect("action in graph").iter().all(|&t| comp_of[t] == cq));
            changed |= acts[q].len() != before;
        }
        if !changed {
            let mut result: Vec<BTreeMap<usize, Vec<ActionId>>> = comps
                .iter()
                .filter(|c| c.iter().all(|&v| !acts[v].is_empty()))
                .map(|c| c.iter().map(|&v| (v, acts[v].clone())).collect())
                .collect();
            result.sort_by_key(|m| *m.keys().next().expect("nonempty component"));
            return result;
        }
    }
}

/// Maximal end components and the state-to-component map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MecDecomposition {
    pub mecs: Vec<EndComponent>,
    pub mec_of: Vec<Option<usize>>,
}

impl MecDecomposition {
    pub fn of(&self, q: StateId) -> Option<usize> {
        self.mec_of[q.0]
    }
}

pub fn mec_decomposition(aut: &ParityAutomaton) -> MecDecomposition {
    let g = ActionGraph::from_automaton(aut);
    let all: BTreeMap<usize, Vec<ActionId>> = aut.states().map(|q| (q.0, aut.enabled(q).to_vec())).collect();
    let raw = mec_raw(&g, &all);
    let mut mec_of = vec![None; aut.n_states()];
    let mecs = raw
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            for &q in m.keys() {
                mec_of[q] = Some(i);
            }
            to_component(aut, m)
        })
        .collect();
    MecDecomposition { mecs, mec_of }
}

fn to_component(aut: &ParityAutomaton, m: BTreeMap<usize, Vec<ActionId>>) -> EndComponent {
    let allowed: BTreeMap<StateId, Vec<ActionId>> = m.into_iter().map(|(q, a)| (StateId(q), a)).collect();
    EndComponent::unchecked(aut, allowed.keys().copied().collect(), allowed)
}

/// For each even priority `d` occurring in `ec`, the maximal end components
/// of `ec` restricted to priorities `>= d` that contain a priority-`d`
/// state. Every good end component inside `ec` is contained in one of them.
fn maximal_good_raw(aut: &ParityAutomaton, ec: &EndComponent) -> Vec<(u32, BTreeMap<usize, Vec<ActionId>>)> {
    let g = ActionGraph::from_automaton(aut);
    let evens: BTreeSet<u32> = ec.states.iter().map(|&q| aut.priority(q)).filter(|p| p % 2 == 0).collect();
    let mut out = Vec::new();
    for d in evens {
        let restricted: BTreeMap<usize, Vec<ActionId>> = ec
            .allowed
            .iter()
            .filter(|(q, _)| aut.priority(**q) >= d)
            .map(|(q, a)| (q.0, a.clone()))
            .collect();
        for m in mec_raw(&g, &restricted) {
            if m.keys().any(|&q| aut.priority(StateId(q)) == d) {
                out.push((d, m));
            }
        }
    }
    out
}

fn classification_of(aut: &ParityAutomaton, ec: &EndComponent) -> Classification {
    if ec.min_priority % 2 == 0 {
        Classification::Good
    } else if maximal_good_raw(aut, ec).is_empty() {
        Classification::Neither
    } else {
        Classification::WeaklyGood
    }
}

/// Classifies an end component as good, weakly good or neither.
pub fn classify_ec(aut: &ParityAutomaton, ec: &EndComponent) -> Result<Classification, GraphError> {
    if !is_end_component(&ActionGraph::from_automaton(aut), &ec.allowed) {
        return Err(GraphError::NotEndComponent);
    }
    Ok(classification_of(aut, ec))
}

/// The maximal good end components inside `ec`, one family per even
/// priority, ordered by priority and then by smallest state.
pub fn maximal_good_components(aut: &ParityAutomaton, ec: &EndComponent) -> Vec<EndComponent> {
    maximal_good_raw(aut, ec).into_iter().map(|(_, m)| to_component(aut, m)).collect()
}

/// Breadth-first distances to `targets` inside `(S, β)`, where a state's
/// distance drops along an allowed action having some successor closer.
/// States that cannot reach the targets get `usize::MAX`.
pub fn distances_to(
    aut: &ParityAutomaton,
    allowed: &BTreeMap<StateId, Vec<ActionId>>,
    targets: &[StateId],
) -> Vec<usize> {
    let n = aut.n_states();
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (q, acts) in allowed {
        for &a in acts {
            for t in aut.successors(*q, a) {
                pred[t.0].push(q.0);
            }
        }
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for t in targets {
        if allowed.contains_key(t) && dist[t.0] == usize::MAX {
            dist[t.0] = 0;
            queue.push_back(t.0);
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

/// Memoryless choice inside `(S, β)` moving toward `targets`: every
/// non-target state picks the lowest allowed action with a successor one
/// step closer; target states pick their lowest allowed action.
pub fn approach_strategy(
    aut: &ParityAutomaton,
    allowed: &BTreeMap<StateId, Vec<ActionId>>,
    targets: &[StateId],
) -> BTreeMap<StateId, ActionId> {
    let dist = distances_to(aut, allowed, targets);
    allowed
        .iter()
        .map(|(&q, acts)| {
            let d = dist[q.0];
            let choice = if d == 0 || d == usize::MAX {
                acts[0]
            } else {
                *acts
                    .iter()
                    .find(|&&a| aut.successors(q, a).iter().any(|t| dist[t.0] == d - 1))
                    .expect("distance witness")
            };
            (q, choice)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::examples::*;

    #[test]
    fn fig1_right_single_mec() {
        let inst = fig1_right(&Fig1RightParams::default()).unwrap();
        let dec = mec_decomposition(&inst.automaton);
        assert_eq!(dec.mecs.len(), 1);
        let m = &dec.mecs[0];
        assert_eq!(m.len(), 5);
        assert_eq!(m.actions(StateId(0)).len(), 2);
        assert_eq!(m.classification, Classification::Good);
    }

    #[test]
    fn fig3_single_mec_weakly_good() {
        let inst = fig3(&Fig3Params::default()).unwrap();
        let dec = mec_decomposition(&inst.automaton);
        assert_eq!(dec.mecs.len(), 1);
        assert_eq!(dec.mecs[0].len(), 5);
        assert_eq!(classify_ec(&inst.automaton, &dec.mecs[0]).unwrap(), Classification::WeaklyGood);
        let goods: Vec<Vec<usize>> = maximal_good_components(&inst.automaton, &dec.mecs[0])
            .iter()
            .map(|g| g.states.iter().map(|q| q.0).collect())
            .collect();
        assert_eq!(goods, vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn two_self_loops() {
        let aut = ParityAutomaton::new(
            vec![0, 1],
            vec![1, 1],
            vec!["a".into()],
            &[(0, 0, 0), (1, 0, 1)],
            num_rational::BigRational::from_integer(1.into()),
            0,
        )
        .unwrap();
        let dec = mec_decomposition(&aut);
        assert_eq!(dec.mecs.len(), 2);
        assert_eq!(dec.mecs[0].classification, Classification::Neither);
    }

    #[test]
    fn non_component_is_rejected() {
        let inst = fig1_right(&Fig1RightParams::default()).unwrap();
        let mut allowed = BTreeMap::new();
        allowed.insert(StateId(0), vec![ActionId(0)]);
        assert!(matches!(EndComponent::new(&inst.automaton, allowed), Err(GraphError::NotEndComponent)));
    }

    #[test]
    fn two_mec_instance_structure() {
        let inst = two_mec().unwrap();
        let dec = mec_decomposition(&inst.automaton);
        assert_eq!(dec.mecs.len(), 2);
        assert_eq!(dec.of(StateId(0)), None);
        assert!(dec.mecs.iter().all(|m| m.classification.contains_good()));
        let v = &dec.mecs[1];
        let goods = maximal_good_components(&inst.automaton, v);
        assert_eq!(goods.len(), 1);
        assert_eq!(goods[0].states.iter().map(|q| q.0).collect::<Vec<_>>(), vec![4]);
    }
}
