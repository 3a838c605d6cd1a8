use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::graphs::EndComponent;
use crate::learn::{LogLayout, ObservationLog};
use crate::model::{ActionId, ParityAutomaton, StateId};
use crate::solver::{optimal_gain, SolverOptions};

/// The part of the automaton a machine works in, with dense lookups.
#[derive(Clone, Debug)]
pub(crate) struct Scope {
    pub aut: Arc<ParityAutomaton>,
    pub allowed: BTreeMap<StateId, Vec<ActionId>>,
    pub member: Vec<bool>,
    /// Allowed actions per state; states outside use every enabled action.
    pub beta: Vec<Vec<ActionId>>,
    pub n_states: usize,
    pub n_actions: usize,
    pub layout: Arc<LogLayout>,
}

impl Scope {
    pub fn new(aut: Arc<ParityAutomaton>, ec: &EndComponent, reward_bits: u32) -> Self {
        let member: Vec<bool> = aut.states().map(|q| ec.contains(q)).collect();
        let beta = aut
            .states()
            .map(|q| match ec.allowed.get(&q) {
                Some(a) if !a.is_empty() => a.clone(),
                _ => aut.enabled(q).to_vec(),
            })
            .collect();
        let n_actions = ec.allowed.values().map(Vec::len).max().unwrap_or(1).max(1);
        let layout = Arc::new(LogLayout::new(&aut, reward_bits));
        Self { allowed: ec.allowed.clone(), member, beta, n_states: ec.len().max(1), n_actions, layout, aut }
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.member[q.0]
    }

    pub fn pi_min(&self) -> f64 {
        self.aut.pi_min_f64()
    }

    pub fn states(&self) -> BTreeSet<StateId> {
        self.allowed.keys().copied().collect()
    }

    pub fn fresh_log(&self) -> ObservationLog {
        ObservationLog::with_layout(self.layout.clone())
    }
}

/// A memoryless deterministic choice computed from a learned model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Policy(pub Arc<Vec<ActionId>>);

impl Policy {
    pub fn new(actions: Vec<ActionId>) -> Self {
        Policy(Arc::new(actions))
    }

    pub fn action(&self, q: StateId) -> ActionId {
        self.0[q.0]
    }
}

/// Optimal strategy and optimal gain of the completed learned model on the
/// scope. States outside the scope (and failed solves) use the first
/// allowed action.
pub(crate) fn learned_policy(scope: &Scope, log: &ObservationLog) -> (Policy, f64) {
    let fallback = || Policy(Arc::new(scope.beta.iter().map(|b| b[0]).collect()));
    let Ok(mdp) = log.to_mdp(&scope.aut, Some(&scope.allowed), true) else {
        return (fallback(), 0.0);
    };
    match optimal_gain(&mdp, &SolverOptions::default()) {
        Ok(sol) => {
            let policy = (0..scope.aut.n_states()).map(|q| sol.strategy[q].unwrap_or(scope.beta[q][0])).collect();
            (Policy(Arc::new(policy)), sol.max_gain())
        }
        Err(_) => (fallback(), 0.0),
    }
}

/// Index of the component with the largest value; ties go to the smallest
/// state set.
pub(crate) fn best_component(components: &[EndComponent], values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in 0..components.len() {
        best = match best {
            None => Some(i),
            Some(b) if values[i] > values[b] => Some(i),
            Some(b) if values[i] == values[b] && components[i].states < components[b].states => Some(i),
            keep => keep,
        };
    }
    best
}
