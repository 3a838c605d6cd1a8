use std::collections::BTreeMap;

use crate::graphs::{ActionGraph, EndComponent};
use crate::model::rational::rational_to_f64;
use crate::model::{ActionId, HiddenModel, MarkovChain, ParityAutomaton, StateId};

/// One enabled action of a numeric MDP.
#[derive(Clone, Debug, PartialEq)]
pub struct Choice {
    pub action: ActionId,
    /// `(successor, probability, reward)` with positive probabilities.
    pub outcomes: Vec<(usize, f64, f64)>,
    /// Expected one-step reward.
    pub mean_reward: f64,
}

impl Choice {
    pub fn new(action: ActionId, outcomes: Vec<(usize, f64, f64)>) -> Self {
        let mean_reward = outcomes.iter().map(|(_, p, r)| p * r).sum();
        Self { action, outcomes, mean_reward }
    }
}

/// Floating point MDP used by the numeric solvers.
///
/// States without choices are treated as absent, which is how sub-MDPs on
/// a subset of states are represented without re-indexing.
#[derive(Clone, Debug, PartialEq)]
pub struct Mdp {
    pub choices: Vec<Vec<Choice>>,
    pub priorities: Vec<u32>,
}

impl Mdp {
    pub fn new(choices: Vec<Vec<Choice>>, priorities: Vec<u32>) -> Self {
        assert_eq!(choices.len(), priorities.len());
        Self { choices, priorities }
    }

    pub fn from_hidden(aut: &ParityAutomaton, hidden: &HiddenModel) -> Self {
        let choices = aut
            .states()
            .map(|q| {
                aut.enabled(q)
                    .iter()
                    .map(|&a| {
                        let outcomes = hidden
                            .row(q, a)
                            .into_iter()
                            .map(|o| (o.next.0, rational_to_f64(&o.prob), rational_to_f64(&o.reward)))
                            .collect();
                        Choice::new(a, outcomes)
                    })
                    .collect()
            })
            .collect();
        Self::new(choices, aut.priorities().to_vec())
    }

    pub fn n_states(&self) -> usize {
        self.choices.len()
    }

    pub fn is_present(&self, q: usize) -> bool {
        !self.choices[q].is_empty()
    }

    pub fn choice(&self, q: usize, a: ActionId) -> Option<&Choice> {
        self.choices[q].iter().find(|c| c.action == a)
    }

    /// Sub-MDP on the states of `ec` with only its allowed actions.
    pub fn restricted(&self, ec: &EndComponent) -> Self {
        self.restricted_to(&ec.allowed)
    }

    pub fn restricted_to(&self, allowed: &BTreeMap<StateId, Vec<ActionId>>) -> Self {
        let choices = (0..self.n_states())
            .map(|q| match allowed.get(&StateId(q)) {
                Some(acts) => self.choices[q].iter().filter(|c| acts.contains(&c.action)).cloned().collect(),
                None => Vec::new(),
            })
            .collect();
        Self::new(choices, self.priorities.clone())
    }

    pub fn action_graph(&self) -> ActionGraph {
        ActionGraph::new(
            self.choices
                .iter()
                .map(|row| row.iter().map(|c| (c.action, c.outcomes.iter().map(|o| o.0).collect())).collect())
                .collect(),
        )
    }

    /// Largest absolute expected reward, used to scale tolerances.
    pub fn reward_scale(&self) -> f64 {
        self.choices.iter().flatten().map(|c| c.mean_reward.abs()).fold(0.0, f64::max)
    }

    /// Markov chain of a memoryless deterministic strategy over the
    /// present states (absent states become reward-0 self-loops).
    pub fn chain_of(&self, strategy: &[Option<ActionId>]) -> MarkovChain {
        let mut succ = Vec::with_capacity(self.n_states());
        let mut reward = Vec::with_capacity(self.n_states());
        for q in 0..self.n_states() {
            match strategy[q].and_then(|a| self.choice(q, a)) {
                Some(c) => {
                    let mut row: BTreeMap<usize, f64> = BTreeMap::new();
                    for &(t, p, _) in &c.outcomes {
                        *row.entry(t).or_default() += p;
                    }
                    succ.push(row.into_iter().collect());
                    reward.push(c.mean_reward);
                }
                None => {
                    succ.push(vec![(q, 1.0)]);
                    reward.push(0.0);
                }
            }
        }
        MarkovChain { succ, reward, priority: self.priorities.clone() }
    }

    /// Multiplies all rewards by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let choices = self
            .choices
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| Choice::new(c.action, c.outcomes.iter().map(|&(t, p, r)| (t, p, r * factor)).collect()))
                    .collect()
            })
            .collect();
        Self::new(choices, self.priorities.clone())
    }
}
