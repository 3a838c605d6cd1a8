use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{format_rational, parse_rational, rational_to_f64};
use super::{ActionId, ModelError, ParityAutomaton, StateId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiddenDoc {
    pub probabilities: Vec<ProbabilityDoc>,
    pub rewards: Vec<RewardDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityDoc {
    pub from: i64,
    pub action: String,
    pub to: i64,
    pub prob: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardDoc {
    pub from: i64,
    pub action: String,
    pub to: i64,
    pub reward: String,
}

type Triple = (StateId, ActionId, StateId);

/// Ground-truth transition probabilities and rewards.
///
/// Only the simulator and exact analysis code should read this; strategies
/// see nothing but observed steps. Construction does not check anything
/// beyond name resolution; call [`validate_compatibility`] before use.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HiddenModel {
    probs: BTreeMap<Triple, BigRational>,
    rewards: BTreeMap<Triple, BigRational>,
}

/// One outcome of a state-action pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub next: StateId,
    pub prob: BigRational,
    pub reward: BigRational,
}

impl HiddenModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets probability and reward of a triple, replacing earlier values.
    pub fn set(&mut self, q: StateId, a: ActionId, t: StateId, prob: BigRational, reward: BigRational) {
        self.probs.insert((q, a, t), prob);
        self.rewards.insert((q, a, t), reward);
    }

    pub fn set_prob(&mut self, q: StateId, a: ActionId, t: StateId, prob: BigRational) {
        self.probs.insert((q, a, t), prob);
    }

    pub fn set_reward(&mut self, q: StateId, a: ActionId, t: StateId, reward: BigRational) {
        self.rewards.insert((q, a, t), reward);
    }

    pub fn prob(&self, q: StateId, a: ActionId, t: StateId) -> Option<&BigRational> {
        self.probs.get(&(q, a, t))
    }

    pub fn reward(&self, q: StateId, a: ActionId, t: StateId) -> Option<&BigRational> {
        self.rewards.get(&(q, a, t))
    }

    /// Outcomes of `(q, a)` with nonzero probability, sorted by successor.
    pub fn row(&self, q: StateId, a: ActionId) -> Vec<Outcome> {
        self.probs
            .range((q, a, StateId(0))..=(q, a, StateId(usize::MAX)))
            .filter(|(_, p)| !p.is_zero())
            .map(|(&(_, _, t), p)| Outcome {
                next: t,
                prob: p.clone(),
                reward: self.rewards.get(&(q, a, t)).cloned().unwrap_or_else(BigRational::zero),
            })
            .collect()
    }

    pub fn from_doc(aut: &ParityAutomaton, doc: &HiddenDoc) -> Result<Self, ModelError> {
        let mut model = Self::new();
        let resolve = |from: i64, action: &str, to: i64| -> Result<Triple, ModelError> {
            let q = aut.state_by_label(from).ok_or(ModelError::UnknownState(from))?;
            let t = aut.state_by_label(to).ok_or(ModelError::UnknownState(to))?;
            let a = aut
                .action_by_name(action)
                .ok_or_else(|| ModelError::UnknownAction(action.to_string()))?;
            Ok((q, a, t))
        };
        for p in &doc.probabilities {
            let key = resolve(p.from, &p.action, p.to)?;
            if model.probs.insert(key, parse_rational(&p.prob)?).is_some() {
                return Err(ModelError::Duplicate(format!("probability ({}, {}, {})", p.from, p.action, p.to)));
            }
        }
        for r in &doc.rewards {
            let key = resolve(r.from, &r.action, r.to)?;
            if model.rewards.insert(key, parse_rational(&r.reward)?).is_some() {
                return Err(ModelError::Duplicate(format!("reward ({}, {}, {})", r.from, r.action, r.to)));
            }
        }
        Ok(model)
    }

    pub fn from_json(aut: &ParityAutomaton, text: &str) -> Result<Self, ModelError> {
        let doc: HiddenDoc = serde_json::from_str(text).map_err(ModelError::Json)?;
        Self::from_doc(aut, &doc)
    }

    pub fn to_doc(&self, aut: &ParityAutomaton) -> HiddenDoc {
        let key = |&(q, a, t): &Triple| (aut.state_label(q), aut.action_name(a).to_string(), aut.state_label(t));
        HiddenDoc {
            probabilities: self
                .probs
                .iter()
                .map(|(k, p)| {
                    let (from, action, to) = key(k);
                    ProbabilityDoc { from, action, to, prob: format_rational(p) }
                })
                .collect(),
            rewards: self
                .rewards
                .iter()
                .map(|(k, r)| {
                    let (from, action, to) = key(k);
                    RewardDoc { from, action, to, reward: format_rational(r) }
                })
                .collect(),
        }
    }

    pub fn to_json(&self, aut: &ParityAutomaton) -> String {
        serde_json::to_string_pretty(&self.to_doc(aut)).expect("hidden model serializes")
    }

    /// Restricts to the given state set, renaming through `origin` (new index to old).
    pub fn restrict(&self, origin: &[StateId]) -> Self {
        let mut new_index = BTreeMap::new();
        for (i, q) in origin.iter().enumerate() {
            new_index.insert(*q, StateId(i));
        }
        let map = |&(q, a, t): &Triple| Some((*new_index.get(&q)?, a, *new_index.get(&t)?));
        Self {
            probs: self.probs.iter().filter_map(|(k, v)| Some((map(k)?, v.clone()))).collect(),
            rewards: self.rewards.iter().filter_map(|(k, v)| Some((map(k)?, v.clone()))).collect(),
        }
    }

    /// Largest reward over all triples.
    pub fn max_reward(&self) -> f64 {
        self.rewards.values().map(rational_to_f64).fold(0.0, f64::max)
    }
}

/// Checks that `hidden` is compatible with `aut`: equal supports, nonzero
/// probabilities at least `pi_min`, rows summing to one and rewards defined
/// exactly on the support with values in `[0, 1]`.
pub fn validate_compatibility(aut: &ParityAutomaton, hidden: &HiddenModel) -> Result<(), ModelError> {
    let name = |(q, a, t): Triple| format!("({}, {}, {})", aut.state_label(q), aut.action_name(a), aut.state_label(t));
    for (&(q, a, t), p) in &hidden.probs {
        if q.0 >= aut.n_states() || t.0 >= aut.n_states() || a.0 >= aut.n_actions() {
            return Err(ModelError::SupportMismatch(format!("{q}, {a}, {t} out of range")));
        }
        if p < &BigRational::zero() {
            return Err(ModelError::NotStochastic(format!("negative probability at {}", name((q, a, t)))));
        }
        if !p.is_zero() && !aut.has_transition(q, a, t) {
            return Err(ModelError::SupportMismatch(format!("{} has probability but is not a transition", name((q, a, t)))));
        }
    }
    for q in aut.states() {
        for a in (0..aut.n_actions()).map(ActionId) {
            let succ = aut.successors(q, a);
            let mut total = BigRational::zero();
            for &t in succ {
                let p = hidden.prob(q, a, t).cloned().unwrap_or_else(BigRational::zero);
                if p.is_zero() {
                    return Err(ModelError::SupportMismatch(format!("transition {} has probability 0", name((q, a, t)))));
                }
                if &p < aut.pi_min() {
                    return Err(ModelError::BelowPiMin {
                        transition: name((q, a, t)),
                        prob: format_rational(&p),
                        pi_min: format_rational(aut.pi_min()),
                    });
                }
                total += p;
            }
            if !succ.is_empty() && !total.is_one() {
                return Err(ModelError::NotStochastic(format!(
                    "distribution of ({}, {}) sums to {}",
                    aut.state_label(q),
                    aut.action_name(a),
                    format_rational(&total)
                )));
            }
        }
    }
    let support: BTreeSet<Triple> = aut.transitions().collect();
    for (&k, r) in &hidden.rewards {
        if !support.contains(&k) {
            return Err(ModelError::Reward(format!("reward given outside the support at {}", name(k))));
        }
        if r < &BigRational::zero() || r > &BigRational::one() {
            return Err(ModelError::Reward(format!("reward {} at {} outside [0,1]", format_rational(r), name(k))));
        }
    }
    if let Some(&k) = support.iter().find(|k| !hidden.rewards.contains_key(k)) {
        return Err(ModelError::Reward(format!("missing reward at {}", name(k))));
    }
    Ok(())
}
