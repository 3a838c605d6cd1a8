use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use super::LearnError;
use crate::model::rational::rational_to_f64;
use crate::model::{truncate_reward, untruncate_reward, ActionId, ParityAutomaton, StateId, UniformMemoryless};
use crate::solver::{Choice, Mdp};

/// Default number of fractional bits kept for observed rewards.
pub const DEFAULT_REWARD_BITS: u32 = 32;

/// Dense indexing of the state-action pairs and transitions of an automaton.
#[derive(Debug, PartialEq, Eq)]
pub struct LogLayout {
    n_actions: usize,
    /// `q * n_actions + a` to pair index, `usize::MAX` when not enabled.
    pair_index: Vec<usize>,
    pairs: Vec<(StateId, ActionId)>,
    /// First triple index of each pair; the last entry is the total.
    offsets: Vec<usize>,
    successors: Vec<Vec<StateId>>,
    reward_bits: u32,
}

impl LogLayout {
    pub fn new(aut: &ParityAutomaton, reward_bits: u32) -> Self {
        let m = aut.n_actions();
        let mut pair_index = vec![usize::MAX; aut.n_states() * m];
        let mut pairs = Vec::new();
        let mut offsets = vec![0];
        let mut successors = Vec::new();
        for q in aut.states() {
            for &a in aut.enabled(q) {
                pair_index[q.0 * m + a.0] = pairs.len();
                pairs.push((q, a));
                let succ = aut.successors(q, a).to_vec();
                offsets.push(offsets.last().unwrap() + succ.len());
                successors.push(succ);
            }
        }
        Self { n_actions: m, pair_index, pairs, offsets, successors, reward_bits }
    }

    fn pair(&self, q: StateId, a: ActionId) -> Option<usize> {
        let i = *self.pair_index.get(q.0 * self.n_actions + a.0)?;
        (a.0 < self.n_actions && i != usize::MAX).then_some(i)
    }

    fn triple(&self, pair: usize, t: StateId) -> Option<usize> {
        self.successors[pair].binary_search(&t).ok().map(|k| self.offsets[pair] + k)
    }

    pub fn reward_bits(&self) -> u32 {
        self.reward_bits
    }

    fn n_triples(&self) -> usize {
        *self.offsets.last().unwrap()
    }
}

/// Counts of experiments per state-action pair and outcomes per transition,
/// with the (truncated) reward seen on each transition.
///
/// Equality and hashing only look at the counters, so two logs over the same
/// automaton compare by content.
#[derive(Clone, Debug)]
pub struct ObservationLog {
    layout: Arc<LogLayout>,
    trials: Vec<u64>,
    counts: Vec<u64>,
    rewards: Vec<Option<u64>>,
}

impl PartialEq for ObservationLog {
    fn eq(&self, other: &Self) -> bool {
        self.trials == other.trials && self.counts == other.counts && self.rewards == other.rewards
    }
}

impl Eq for ObservationLog {}

impl Hash for ObservationLog {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.counts.hash(state);
        self.rewards.hash(state);
    }
}

impl ObservationLog {
    pub fn new(aut: &ParityAutomaton) -> Self {
        Self::with_layout(Arc::new(LogLayout::new(aut, DEFAULT_REWARD_BITS)))
    }

    pub fn with_layout(layout: Arc<LogLayout>) -> Self {
        let pairs = layout.pairs.len();
        let triples = layout.n_triples();
        Self { layout, trials: vec![0; pairs], counts: vec![0; triples], rewards: vec![None; triples] }
    }

    pub fn layout(&self) -> &Arc<LogLayout> {
        &self.layout
    }

    /// Records that playing `a` in `q` gave `reward` and led to `next`.
    pub fn record_step(&mut self, q: StateId, a: ActionId, reward: f64, next: StateId) -> Result<(), LearnError> {
        let pair = self.layout.pair(q, a).ok_or(LearnError::NotInSupport(q, a, next))?;
        let t = self.layout.triple(pair, next).ok_or(LearnError::NotInSupport(q, a, next))?;
        let stored = truncate_reward(reward, self.layout.reward_bits);
        match self.rewards[t] {
            Some(old) if old != stored => {
                return Err(LearnError::RewardMismatch {
                    transition: (q, a, next),
                    first: untruncate_reward(old, self.layout.reward_bits),
                    now: reward,
                })
            }
            Some(_) => {}
            None => self.rewards[t] = Some(stored),
        }
        self.trials[pair] += 1;
        self.counts[t] += 1;
        Ok(())
    }

    pub fn trials(&self, q: StateId, a: ActionId) -> u64 {
        self.layout.pair(q, a).map(|p| self.trials[p]).unwrap_or(0)
    }

    pub fn count(&self, q: StateId, a: ActionId, t: StateId) -> u64 {
        self.layout
            .pair(q, a)
            .and_then(|p| self.layout.triple(p, t))
            .map(|i| self.counts[i])
            .unwrap_or(0)
    }

    pub fn observed_reward(&self, q: StateId, a: ActionId, t: StateId) -> Option<f64> {
        let p = self.layout.pair(q, a)?;
        let i = self.layout.triple(p, t)?;
        self.rewards[i].map(|r| untruncate_reward(r, self.layout.reward_bits))
    }

    /// Total number of recorded steps.
    pub fn total(&self) -> u64 {
        self.trials.iter().sum()
    }

    fn in_scope(scope: Option<&BTreeMap<StateId, Vec<ActionId>>>, q: StateId, a: ActionId) -> bool {
        scope.is_none_or(|s| s.get(&q).is_some_and(|acts| acts.contains(&a)))
    }

    /// Whether every transition of the pairs in `scope` was seen.
    pub fn is_complete_on(&self, scope: Option<&BTreeMap<StateId, Vec<ActionId>>>) -> bool {
        self.layout.pairs.iter().enumerate().all(|(p, &(q, a))| {
            !Self::in_scope(scope, q, a) || (self.layout.offsets[p]..self.layout.offsets[p + 1]).all(|i| self.counts[i] > 0)
        })
    }

    /// Largest observed reward on pairs in `scope`, 0 when nothing was seen.
    pub fn max_observed_reward(&self, scope: Option<&BTreeMap<StateId, Vec<ActionId>>>) -> f64 {
        let mut best = 0.0f64;
        for (p, &(q, a)) in self.layout.pairs.iter().enumerate() {
            if Self::in_scope(scope, q, a) {
                for i in self.layout.offsets[p]..self.layout.offsets[p + 1] {
                    if let Some(r) = self.rewards[i] {
                        best = best.max(untruncate_reward(r, self.layout.reward_bits));
                    }
                }
            }
        }
        best
    }

    /// Floating point model of the pairs in `scope` (all pairs when `None`).
    ///
    /// Without `complete`, an unseen transition is an error. With it, every
    /// unseen transition gets one extra pseudo-observation with reward 0,
    /// so untried pairs become uniform over their support.
    pub fn to_mdp(
        &self,
        aut: &ParityAutomaton,
        scope: Option<&BTreeMap<StateId, Vec<ActionId>>>,
        complete: bool,
    ) -> Result<Mdp, LearnError> {
        let mut choices: Vec<Vec<Choice>> = vec![Vec::new(); aut.n_states()];
        for (p, &(q, a)) in self.layout.pairs.iter().enumerate() {
            if !Self::in_scope(scope, q, a) {
                continue;
            }
            let range = self.layout.offsets[p]..self.layout.offsets[p + 1];
            let unseen = range.clone().filter(|&i| self.counts[i] == 0).count() as u64;
            if unseen > 0 && !complete {
                return Err(LearnError::Incomplete(q, a));
            }
            let total = (self.trials[p] + unseen) as f64;
            let outcomes = range
                .zip(&self.layout.successors[p])
                .map(|(i, t)| {
                    let c = self.counts[i].max(1) as f64;
                    let r = self.rewards[i].map(|r| untruncate_reward(r, self.layout.reward_bits)).unwrap_or(0.0);
                    (t.0, c / total, r)
                })
                .collect();
            choices[q.0].push(Choice::new(a, outcomes));
        }
        Ok(Mdp::new(choices, aut.priorities().to_vec()))
    }
}

/// Empirical transition function and observed rewards.
#[derive(Clone, Debug, PartialEq)]
pub struct LearnedModel {
    /// Empirical distribution per tried pair, in successor order.
    pub delta_hat: BTreeMap<(StateId, ActionId), Vec<(StateId, BigRational)>>,
    pub r_hat: BTreeMap<(StateId, ActionId, StateId), f64>,
    pub support_complete: bool,
}

impl LearnedModel {
    pub fn prob(&self, q: StateId, a: ActionId, t: StateId) -> Option<&BigRational> {
        self.delta_hat.get(&(q, a))?.iter().find(|(s, _)| *s == t).map(|(_, p)| p)
    }

    /// Largest absolute difference to `reference` over all transitions of
    /// tried pairs, or `None` if some pair of `aut` was never tried.
    pub fn max_deviation(&self, aut: &ParityAutomaton, reference: impl Fn(StateId, ActionId, StateId) -> f64) -> Option<f64> {
        let mut worst = 0.0f64;
        for q in aut.states() {
            for &a in aut.enabled(q) {
                let row = self.delta_hat.get(&(q, a))?;
                for &t in aut.successors(q, a) {
                    let p = row.iter().find(|(s, _)| *s == t).map(|(_, p)| rational_to_f64(p)).unwrap_or(0.0);
                    worst = worst.max((p - reference(q, a, t)).abs());
                }
            }
        }
        Some(worst)
    }
}

/// Empirical model from a log: `counts / trials` on every tried pair.
pub fn estimate_model(log: &ObservationLog, aut: &ParityAutomaton) -> LearnedModel {
    let mut delta_hat = BTreeMap::new();
    let mut r_hat = BTreeMap::new();
    let mut complete = true;
    for q in aut.states() {
        for &a in aut.enabled(q) {
            let trials = log.trials(q, a);
            let mut row = Vec::new();
            for &t in aut.successors(q, a) {
                let c = log.count(q, a, t);
                if c == 0 {
                    complete = false;
                    continue;
                }
                if let Some(r) = log.observed_reward(q, a, t) {
                    r_hat.insert((q, a, t), r);
                }
                row.push((t, BigRational::new(c.into(), trials.into())));
            }
            if trials > 0 {
                debug_assert!(row.iter().fold(BigRational::zero(), |s, (_, p)| s + p) == BigRational::from_integer(1.into()));
                delta_hat.insert((q, a), row);
            }
        }
    }
    LearnedModel { delta_hat, r_hat, support_complete: complete }
}

/// Uniform exploration over the allowed actions: `beta` lists them per
/// state; states absent from `beta` use all enabled actions.
pub fn exploration_strategy(
    aut: &ParityAutomaton,
    beta: &BTreeMap<StateId, Vec<ActionId>>,
) -> Result<UniformMemoryless, LearnError> {
    let mut choices = Vec::with_capacity(aut.n_states());
    for q in aut.states() {
        let acts = match beta.get(&q) {
            Some(acts) => acts.clone(),
            None => aut.enabled(q).to_vec(),
        };
        if acts.is_empty() {
            return Err(LearnError::EmptyActions(q));
        }
        if let Some(&a) = acts.iter().find(|&&a| !aut.is_enabled(q, a)) {
            return Err(LearnError::NotEnabled(q, a));
        }
        choices.push(acts);
    }
    Ok(UniformMemoryless::new(choices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::examples::{fig1_right, Fig1RightParams};
    use crate::model::{ActionDist, MealyMachine};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn record_and_estimate() {
        let inst = fig1_right(&Fig1RightParams::default()).unwrap();
        let aut = &inst.automaton;
        let (q0, q3, q4, a) = (StateId(0), StateId(3), StateId(4), ActionId(0));
        let mut log = ObservationLog::new(aut);
        log.record_step(q0, a, 0.0, q3).unwrap();
        assert_eq!((log.trials(q0, a), log.count(q0, a, q3)), (1, 1));
        log.record_step(q0, a, 0.0, q3).unwrap();
        assert_eq!(log.count(q0, a, q3), 2);
        assert!(log.record_step(q0, a, 0.5, q3).is_err());
        assert!(log.record_step(q0, a, 0.0, StateId(1)).is_err());
        for _ in 0..5 {
            log.record_step(q0, a, 0.0, q3).unwrap();
        }
        for _ in 0..3 {
            log.record_step(q0, a, 1.0, q4).unwrap();
        }
        let m = estimate_model(&log, aut);
        assert_eq!(m.prob(q0, a, q3), Some(&r(7, 10)));
        assert!(!m.support_complete);
        assert!(!m.delta_hat.contains_key(&(q0, ActionId(1))));
        assert_eq!(log.max_observed_reward(None), 1.0);
    }

    #[test]
    fn completion_makes_untried_rows_uniform() {
        let inst = fig1_right(&Fig1RightParams::default()).unwrap();
        let aut = &inst.automaton;
        let log = ObservationLog::new(aut);
        assert!(log.to_mdp(aut, None, false).is_err());
        let mdp = log.to_mdp(aut, None, true).unwrap();
        let c = mdp.choice(0, ActionId(1)).unwrap();
        assert_eq!(c.outcomes.iter().map(|o| o.1).collect::<Vec<_>>(), vec![0.5, 0.5]);
        assert_eq!(c.mean_reward, 0.0);
    }

    #[test]
    fn exploration_is_uniform_on_beta() {
        let inst = fig1_right(&Fig1RightParams::default()).unwrap();
        let aut = &inst.automaton;
        let mut beta = BTreeMap::new();
        beta.insert(StateId(0), vec![ActionId(1)]);
        let lambda = exploration_strategy(aut, &beta).unwrap();
        assert_eq!(lambda.output(&(), StateId(0)), ActionDist::Dirac(ActionId(1)));
        let lambda = exploration_strategy(aut, &BTreeMap::new()).unwrap();
        assert_eq!(lambda.output(&(), StateId(0)).support_len(), 2);
        beta.insert(StateId(1), vec![]);
        assert!(exploration_strategy(aut, &beta).is_err());
    }
}
