use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::{ActionId, ParityAutomaton, StateId};

/// One observed step of a run: in `state`, `action` was played, `reward`
/// was received and the run moved to `next`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub state: StateId,
    pub action: ActionId,
    pub reward: f64,
    pub next: StateId,
}

/// Distribution over actions returned by a machine's output function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionDist<'a> {
    Dirac(ActionId),
    /// Uniform over a nonempty slice of distinct actions.
    Uniform(&'a [ActionId]),
}

impl ActionDist<'_> {
    pub fn support_len(&self) -> usize {
        match self {
            ActionDist::Dirac(_) => 1,
            ActionDist::Uniform(s) => s.len(),
        }
    }

    pub fn actions(&self) -> Vec<ActionId> {
        match *self {
            ActionDist::Dirac(a) => vec![a],
            ActionDist::Uniform(s) => s.to_vec(),
        }
    }

    /// Picks an action given a uniform draw `u` in `[0, 1)`.
    pub fn pick(&self, u: f64) -> ActionId {
        match *self {
            ActionDist::Dirac(a) => a,
            ActionDist::Uniform(s) => {
                let i = ((u * s.len() as f64) as usize).min(s.len() - 1);
                s[i]
            }
        }
    }
}

/// Coarse description of what a machine is currently doing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Learning,
    Optimizing,
    Exploring,
    Reaching,
    Winning,
    Fallback,
}

/// A stochastic Mealy machine over an automaton.
///
/// The machine itself is immutable; all run-dependent state lives in
/// `Memory`. The output for a memory/state pair must only put weight on
/// actions enabled at that state.
pub trait MealyMachine {
    type Memory: Clone + Eq + Hash + Debug;

    fn initial_memory(&self) -> Self::Memory;

    fn output<'a>(&'a self, memory: &Self::Memory, state: StateId) -> ActionDist<'a>;

    fn update(&self, memory: &mut Self::Memory, step: &Step);

    fn phase(&self, memory: &Self::Memory) -> Phase;

    /// Whether the set of memories reachable from the initial one is finite.
    fn is_finite(&self) -> bool;
}

/// Memoryless deterministic machine: one fixed action per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Memoryless {
    choice: Vec<ActionId>,
    phase: Phase,
}

impl Memoryless {
    pub fn new(choice: Vec<ActionId>) -> Self {
        Self { choice, phase: Phase::Winning }
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn choices(&self) -> &[ActionId] {
        &self.choice
    }

    /// Checks that every chosen action is enabled.
    pub fn is_valid_for(&self, aut: &ParityAutomaton) -> bool {
        self.choice.len() == aut.n_states()
            && aut.states().all(|q| aut.is_enabled(q, self.choice[q.0]))
    }
}

impl MealyMachine for Memoryless {
    type Memory = ();

    fn initial_memory(&self) {}

    fn output<'a>(&'a self, _memory: &(), state: StateId) -> ActionDist<'a> {
        ActionDist::Dirac(self.choice[state.0])
    }

    fn update(&self, _memory: &mut (), _step: &Step) {}

    fn phase(&self, _memory: &()) -> Phase {
        self.phase
    }

    fn is_finite(&self) -> bool {
        true
    }
}

/// Memoryless randomized machine: uniform over a fixed action set per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformMemoryless {
    choices: Vec<Vec<ActionId>>,
}

impl UniformMemoryless {
    pub fn new(choices: Vec<Vec<ActionId>>) -> Self {
        assert!(choices.iter().all(|c| !c.is_empty()));
        Self { choices }
    }

    pub fn over_enabled(aut: &ParityAutomaton) -> Self {
        Self::new(aut.states().map(|q| aut.enabled(q).to_vec()).collect())
    }
}

impl MealyMachine for UniformMemoryless {
    type Memory = ();

    fn initial_memory(&self) {}

    fn output<'a>(&'a self, _memory: &(), state: StateId) -> ActionDist<'a> {
        let c = &self.choices[state.0];
        if c.len() == 1 {
            ActionDist::Dirac(c[0])
        } else {
            ActionDist::Uniform(c)
        }
    }

    fn update(&self, _memory: &mut (), _step: &Step) {}

    fn phase(&self, _memory: &()) -> Phase {
        Phase::Exploring
    }

    fn is_finite(&self) -> bool {
        true
    }
}

/// Truncates a reward to `bits` fractional binary digits, as stored in
/// finite strategy memory.
pub fn truncate_reward(reward: f64, bits: u32) -> u64 {
    let scale = (bits as f64).exp2();
    (reward.clamp(0.0, 1.0) * scale).floor() as u64
}

pub fn untruncate_reward(stored: u64, bits: u32) -> f64 {
    stored as f64 / (bits as f64).exp2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_pick_covers_support() {
        let acts = [ActionId(0), ActionId(2), ActionId(5)];
        let d = ActionDist::Uniform(&acts);
        assert_eq!(d.pick(0.0), ActionId(0));
        assert_eq!(d.pick(0.5), ActionId(2));
        assert_eq!(d.pick(0.999_999), ActionId(5));
    }

    #[test]
    fn truncation_is_monotone_and_tight() {
        for &r in &[0.0, 0.1, 0.3333, 0.5, 0.99, 1.0] {
            let t = truncate_reward(r, 32);
            let back = untruncate_reward(t, 32);
            assert!(back <= r && r - back < 2f64.powi(-32));
        }
        assert_eq!(truncate_reward(0.75, 1), 1);
    }
}
