use crate::learn::{mixing_horizon, robust_accuracy, ObservationLog, Sizing};
use crate::model::{ActionDist, MealyMachine, Phase, StateId, Step};

use super::scope::{learned_policy, Policy, Scope};
use super::StrategyError;

/// Learn for a fixed number of steps, then play a learned optimal strategy
/// forever.
#[derive(Clone, Debug)]
pub struct SigmaFin {
    pub(crate) scope: Scope,
    pub learning_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SigmaFinMemory {
    Learning { log: ObservationLog, step: u64 },
    Optimizing(Policy),
}

impl SigmaFin {
    pub(crate) fn new(scope: Scope, epsilon: f64, gamma: f64, sizing: &Sizing) -> Result<Self, StrategyError> {
        let epsilon = super::check_unit("epsilon", epsilon)?;
        let gamma = super::check_unit("gamma", gamma)?;
        let pi = scope.pi_min();
        let accuracy = robust_accuracy(epsilon, pi, scope.n_states)?.min(pi).min(0.999_999);
        let learning_steps = sizing.learning_steps(scope.n_states, scope.n_actions, pi, accuracy, gamma, 0)?;
        Ok(Self { scope, learning_steps })
    }
}

impl MealyMachine for SigmaFin {
    type Memory = SigmaFinMemory;

    fn initial_memory(&self) -> SigmaFinMemory {
        SigmaFinMemory::Learning { log: self.scope.fresh_log(), step: 0 }
    }

    fn output<'a>(&'a self, memory: &SigmaFinMemory, state: StateId) -> ActionDist<'a> {
        match memory {
            SigmaFinMemory::Learning { .. } => uniform(&self.scope.beta[state.0]),
            SigmaFinMemory::Optimizing(p) => ActionDist::Dirac(p.action(state)),
        }
    }

    fn update(&self, memory: &mut SigmaFinMemory, step: &Step) {
        if let SigmaFinMemory::Learning { log, step: k } = memory {
            let _ = log.record_step(step.state, step.action, step.reward, step.next);
            *k += 1;
            if *k >= self.learning_steps {
                let (policy, _) = learned_policy(&self.scope, log);
                *memory = SigmaFinMemory::Optimizing(policy);
            }
        }
    }

    fn phase(&self, memory: &SigmaFinMemory) -> Phase {
        match memory {
            SigmaFinMemory::Learning { .. } => Phase::Learning,
            SigmaFinMemory::Optimizing(_) => Phase::Optimizing,
        }
    }

    fn is_finite(&self) -> bool {
        true
    }
}

pub(crate) fn uniform(actions: &[crate::model::ActionId]) -> ActionDist<'_> {
    if actions.len() == 1 {
        ActionDist::Dirac(actions[0])
    } else {
        ActionDist::Uniform(actions)
    }
}

/// Learn, then alternate a learned optimal strategy for a block of steps
/// with one exploration round of `|S|` steps, forever.
///
/// The exploration rounds make every state of the (good) component recur,
/// so the parity objective holds almost surely, while the long optimizing
/// blocks keep the average close to optimal.
#[derive(Clone, Debug)]
pub struct TauFin {
    pub(crate) scope: Scope,
    pub epsilon: f64,
    pub learning_steps: u64,
    /// Steps after which running averages are within `epsilon / 4`.
    pub mixing_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TauFinMemory {
    Learning { log: ObservationLog, step: u64 },
    /// Position `counter` in a cycle of `block` optimizing steps followed by
    /// `|S|` exploring steps.
    Looping { policy: Policy, block: u64, counter: u64 },
}

impl TauFin {
    pub(crate) fn new(scope: Scope, epsilon: f64, gamma: f64, sizing: &Sizing) -> Result<Self, StrategyError> {
        let epsilon = super::check_unit("epsilon", epsilon)?;
        let gamma = super::check_unit("gamma", gamma)?;
        let pi = scope.pi_min();
        let accuracy = robust_accuracy(epsilon / 4.0, pi, scope.n_states)?.min(pi).min(0.999_999);
        let learning_steps = sizing.learning_steps(scope.n_states, scope.n_actions, pi, accuracy, gamma, 0)?;
        let mixing = sizing.mixing_for(scope.n_states, pi);
        let mixing_steps = mixing_horizon(epsilon / 4.0, &mixing)?;
        Ok(Self { scope, epsilon, learning_steps, mixing_steps })
    }

    /// Optimizing block length for largest observed reward `r_max`:
    /// `M(eps/4) + max(0, ceil(4 |S| (r_max - eps/2) / eps))`.
    pub fn block_length(&self, r_max: f64) -> u64 {
        let extra = crate::learn::ceil_tol(4.0 * self.scope.n_states as f64 * (r_max - self.epsilon / 2.0) / self.epsilon);
        self.mixing_steps.saturating_add(extra.max(0.0) as u64)
    }

    /// Memory right after learning produced `policy` with largest observed
    /// reward `r_max`.
    pub fn looping_memory(&self, policy: Policy, r_max: f64) -> TauFinMemory {
        TauFinMemory::Looping { policy, block: self.block_length(r_max), counter: 0 }
    }

    pub fn scope_states(&self) -> std::collections::BTreeSet<StateId> {
        self.scope.states()
    }

    /// Actions the machine may play at `q`.
    pub fn actions(&self, q: StateId) -> &[crate::model::ActionId] {
        &self.scope.beta[q.0]
    }
}

impl MealyMachine for TauFin {
    type Memory = TauFinMemory;

    fn initial_memory(&self) -> TauFinMemory {
        TauFinMemory::Learning { log: self.scope.fresh_log(), step: 0 }
    }

    fn output<'a>(&'a self, memory: &TauFinMemory, state: StateId) -> ActionDist<'a> {
        match memory {
            TauFinMemory::Looping { policy, block, counter } if counter < block => ActionDist::Dirac(policy.action(state)),
            _ => uniform(&self.scope.beta[state.0]),
        }
    }

    fn update(&self, memory: &mut TauFinMemory, step: &Step) {
        match memory {
            TauFinMemory::Learning { log, step: k } => {
                let _ = log.record_step(step.state, step.action, step.reward, step.next);
                *k += 1;
                if *k >= self.learning_steps {
                    let r_max = log.max_observed_reward(Some(&self.scope.allowed));
                    let (policy, _) = learned_policy(&self.scope, log);
                    *memory = self.looping_memory(policy, r_max);
                }
            }
            TauFinMemory::Looping { block, counter, .. } => {
                *counter += 1;
                if *counter >= *block + self.scope.n_states as u64 {
                    *counter = 0;
                }
            }
        }
    }

    fn phase(&self, memory: &TauFinMemory) -> Phase {
        match memory {
            TauFinMemory::Learning { .. } => Phase::Learning,
            TauFinMemory::Looping { block, counter, .. } if counter < block => Phase::Optimizing,
            TauFinMemory::Looping { .. } => Phase::Exploring,
        }
    }

    fn is_finite(&self) -> bool {
        true
    }
}
