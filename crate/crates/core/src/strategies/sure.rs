use std::sync::Arc;

use crate::graphs::{maximal_good_components, mec_decomposition, EndComponent};
use crate::learn::{
    monitor_plan, robust_accuracy, schedule_sigma_infinity, zeta_lb, EpsilonSeq, ObservationLog, Sizing,
};
use crate::model::{ActionDist, ActionId, MealyMachine, ParityAutomaton, Phase, StateId, Step};

use super::fin::uniform;
use super::infinite::{SigmaInfinity, SureGec, SureGecMemory};
use super::scope::{best_component, learned_policy, Scope};
use super::StrategyError;

/// Builds the monitored unbounded strategy for the good component `gec`.
pub(crate) fn sure_gec_in(
    aut: &Arc<ParityAutomaton>,
    gec: &EndComponent,
    gamma: f64,
    sizing: &Sizing,
    winning: Vec<ActionId>,
) -> Result<SureGec, StrategyError> {
    let scope = Scope::new(aut.clone(), gec, sizing.reward_bits);
    let pi = scope.pi_min();
    let schedule = schedule_sigma_infinity(scope.n_states, scope.n_actions, pi, EpsilonSeq::default(), sizing)?;
    let plan = monitor_plan(scope.n_states, scope.n_actions, pi, gamma)?;
    let targets = gec.min_priority_states(aut);
    Ok(SureGec::new(SigmaInfinity::new(scope, schedule), plan, winning, &targets))
}

/// Inside a surely good end component: learn, pick the good sub-component
/// with the best learned value, try to reach it within a budget, then run
/// the monitored strategy there. Any failure switches to the winning
/// strategy forever.
#[derive(Clone, Debug)]
pub struct SureSingleEc {
    pub(crate) scope: Scope,
    pub learning_steps: u64,
    pub reach_budget: u64,
    pub candidates: Vec<EndComponent>,
    candidate_scopes: Vec<Scope>,
    pub inner: Vec<SureGec>,
    pub winning: Vec<ActionId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SureSingleMemory {
    Learning { log: ObservationLog, step: u64 },
    Reaching { gec: usize, step: u64 },
    Inner { gec: usize, memory: SureGecMemory },
    Fallback,
}

impl SureSingleEc {
    pub(crate) fn new(
        aut: &Arc<ParityAutomaton>,
        mec: &EndComponent,
        epsilon: f64,
        gamma: f64,
        sizing: &Sizing,
        winning: Vec<ActionId>,
    ) -> Result<Self, StrategyError> {
        super::check_unit("epsilon", epsilon)?;
        super::check_unit("gamma", gamma)?;
        let scope = Scope::new(aut.clone(), mec, sizing.reward_bits);
        let pi = scope.pi_min();
        let accuracy = robust_accuracy(epsilon / 2.0, pi, scope.n_states)?.min(pi).min(0.999_999);
        let learning_steps = sizing.learning_steps(scope.n_states, scope.n_actions, pi, accuracy, gamma / 4.0, 0)?;
        let mu = zeta_lb(pi, scope.n_actions, scope.n_states);
        let rounds = if mu >= 1.0 { 1.0 } else { crate::learn::ceil_tol((gamma / 4.0).ln() / (-mu).ln_1p()).max(1.0) };
        let reach_budget = (rounds * scope.n_states as f64).min(u64::MAX as f64) as u64;
        let candidates = maximal_good_components(aut, mec);
        let candidate_scopes = candidates.iter().map(|g| Scope::new(aut.clone(), g, sizing.reward_bits)).collect();
        let inner = candidates
            .iter()
            .map(|g| sure_gec_in(aut, g, gamma / 4.0, sizing, winning.clone()))
            .collect::<Result<_, _>>()?;
        Ok(Self { scope, learning_steps, reach_budget, candidates, candidate_scopes, inner, winning })
    }

    /// Index of the candidate with the best value in the learned model.
    pub fn select(&self, log: &ObservationLog) -> Option<usize> {
        let values: Vec<f64> = self.candidate_scopes.iter().map(|s| learned_policy(s, log).1).collect();
        best_component(&self.candidates, &values)
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.scope.contains(q)
    }

    fn enter(&self, gec: usize, q: StateId) -> SureSingleMemory {
        if self.candidates[gec].contains(q) {
            SureSingleMemory::Inner { gec, memory: self.inner[gec].initial_memory() }
        } else {
            SureSingleMemory::Reaching { gec, step: 0 }
        }
    }
}

impl MealyMachine for SureSingleEc {
    type Memory = SureSingleMemory;

    fn initial_memory(&self) -> SureSingleMemory {
        if self.candidates.is_empty() {
            SureSingleMemory::Fallback
        } else {
            SureSingleMemory::Learning { log: self.scope.fresh_log(), step: 0 }
        }
    }

    fn output<'a>(&'a self, memory: &SureSingleMemory, state: StateId) -> ActionDist<'a> {
        match memory {
            SureSingleMemory::Learning { .. } | SureSingleMemory::Reaching { .. } => uniform(&self.scope.beta[state.0]),
            SureSingleMemory::Inner { gec, memory } => self.inner[*gec].output(memory, state),
            SureSingleMemory::Fallback => ActionDist::Dirac(self.winning[state.0]),
        }
    }

    fn update(&self, memory: &mut SureSingleMemory, step: &Step) {
        match memory {
            SureSingleMemory::Learning { log, step: k } => {
                let _ = log.record_step(step.state, step.action, step.reward, step.next);
                *k += 1;
                if *k >= self.learning_steps {
                    *memory = if !log.is_complete_on(Some(&self.scope.allowed)) {
                        SureSingleMemory::Fallback
                    } else {
                        match self.select(log) {
                            Some(g) => self.enter(g, step.next),
                            None => SureSingleMemory::Fallback,
                        }
                    };
                }
            }
            SureSingleMemory::Reaching { gec, step: k } => {
                *k += 1;
                let g = *gec;
                if self.candidates[g].contains(step.next) {
                    *memory = SureSingleMemory::Inner { gec: g, memory: self.inner[g].initial_memory() };
                } else if *k >= self.reach_budget {
                    *memory = SureSingleMemory::Fallback;
                }
            }
            SureSingleMemory::Inner { gec, memory: m } => {
                self.inner[*gec].update(m, step);
                if *m == SureGecMemory::Fallback {
                    *memory = SureSingleMemory::Fallback;
                }
            }
            SureSingleMemory::Fallback => {}
        }
    }

    fn phase(&self, memory: &SureSingleMemory) -> Phase {
        match memory {
            SureSingleMemory::Learning { .. } => Phase::Learning,
            SureSingleMemory::Reaching { .. } => Phase::Reaching,
            SureSingleMemory::Inner { gec, memory } => self.inner[*gec].phase(memory),
            SureSingleMemory::Fallback => Phase::Fallback,
        }
    }

    fn is_finite(&self) -> bool {
        false
    }
}

/// Follows a uniform surely winning strategy and, on the first entry into
/// each weakly good maximal end component, tries the single-component
/// strategy there. Leaving the component (which only happens after its
/// fallback) marks it as visited.
#[derive(Clone, Debug)]
pub struct SureGeneral {
    pub winning: Vec<ActionId>,
    pub inner: Vec<SureSingleEc>,
    /// Index into `inner` of the weakly good component containing a state.
    component_of: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SureGeneralMemory {
    pub visited: Vec<bool>,
    pub active: Option<(usize, SureSingleMemory)>,
    /// Whether the last component attempt ended in its fallback.
    pub after_fallback: bool,
}

impl SureGeneral {
    pub(crate) fn new(
        aut: &Arc<ParityAutomaton>,
        epsilon: f64,
        gamma: f64,
        sizing: &Sizing,
        winning: Vec<ActionId>,
    ) -> Result<Self, StrategyError> {
        let mut component_of = vec![None; aut.n_states()];
        let mut inner = Vec::new();
        for mec in mec_decomposition(aut).mecs.iter().filter(|m| m.classification.contains_good()) {
            for &q in &mec.states {
                component_of[q.0] = Some(inner.len());
            }
            inner.push(SureSingleEc::new(aut, mec, epsilon, gamma, sizing, winning.clone())?);
        }
        Ok(Self { winning, inner, component_of })
    }

    fn fresh_entry(&self, memory: &SureGeneralMemory, q: StateId) -> Option<usize> {
        self.component_of[q.0].filter(|&i| !memory.visited[i])
    }
}

impl MealyMachine for SureGeneral {
    type Memory = SureGeneralMemory;

    fn initial_memory(&self) -> SureGeneralMemory {
        SureGeneralMemory { visited: vec![false; self.inner.len()], active: None, after_fallback: false }
    }

    fn output<'a>(&'a self, memory: &SureGeneralMemory, state: StateId) -> ActionDist<'a> {
        match &memory.active {
            Some((i, m)) => self.inner[*i].output(m, state),
            None => match self.fresh_entry(memory, state) {
                Some(i) => self.inner[i].output(&self.inner[i].initial_memory(), state),
                None => ActionDist::Dirac(self.winning[state.0]),
            },
        }
    }

    fn update(&self, memory: &mut SureGeneralMemory, step: &Step) {
        if memory.active.is_none() {
            if let Some(i) = self.fresh_entry(memory, step.state) {
                memory.active = Some((i, self.inner[i].initial_memory()));
                memory.after_fallback = false;
            }
        }
        if let Some((i, m)) = &mut memory.active {
            let i = *i;
            self.inner[i].update(m, step);
            if !self.inner[i].contains(step.next) {
                memory.after_fallback = *m == SureSingleMemory::Fallback;
                memory.visited[i] = true;
                memory.active = None;
            }
        }
    }

    fn phase(&self, memory: &SureGeneralMemory) -> Phase {
        match &memory.active {
            Some((i, m)) => self.inner[*i].phase(m),
            None if memory.after_fallback => Phase::Fallback,
            None => Phase::Winning,
        }
    }

    fn is_finite(&self) -> bool {
        false
    }
}
