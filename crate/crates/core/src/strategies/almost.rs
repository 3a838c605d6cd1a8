use std::sync::Arc;

use crate::graphs::{maximal_good_components, mec_decomposition, EndComponent};
use crate::learn::{robust_accuracy, ObservationLog, Sizing};
use crate::model::{ActionDist, ActionId, MealyMachine, ParityAutomaton, Phase, StateId, Step};

use super::fin::{uniform, TauFin, TauFinMemory};
use super::scope::{best_component, learned_policy, Scope};
use super::StrategyError;

/// Inside an almost-surely good end component: learn, pick the good
/// sub-component with the best learned value, explore until it is entered,
/// then run the finite-memory loop strategy there.
#[derive(Clone, Debug)]
pub struct AsSingleEc {
    pub(crate) scope: Scope,
    pub learning_steps: u64,
    pub candidates: Vec<EndComponent>,
    candidate_scopes: Vec<Scope>,
    pub inner: Vec<TauFin>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AsSingleMemory {
    Learning { log: ObservationLog, step: u64 },
    Reaching { gec: usize },
    Inner { gec: usize, memory: TauFinMemory },
}

impl AsSingleEc {
    pub(crate) fn new(
        aut: &Arc<ParityAutomaton>,
        mec: &EndComponent,
        epsilon: f64,
        gamma: f64,
        sizing: &Sizing,
    ) -> Result<Self, StrategyError> {
        super::check_unit("epsilon", epsilon)?;
        super::check_unit("gamma", gamma)?;
        let scope = Scope::new(aut.clone(), mec, sizing.reward_bits);
        let pi = scope.pi_min();
        let accuracy = robust_accuracy(epsilon / 4.0, pi, scope.n_states)?.min(pi).min(0.999_999);
        let learning_steps = sizing.learning_steps(scope.n_states, scope.n_actions, pi, accuracy, gamma / 2.0, 0)?;
        let candidates = maximal_good_components(aut, mec);
        if candidates.is_empty() {
            return Err(StrategyError::Precondition("end component contains no good sub-component".into()));
        }
        let candidate_scopes: Vec<Scope> =
            candidates.iter().map(|g| Scope::new(aut.clone(), g, sizing.reward_bits)).collect();
        let inner = candidate_scopes
            .iter()
            .map(|s| TauFin::new(s.clone(), epsilon / 2.0, gamma / 2.0, sizing))
            .collect::<Result<_, _>>()?;
        Ok(Self { scope, learning_steps, candidates, candidate_scopes, inner })
    }

    /// Index of the candidate with the best value in the learned model.
    pub fn select(&self, log: &ObservationLog) -> usize {
        let values: Vec<f64> = self.candidate_scopes.iter().map(|s| learned_policy(s, log).1).collect();
        best_component(&self.candidates, &values).expect("nonempty candidates")
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.scope.contains(q)
    }

    fn enter(&self, gec: usize, q: StateId) -> AsSingleMemory {
        if self.candidates[gec].contains(q) {
            AsSingleMemory::Inner { gec, memory: self.inner[gec].initial_memory() }
        } else {
            AsSingleMemory::Reaching { gec }
        }
    }
}

impl MealyMachine for AsSingleEc {
    type Memory = AsSingleMemory;

    fn initial_memory(&self) -> AsSingleMemory {
        AsSingleMemory::Learning { log: self.scope.fresh_log(), step: 0 }
    }

    fn output<'a>(&'a self, memory: &AsSingleMemory, state: StateId) -> ActionDist<'a> {
        match memory {
            AsSingleMemory::Inner { gec, memory } => self.inner[*gec].output(memory, state),
            _ => uniform(&self.scope.beta[state.0]),
        }
    }

    fn update(&self, memory: &mut AsSingleMemory, step: &Step) {
        match memory {
            AsSingleMemory::Learning { log, step: k } => {
                let _ = log.record_step(step.state, step.action, step.reward, step.next);
                *k += 1;
                if *k >= self.learning_steps {
                    let g = self.select(log);
                    *memory = self.enter(g, step.next);
                }
            }
            AsSingleMemory::Reaching { gec } => {
                let g = *gec;
                if self.candidates[g].contains(step.next) {
                    *memory = AsSingleMemory::Inner { gec: g, memory: self.inner[g].initial_memory() };
                }
            }
            AsSingleMemory::Inner { gec, memory } => self.inner[*gec].update(memory, step),
        }
    }

    fn phase(&self, memory: &AsSingleMemory) -> Phase {
        match memory {
            AsSingleMemory::Learning { .. } => Phase::Learning,
            AsSingleMemory::Reaching { .. } => Phase::Reaching,
            AsSingleMemory::Inner { gec, memory } => self.inner[*gec].phase(memory),
        }
    }

    fn is_finite(&self) -> bool {
        true
    }
}

/// Follows a uniform almost-surely winning strategy until a weakly good
/// maximal end component is reached, then runs the single-component
/// strategy there for good.
#[derive(Clone, Debug)]
pub struct AsGeneral {
    pub winning: Vec<ActionId>,
    pub inner: Vec<AsSingleEc>,
    component_of: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AsGeneralMemory {
    Following,
    Inside { component: usize, memory: AsSingleMemory },
}

impl AsGeneral {
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
            inner.push(AsSingleEc::new(aut, mec, epsilon, gamma, sizing)?);
        }
        Ok(Self { winning, inner, component_of })
    }
}

impl MealyMachine for AsGeneral {
    type Memory = AsGeneralMemory;

    fn initial_memory(&self) -> AsGeneralMemory {
        AsGeneralMemory::Following
    }

    fn output<'a>(&'a self, memory: &AsGeneralMemory, state: StateId) -> ActionDist<'a> {
        match memory {
            AsGeneralMemory::Inside { component, memory } => self.inner[*component].output(memory, state),
            AsGeneralMemory::Following => match self.component_of[state.0] {
                Some(i) => self.inner[i].output(&self.inner[i].initial_memory(), state),
                None => ActionDist::Dirac(self.winning[state.0]),
            },
        }
    }

    fn update(&self, memory: &mut AsGeneralMemory, step: &Step) {
        if *memory == AsGeneralMemory::Following {
            if let Some(i) = self.component_of[step.state.0] {
                *memory = AsGeneralMemory::Inside { component: i, memory: self.inner[i].initial_memory() };
            }
        }
        match memory {
            AsGeneralMemory::Inside { component, memory } => self.inner[*component].update(memory, step),
            AsGeneralMemory::Following => {
                if let Some(i) = self.component_of[step.next.0] {
                    *memory = AsGeneralMemory::Inside { component: i, memory: self.inner[i].initial_memory() };
                }
            }
        }
    }

    fn phase(&self, memory: &AsGeneralMemory) -> Phase {
        match memory {
            AsGeneralMemory::Inside { component, memory } => self.inner[*component].phase(memory),
            AsGeneralMemory::Following => Phase::Winning,
        }
    }

    fn is_finite(&self) -> bool {
        true
    }
}
