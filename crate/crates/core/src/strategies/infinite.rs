use crate::learn::{EpisodeSchedule, MonitorPlan, ObservationLog};
use crate::model::{ActionDist, ActionId, MealyMachine, Phase, StateId, Step};

use super::fin::uniform;
use super::scope::{learned_policy, Policy, Scope};

/// Episodes of learning followed by optimizing, with growing lengths and a
/// model re-estimated from all experiments so far. Needs unbounded memory.
#[derive(Clone, Debug)]
pub struct SigmaInfinity {
    pub(crate) scope: Scope,
    pub schedule: EpisodeSchedule,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SigmaInfMemory {
    pub episode: usize,
    /// Step at which the current episode started.
    pub episode_start: u64,
    pub step_in_episode: u64,
    pub learning: u64,
    /// Known once the learning phase of the episode is over.
    pub optimizing: Option<u64>,
    pub log: ObservationLog,
    pub policy: Option<Policy>,
}

impl SigmaInfinity {
    pub(crate) fn new(scope: Scope, schedule: EpisodeSchedule) -> Self {
        Self { scope, schedule }
    }

    fn learning_len(&self, i: usize) -> u64 {
        self.schedule.learning(i).unwrap_or(u64::MAX).max(1)
    }

    fn is_learning(memory: &SigmaInfMemory) -> bool {
        memory.step_in_episode < memory.learning
    }
}

impl MealyMachine for SigmaInfinity {
    type Memory = SigmaInfMemory;

    fn initial_memory(&self) -> SigmaInfMemory {
        SigmaInfMemory {
            episode: 0,
            episode_start: 0,
            step_in_episode: 0,
            learning: self.learning_len(0),
            optimizing: None,
            log: self.scope.fresh_log(),
            policy: None,
        }
    }

    fn output<'a>(&'a self, memory: &SigmaInfMemory, state: StateId) -> ActionDist<'a> {
        match &memory.policy {
            Some(p) if !Self::is_learning(memory) => ActionDist::Dirac(p.action(state)),
            _ => uniform(&self.scope.beta[state.0]),
        }
    }

    fn update(&self, m: &mut SigmaInfMemory, step: &Step) {
        if Self::is_learning(m) {
            let _ = m.log.record_step(step.state, step.action, step.reward, step.next);
        }
        m.step_in_episode += 1;
        if m.step_in_episode == m.learning {
            let r_max = m.log.max_observed_reward(Some(&self.scope.allowed));
            let (policy, value) = learned_policy(&self.scope, &m.log);
            let o = self
                .schedule
                .plan(m.episode, m.episode_start, r_max, value)
                .map(|p| p.optimizing)
                .unwrap_or(u64::MAX)
                .max(1);
            m.policy = Some(policy);
            m.optimizing = Some(o);
        } else if let Some(o) = m.optimizing {
            if m.step_in_episode - m.learning >= o {
                m.episode_start = m.episode_start.saturating_add(m.learning).saturating_add(o);
                m.episode += 1;
                m.step_in_episode = 0;
                m.learning = self.learning_len(m.episode);
                m.optimizing = None;
            }
        }
    }

    fn phase(&self, memory: &SigmaInfMemory) -> Phase {
        if Self::is_learning(memory) {
            Phase::Learning
        } else {
            Phase::Optimizing
        }
    }

    fn is_finite(&self) -> bool {
        false
    }
}

/// The unbounded learn-and-optimize strategy inside a good component,
/// watched by a monitor: episodes are grouped into windows, and a window
/// without a visit to a state of minimal (even) priority switches to the
/// winning strategy for good.
#[derive(Clone, Debug)]
pub struct SureGec {
    pub inner: SigmaInfinity,
    pub plan: MonitorPlan,
    pub winning: Vec<ActionId>,
    targets: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SureGecMemory {
    Running {
        inner: SigmaInfMemory,
        window: u32,
        /// Episode index at which the current window ends.
        window_end: u64,
        seen: bool,
    },
    Fallback,
}

impl SureGec {
    /// `targets` are the states of minimal priority of the component.
    pub(crate) fn new(inner: SigmaInfinity, plan: MonitorPlan, winning: Vec<ActionId>, targets: &[StateId]) -> Self {
        let mut mask = vec![false; winning.len()];
        for t in targets {
            mask[t.0] = true;
        }
        Self { inner, plan, winning, targets: mask }
    }

    pub fn is_target(&self, q: StateId) -> bool {
        self.targets[q.0]
    }
}

impl MealyMachine for SureGec {
    type Memory = SureGecMemory;

    fn initial_memory(&self) -> SureGecMemory {
        SureGecMemory::Running {
            inner: self.inner.initial_memory(),
            window: 0,
            window_end: self.plan.window_len(self.plan.k0),
            seen: false,
        }
    }

    fn output<'a>(&'a self, memory: &SureGecMemory, state: StateId) -> ActionDist<'a> {
        match memory {
            SureGecMemory::Running { inner, .. } => self.inner.output(inner, state),
            SureGecMemory::Fallback => ActionDist::Dirac(self.winning[state.0]),
        }
    }

    fn update(&self, memory: &mut SureGecMemory, step: &Step) {
        let SureGecMemory::Running { inner, window, window_end, seen } = memory else {
            return;
        };
        if self.targets[step.state.0] || self.targets[step.next.0] {
            *seen = true;
        }
        let before = inner.episode;
        self.inner.update(inner, step);
        if inner.episode != before && inner.episode as u64 >= *window_end {
            if !*seen {
                *memory = SureGecMemory::Fallback;
                return;
            }
            *window += 1;
            *window_end = window_end.saturating_add(self.plan.window_len(self.plan.k0 + *window));
            *seen = false;
        }
    }

    fn phase(&self, memory: &SureGecMemory) -> Phase {
        match memory {
            SureGecMemory::Running { inner, .. } => self.inner.phase(inner),
            SureGecMemory::Fallback => Phase::Fallback,
        }
    }

    fn is_finite(&self) -> bool {
        false
    }
}
