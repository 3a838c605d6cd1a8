//! Executable Mealy machines for the learning strategies, from the plain
//! learn-then-optimize strategy up to the general controllers that combine
//! parity winning strategies with learning inside end components.
//!
//! Every builder works on the full automaton. The single-component builders
//! require the automaton to be one maximal end component; the general
//! controllers accept any surely (resp. almost-surely) good automaton.

mod almost;
mod fin;
mod infinite;
mod scope;
mod sure;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use almost::{AsGeneral, AsGeneralMemory, AsSingleEc, AsSingleMemory};
pub use fin::{SigmaFin, SigmaFinMemory, TauFin, TauFinMemory};
pub use infinite::{SigmaInfMemory, SigmaInfinity, SureGec, SureGecMemory};
pub use scope::Policy;
pub use sure::{SureGeneral, SureGeneralMemory, SureSingleEc, SureSingleMemory};

use crate::graphs::{almost_sure_winning, mec_decomposition, sure_winning, Classification, EndComponent};
use crate::learn::{EpisodeSchedule, LearnError, MonitorPlan, Sizing};
use crate::model::{ActionDist, ActionId, MealyMachine, ParityAutomaton, Phase, StateId, Step};
use scope::Scope;

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("bad parameter: {0}")]
    Parameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Learn(#[from] LearnError),
}

pub(crate) fn check_unit(name: &'static str, x: f64) -> Result<f64, StrategyError> {
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(StrategyError::Parameter(format!("{name} = {x} must lie in (0,1)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    SigmaFin,
    SigmaInf,
    SureGec,
    SureSingleEc,
    SureGeneral,
    TauFin,
    AsSingleEc,
    AsGeneral,
}

impl Mode {
    pub const ALL: [Mode; 8] = [
        Mode::SigmaFin,
        Mode::SigmaInf,
        Mode::SureGec,
        Mode::SureSingleEc,
        Mode::SureGeneral,
        Mode::TauFin,
        Mode::AsSingleEc,
        Mode::AsGeneral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::SigmaFin => "sigma_fin",
            Mode::SigmaInf => "sigma_inf",
            Mode::SureGec => "sure_gec",
            Mode::SureSingleEc => "sure_single_ec",
            Mode::SureGeneral => "sure_general",
            Mode::TauFin => "tau_fin",
            Mode::AsSingleEc => "as_single_ec",
            Mode::AsGeneral => "as_general",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode {s:?}; expected one of {}", Mode::ALL.map(Mode::name).join(", ")))
    }
}

fn single_mec(aut: &ParityAutomaton) -> Result<EndComponent, StrategyError> {
    let dec = mec_decomposition(aut);
    match dec.mecs.as_slice() {
        [m] if m.len() == aut.n_states() => Ok(m.clone()),
        _ => Err(StrategyError::Precondition("automaton is not a single end component".into())),
    }
}

fn single_gec(aut: &ParityAutomaton) -> Result<EndComponent, StrategyError> {
    let m = single_mec(aut)?;
    if m.classification != Classification::Good {
        return Err(StrategyError::Precondition("automaton is not a good end component".into()));
    }
    Ok(m)
}

/// Uniform surely winning strategy of an automaton whose every state is surely winning.
pub fn surely_good_winning(aut: &ParityAutomaton) -> Result<Vec<ActionId>, StrategyError> {
    let region = sure_winning(aut);
    if !region.is_everything(aut) {
        return Err(StrategyError::Precondition("automaton is not surely good".into()));
    }
    Ok(region.dense_strategy(aut))
}

/// Uniform almost-surely winning strategy of an automaton whose every state is almost-surely winning.
pub fn almost_surely_good_winning(aut: &ParityAutomaton) -> Result<Vec<ActionId>, StrategyError> {
    let region = almost_sure_winning(aut);
    if !region.is_everything(aut) {
        return Err(StrategyError::Precondition("automaton is not almost-surely good".into()));
    }
    Ok(region.dense_strategy(aut))
}

/// Learn for a fixed budget, then follow a learned optimal strategy.
pub fn build_sigma_fin(aut: &ParityAutomaton, epsilon: f64, gamma: f64, sizing: &Sizing) -> Result<SigmaFin, StrategyError> {
    let mec = single_mec(aut)?;
    SigmaFin::new(Scope::new(Arc::new(aut.clone()), &mec, sizing.reward_bits), epsilon, gamma, sizing)
}

/// Unbounded alternation of learning and optimizing episodes.
pub fn build_sigma_infinity(aut: &ParityAutomaton, schedule: EpisodeSchedule) -> Result<SigmaInfinity, StrategyError> {
    let mec = single_mec(aut)?;
    let bits = schedule.sizing.reward_bits;
    Ok(SigmaInfinity::new(Scope::new(Arc::new(aut.clone()), &mec, bits), schedule))
}

/// The unbounded strategy with a minimal-priority monitor that falls back
/// to `winning` for good.
pub fn build_sure_gec_strategy(
    aut: &ParityAutomaton,
    gamma: f64,
    schedule: EpisodeSchedule,
    plan: MonitorPlan,
    winning: Vec<ActionId>,
) -> Result<SureGec, StrategyError> {
    check_unit("gamma", gamma)?;
    let gec = single_gec(aut)?;
    surely_good_winning(aut)?;
    if winning.len() != aut.n_states() || aut.states().any(|q| !aut.is_enabled(q, winning[q.0])) {
        return Err(StrategyError::Precondition("winning strategy does not fit the automaton".into()));
    }
    if (plan.gamma - gamma).abs() > 1e-12 {
        return Err(StrategyError::Parameter("monitor plan was built for a different gamma".into()));
    }
    if schedule.n_states != gec.len() {
        return Err(StrategyError::Parameter("schedule was built for a different automaton size".into()));
    }
    let bits = schedule.sizing.reward_bits;
    let inner = SigmaInfinity::new(Scope::new(Arc::new(aut.clone()), &gec, bits), schedule);
    Ok(SureGec::new(inner, plan, winning, &gec.min_priority_states(aut)))
}

pub fn build_sure_single_ec_strategy(
    aut: &ParityAutomaton,
    epsilon: f64,
    gamma: f64,
    sizing: &Sizing,
) -> Result<SureSingleEc, StrategyError> {
    let winning = surely_good_winning(aut)?;
    let mec = single_mec(aut)?;
    SureSingleEc::new(&Arc::new(aut.clone()), &mec, epsilon, gamma, sizing, winning)
}

pub fn build_sure_general_strategy(
    aut: &ParityAutomaton,
    epsilon: f64,
    gamma: f64,
    sizing: &Sizing,
) -> Result<SureGeneral, StrategyError> {
    let winning = surely_good_winning(aut)?;
    SureGeneral::new(&Arc::new(aut.clone()), epsilon, gamma, sizing, winning)
}

/// Learn, then loop forever between a learned optimal strategy and one
/// exploration round.
pub fn build_tau_fin(aut: &ParityAutomaton, epsilon: f64, gamma: f64, sizing: &Sizing) -> Result<TauFin, StrategyError> {
    let gec = single_gec(aut)?;
    TauFin::new(Scope::new(Arc::new(aut.clone()), &gec, sizing.reward_bits), epsilon, gamma, sizing)
}

pub fn build_as_single_ec_strategy(
    aut: &ParityAutomaton,
    epsilon: f64,
    gamma: f64,
    sizing: &Sizing,
) -> Result<AsSingleEc, StrategyError> {
    almost_surely_good_winning(aut)?;
    let mec = single_mec(aut)?;
    AsSingleEc::new(&Arc::new(aut.clone()), &mec, epsilon, gamma, sizing)
}

pub fn build_as_general_strategy(
    aut: &ParityAutomaton,
    epsilon: f64,
    gamma: f64,
    sizing: &Sizing,
) -> Result<AsGeneral, StrategyError> {
    let winning = almost_surely_good_winning(aut)?;
    AsGeneral::new(&Arc::new(aut.clone()), epsilon, gamma, sizing, winning)
}

/// Parameters shared by all builders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyParams {
    pub mode: Mode,
    pub epsilon: f64,
    pub gamma: f64,
    #[serde(default)]
    pub sizing: Sizing,
}

/// Any of the built machines behind one type.
#[derive(Clone, Debug)]
pub enum AnyMachine {
    SigmaFin(SigmaFin),
    SigmaInf(SigmaInfinity),
    SureGec(SureGec),
    SureSingleEc(SureSingleEc),
    SureGeneral(SureGeneral),
    TauFin(TauFin),
    AsSingleEc(AsSingleEc),
    AsGeneral(AsGeneral),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AnyMemory {
    SigmaFin(SigmaFinMemory),
    SigmaInf(Box<SigmaInfMemory>),
    SureGec(Box<SureGecMemory>),
    SureSingleEc(Box<SureSingleMemory>),
    SureGeneral(Box<SureGeneralMemory>),
    TauFin(TauFinMemory),
    AsSingleEc(AsSingleMemory),
    AsGeneral(AsGeneralMemory),
}

macro_rules! dispatch {
    ($self:expr, $mem:expr, $m:ident, $x:ident => $body:expr) => {
        match ($self, $mem) {
            (AnyMachine::SigmaFin($m), AnyMemory::SigmaFin($x)) => $body,
            (AnyMachine::SigmaInf($m), AnyMemory::SigmaInf($x)) => $body,
            (AnyMachine::SureGec($m), AnyMemory::SureGec($x)) => $body,
            (AnyMachine::SureSingleEc($m), AnyMemory::SureSingleEc($x)) => $body,
            (AnyMachine::SureGeneral($m), AnyMemory::SureGeneral($x)) => $body,
            (AnyMachine::TauFin($m), AnyMemory::TauFin($x)) => $body,
            (AnyMachine::AsSingleEc($m), AnyMemory::AsSingleEc($x)) => $body,
            (AnyMachine::AsGeneral($m), AnyMemory::AsGeneral($x)) => $body,
            _ => panic!("memory does not belong to this machine"),
        }
    };
}

impl MealyMachine for AnyMachine {
    type Memory = AnyMemory;

    fn initial_memory(&self) -> AnyMemory {
        match self {
            AnyMachine::SigmaFin(m) => AnyMemory::SigmaFin(m.initial_memory()),
            AnyMachine::SigmaInf(m) => AnyMemory::SigmaInf(Box::new(m.initial_memory())),
            AnyMachine::SureGec(m) => AnyMemory::SureGec(Box::new(m.initial_memory())),
            AnyMachine::SureSingleEc(m) => AnyMemory::SureSingleEc(Box::new(m.initial_memory())),
            AnyMachine::SureGeneral(m) => AnyMemory::SureGeneral(Box::new(m.initial_memory())),
            AnyMachine::TauFin(m) => AnyMemory::TauFin(m.initial_memory()),
            AnyMachine::AsSingleEc(m) => AnyMemory::AsSingleEc(m.initial_memory()),
            AnyMachine::AsGeneral(m) => AnyMemory::AsGeneral(m.initial_memory()),
        }
    }

    fn output<'a>(&'a self, memory: &AnyMemory, state: StateId) -> ActionDist<'a> {
        dispatch!(self, memory, m, x => m.output(x, state))
    }

    fn update(&self, memory: &mut AnyMemory, step: &Step) {
        dispatch!(self, memory, m, x => m.update(x, step))
    }

    fn phase(&self, memory: &AnyMemory) -> Phase {
        dispatch!(self, memory, m, x => m.phase(x))
    }

    fn is_finite(&self) -> bool {
        match self {
            AnyMachine::SigmaFin(m) => m.is_finite(),
            AnyMachine::SigmaInf(m) => m.is_finite(),
            AnyMachine::SureGec(m) => m.is_finite(),
            AnyMachine::SureSingleEc(m) => m.is_finite(),
            AnyMachine::SureGeneral(m) => m.is_finite(),
            AnyMachine::TauFin(m) => m.is_finite(),
            AnyMachine::AsSingleEc(m) => m.is_finite(),
            AnyMachine::AsGeneral(m) => m.is_finite(),
        }
    }
}

/// A built machine with the parameters it was built from.
#[derive(Clone, Debug)]
pub struct StrategyBuild {
    pub machine: AnyMachine,
    pub params: StrategyParams,
}

/// Builds the machine for `params.mode` with the default schedule and
/// monitor for the unbounded modes.
pub fn build(aut: &ParityAutomaton, params: &StrategyParams) -> Result<StrategyBuild, StrategyError> {
    let StrategyParams { mode, epsilon, gamma, sizing } = params;
    let (eps, gamma) = (*epsilon, *gamma);
    let schedule = || {
        crate::learn::schedule_sigma_infinity(
            aut.n_states(),
            aut.states().map(|q| aut.enabled(q).len()).max().unwrap_or(1),
            aut.pi_min_f64(),
            crate::learn::EpsilonSeq::default(),
            sizing,
        )
    };
    let machine = match mode {
        Mode::SigmaFin => AnyMachine::SigmaFin(build_sigma_fin(aut, eps, gamma, sizing)?),
        Mode::SigmaInf => AnyMachine::SigmaInf(build_sigma_infinity(aut, schedule()?)?),
        Mode::SureGec => {
            let s = schedule()?;
            let plan = crate::learn::monitor_plan(s.n_states, s.n_actions, s.pi_min, gamma)?;
            AnyMachine::SureGec(build_sure_gec_strategy(aut, gamma, s, plan, surely_good_winning(aut)?)?)
        }
        Mode::SureSingleEc => AnyMachine::SureSingleEc(build_sure_single_ec_strategy(aut, eps, gamma, sizing)?),
        Mode::SureGeneral => AnyMachine::SureGeneral(build_sure_general_strategy(aut, eps, gamma, sizing)?),
        Mode::TauFin => AnyMachine::TauFin(build_tau_fin(aut, eps, gamma, sizing)?),
        Mode::AsSingleEc => AnyMachine::AsSingleEc(build_as_single_ec_strategy(aut, eps, gamma, sizing)?),
        Mode::AsGeneral => AnyMachine::AsGeneral(build_as_general_strategy(aut, eps, gamma, sizing)?),
    };
    Ok(StrategyBuild { machine, params: params.clone() })
}

/// A machine started from a given memory instead of its initial one, used
/// to analyze what happens after a particular learning outcome.
#[derive(Clone, Debug)]
pub struct Resumed<'a, M: MealyMachine> {
    pub machine: &'a M,
    pub memory: M::Memory,
}

impl<M: MealyMachine> MealyMachine for Resumed<'_, M> {
    type Memory = M::Memory;

    fn initial_memory(&self) -> M::Memory {
        self.memory.clone()
    }

    fn output<'a>(&'a self, memory: &M::Memory, state: StateId) -> ActionDist<'a> {
        self.machine.output(memory, state)
    }

    fn update(&self, memory: &mut M::Memory, step: &Step) {
        self.machine.update(memory, step)
    }

    fn phase(&self, memory: &M::Memory) -> Phase {
        self.machine.phase(memory)
    }

    fn is_finite(&self) -> bool {
        self.machine.is_finite()
    }
}
