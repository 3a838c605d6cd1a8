use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::examples::{builtin, BuiltinParams, Instance};
use super::sim::{simulate, trial_seed, Sampler, SimOptions, TrialResult};
use super::stats::GuaranteeStat;
use super::HarnessError;
use crate::graphs::mec_decomposition;
use crate::model::rational::parse_rational;
use crate::model::{validate_compatibility, HiddenModel, ParityAutomaton, Phase};
use crate::solver::{component_yardstick, optimal_gain, Mdp, SolverOptions, YardstickKind};
use crate::strategies::{almost_surely_good_winning, build, surely_good_winning, Mode, StrategyParams};

/// Environment variable holding the default number of trial workers.
pub const WORKERS_ENV: &str = "MPLEARN_WORKERS";

/// Where the instance of an experiment comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSpec {
    Builtin {
        example: String,
        /// Parameter values as exact rationals or decimals.
        #[serde(default)]
        params: BTreeMap<String, String>,
    },
    Files {
        automaton: PathBuf,
        hidden: PathBuf,
    },
}

impl InstanceSpec {
    pub fn builtin(name: &str) -> Self {
        InstanceSpec::Builtin { example: name.to_string(), params: BTreeMap::new() }
    }

    pub fn load(&self) -> Result<Instance, HarnessError> {
        match self {
            InstanceSpec::Builtin { example, params } => {
                let mut p = BuiltinParams::default();
                for (k, v) in params {
                    p.set(k, parse_rational(v)?);
                }
                Ok(builtin(example, &p)?)
            }
            InstanceSpec::Files { automaton, hidden } => {
                let aut = ParityAutomaton::from_json(&std::fs::read_to_string(automaton)?)?;
                let hid = HiddenModel::from_json(&aut, &std::fs::read_to_string(hidden)?)?;
                validate_compatibility(&aut, &hid)?;
                Ok(Instance { name: automaton.display().to_string(), automaton: aut, hidden: hid })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub strategy: StrategyParams,
    pub horizon: u64,
    pub trials: u64,
    pub seed: u64,
    /// Tail window length; half the horizon when absent.
    #[serde(default)]
    pub mp_window: Option<u64>,
    /// Yardstick for the mean-payoff guarantee; chosen from the mode when
    /// absent.
    #[serde(default)]
    pub yardstick: Option<YardstickKind>,
    /// Number of trial workers; does not affect results.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    /// Hex SHA-256 of the canonical JSON of every field that influences the
    /// results.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.workers = None;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn yardstick_kind(&self) -> YardstickKind {
        self.yardstick.unwrap_or(match self.strategy.mode {
            Mode::SigmaFin | Mode::SigmaInf => YardstickKind::Val,
            Mode::SureGec | Mode::SureSingleEc | Mode::SureGeneral => YardstickKind::SVal,
            Mode::TauFin | Mode::AsSingleEc | Mode::AsGeneral => YardstickKind::AsVal,
        })
    }
}

/// Statistics of the trials absorbed in one maximal end component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MecStat {
    pub mec: usize,
    /// State labels of the component.
    pub states: Vec<i64>,
    pub yardstick: Option<f64>,
    pub absorbed: u64,
    pub mp: GuaranteeStat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub config_hash: String,
    pub seed: u64,
    pub trial_seeds: Vec<u64>,
    pub instance: String,
    pub mode: Mode,
    pub yardstick_kind: YardstickKind,
    pub epsilon: f64,
    pub horizon: u64,
    pub mp_window: u64,
    pub per_guarantee: Vec<GuaranteeStat>,
    pub fallback_rate: f64,
    pub per_mec: Vec<MecStat>,
}

impl AggregateStats {
    pub fn guarantee(&self, name: &str) -> Option<&GuaranteeStat> {
        self.per_guarantee.iter().find(|g| g.name == name)
    }
}

/// Aggregate statistics together with the individual trial results.
#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub stats: AggregateStats,
    pub trials: Vec<TrialResult>,
}

/// Yardstick value of every maximal end component that has one.
pub fn mec_yardsticks(aut: &ParityAutomaton, hidden: &HiddenModel, kind: YardstickKind) -> Result<Vec<Option<f64>>, HarnessError> {
    let mdp = Mdp::from_hidden(aut, hidden);
    let opts = SolverOptions::default();
    let mut out = Vec::new();
    for mec in mec_decomposition(aut).mecs {
        out.push(match kind {
            YardstickKind::Val => {
                let sol = optimal_gain(&mdp.restricted(&mec), &opts)?;
                Some(sol.gain[mec.states.iter().next().expect("nonempty").0])
            }
            _ if mec.classification.contains_good() => Some(component_yardstick(aut, &mdp, &mec, kind, &opts)?.value),
            _ => None,
        });
    }
    Ok(out)
}

fn worker_count(config: &ExperimentConfig) -> Option<usize> {
    config.workers.or_else(|| std::env::var(WORKERS_ENV).ok()?.parse().ok()).filter(|&n| n > 0)
}

/// Runs `config.trials` seeded simulations and aggregates the mean-payoff,
/// parity and fallback statistics.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    if config.trials == 0 {
        return Err(HarnessError::Empty("experiment has no trials".into()));
    }
    let inst = config.instance.load()?;
    let aut = &inst.automaton;
    let built = build(aut, &config.strategy)?;
    let sampler = Sampler::new(aut, &inst.hidden);
    let mut opts = SimOptions::new(config.horizon);
    opts.mp_window = config.mp_window;
    opts.reference_winning = match config.strategy.mode {
        Mode::SureGec | Mode::SureSingleEc | Mode::SureGeneral => Some(surely_good_winning(aut)?),
        Mode::AsGeneral => Some(almost_surely_good_winning(aut)?),
        _ => None,
    };
    let run = || -> Result<Vec<TrialResult>, HarnessError> {
        (0..config.trials)
            .into_par_iter()
            .map(|t| simulate(aut, &sampler, &built.machine, &opts, config.seed, t).map(|s| s.result))
            .collect()
    };
    let trials = match worker_count(config) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Config(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let kind = config.yardstick_kind();
    let targets = mec_yardsticks(aut, &inst.hidden, kind)?;
    let stats = aggregate(config, &inst, kind, &targets, opts.window(), &trials);
    Ok(ExperimentOutcome { stats, trials })
}

/// Whether a trial meets the mean-payoff guarantee for the component it was
/// absorbed in.
pub fn meets_mp(trial: &TrialResult, targets: &[Option<f64>], epsilon: f64) -> bool {
    match trial.absorbed_mec.and_then(|m| targets[m]) {
        Some(v) => trial.tail_mp >= v - epsilon,
        None => false,
    }
}

fn aggregate(
    config: &ExperimentConfig,
    inst: &Instance,
    kind: YardstickKind,
    targets: &[Option<f64>],
    window: u64,
    trials: &[TrialResult],
) -> AggregateStats {
    let eps = config.strategy.epsilon;
    let per_guarantee = vec![
        GuaranteeStat::count("tail_mp_at_least_yardstick_minus_epsilon", trials, |t| meets_mp(t, targets, eps)),
        GuaranteeStat::count("tail_min_priority_even", trials, |t| t.tail_min_priority % 2 == 0),
        GuaranteeStat::count("no_fallback", trials, |t| !t.fallback_engaged),
        GuaranteeStat::count("fallback_follows_winning_strategy", trials, |t| t.post_fallback_mismatches == 0),
    ];
    let fallback = trials.iter().filter(|t| t.fallback_engaged).count();
    let dec = mec_decomposition(&inst.automaton);
    let per_mec = dec
        .mecs
        .iter()
        .enumerate()
        .map(|(i, mec)| {
            let absorbed: Vec<&TrialResult> = trials.iter().filter(|t| t.absorbed_mec == Some(i)).collect();
            MecStat {
                mec: i,
                states: mec.states.iter().map(|&q| inst.automaton.state_label(q)).collect(),
                yardstick: targets[i],
                absorbed: absorbed.len() as u64,
                mp: GuaranteeStat::count(format!("mec_{i}_tail_mp"), &absorbed, |t| meets_mp(t, targets, eps)),
            }
        })
        .collect();
    AggregateStats {
        config_hash: config.hash(),
        seed: config.seed,
        trial_seeds: (0..config.trials).map(|t| trial_seed(config.seed, t)).collect(),
        instance: inst.name.clone(),
        mode: config.strategy.mode,
        yardstick_kind: kind,
        epsilon: eps,
        horizon: config.horizon,
        mp_window: window,
        per_guarantee,
        fallback_rate: fallback as f64 / trials.len() as f64,
        per_mec,
    }
}

/// Serialization format of a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Serializes aggregate statistics. JSON holds everything; CSV has one row
/// per guarantee.
pub fn emit_report(stats: &AggregateStats, format: ReportFormat) -> Result<String, HarnessError> {
    if stats.trial_seeds.is_empty() {
        return Err(HarnessError::Empty("report of an experiment without trials".into()));
    }
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(stats).map_err(|e| HarnessError::Config(e.to_string()))? + "\n"),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["name", "passes", "n", "pass_fraction", "wilson_lo", "wilson_hi"])
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            for g in &stats.per_guarantee {
                w.write_record([
                    g.name.clone(),
                    g.passes.to_string(),
                    g.n.to_string(),
                    g.pass_fraction.to_string(),
                    g.wilson_ci_99.0.to_string(),
                    g.wilson_ci_99.1.to_string(),
                ])
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| HarnessError::Config(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

/// Parses a JSON report back into aggregate statistics.
pub fn parse_report(json: &str) -> Result<AggregateStats, HarnessError> {
    serde_json::from_str(json).map_err(|e| HarnessError::Config(e.to_string()))
}

/// Time spent in each phase, as `(phase, first step, last step + 1)`.
pub fn phase_spans(trial: &TrialResult, horizon: u64) -> Vec<(Phase, u64, u64)> {
    let mut out = Vec::new();
    for (i, &(start, phase)) in trial.phases.iter().enumerate() {
        let end = trial.phases.get(i + 1).map_or(horizon, |p| p.0);
        out.push((phase, start, end));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::Sizing;

    fn config(trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            instance: InstanceSpec::builtin("fig1_right"),
            strategy: StrategyParams { mode: Mode::AsSingleEc, epsilon: 0.2, gamma: 0.2, sizing: Sizing::desk() },
            horizon: 20_000,
            trials,
            seed: 5,
            mp_window: None,
            yardstick: None,
            workers: Some(2),
        }
    }

    #[test]
    fn single_trial_matches_simulate() {
        let cfg = config(1);
        let out = run_experiment(&cfg).unwrap();
        let inst = cfg.instance.load().unwrap();
        let built = build(&inst.automaton, &cfg.strategy).unwrap();
        let sampler = Sampler::new(&inst.automaton, &inst.hidden);
        let sim = simulate(&inst.automaton, &sampler, &built.machine, &SimOptions::new(cfg.horizon), cfg.seed, 0).unwrap();
        assert_eq!(out.trials[0], sim.result);
    }

    #[test]
    fn reports_are_deterministic_and_round_trip() {
        let cfg = config(6);
        let a = run_experiment(&cfg).unwrap().stats;
        let mut other = cfg.clone();
        other.workers = Some(1);
        let b = run_experiment(&other).unwrap().stats;
        assert_eq!(emit_report(&a, ReportFormat::Json).unwrap(), emit_report(&b, ReportFormat::Json).unwrap());
        let json = emit_report(&a, ReportFormat::Json).unwrap();
        assert_eq!(parse_report(&json).unwrap(), a);
        let csv = emit_report(&a, ReportFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), 1 + a.per_guarantee.len());
    }

    #[test]
    fn empty_experiment_is_an_error() {
        assert!(matches!(run_experiment(&config(0)), Err(HarnessError::Empty(_))));
        let mut stats = run_experiment(&config(1)).unwrap().stats;
        stats.trial_seeds.clear();
        assert!(emit_report(&stats, ReportFormat::Csv).is_err());
    }

    #[test]
    fn hash_ignores_workers_only() {
        let a = config(3);
        let mut b = a.clone();
        b.workers = None;
        assert_eq!(a.hash(), b.hash());
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
    }
}
