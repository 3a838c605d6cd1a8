//! The `mplearn` command line.
//!
//! [`dispatch`] parses arguments, runs one subcommand and returns the exit
//! code: 0 on success, 1 when the input is invalid (bad flags, unreadable or
//! malformed models, unmet preconditions) and 2 when a valid request fails
//! at run time. Data goes to standard output or the `--out` file;
//! diagnostics go to standard error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::graphs::{almost_sure_winning, mec_decomposition, sure_winning, Region};
use crate::harness::examples::{builtin, BuiltinParams, Instance, BUILTIN_NAMES};
use crate::harness::{
    emit_report, run_experiment, simulate, ExperimentConfig, HarnessError, ReportFormat, Sampler, SimOptions,
};
use crate::learn::{
    exploration_episode_count, hoeffding_samples, mixing_horizon, monitor_plan, zeta_lb, LearnError, MixingParams,
    Sizing,
};
use crate::model::rational::{format_rational, parse_rational, rational_to_f64};
use crate::model::{validate_compatibility, HiddenModel, ModelError, ParityAutomaton};
use crate::solver::{optimal_gain, robustness_eta, yardstick, Mdp, SolverError, SolverOptions, YardstickKind};
use crate::strategies::{build, AnyMachine, Mode, StrategyError, StrategyParams};

#[derive(Debug, Parser)]
#[command(name = "mplearn", version, about = "Learning strategies for mean-payoff parity MDPs with unknown probabilities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an automaton and, if given, a hidden model against it.
    Validate(InstanceArgs),
    /// Maximal end components, their classification and the winning regions.
    Analyze(InstanceArgs),
    /// Optimal gain and strategy of a known hidden model.
    Solve(SolveArgs),
    /// Sample counts, accuracy and monitoring bounds for given sizes.
    Bounds(BoundsArgs),
    /// Build a learning strategy and print its phase lengths.
    Synth(SynthArgs),
    /// Simulate one seeded run of a learning strategy.
    Simulate(SimulateArgs),
    /// Run seeded trials described by a configuration file.
    Experiment(ExperimentArgs),
    /// List the built-in instances or export one as JSON files.
    Examples(ExamplesArgs),
}

/// Where the instance comes from: files or a built-in example.
#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Automaton JSON file.
    #[arg(long, value_name = "FILE", conflicts_with = "example", required_unless_present = "example")]
    pub automaton: Option<PathBuf>,
    /// Hidden model JSON file (probabilities and rewards) for `--automaton`.
    #[arg(long, value_name = "FILE", requires = "automaton")]
    pub hidden: Option<PathBuf>,
    /// Built-in instance: fig1_left, fig1_right, fig3 or two_mec.
    #[arg(long, value_name = "NAME")]
    pub example: Option<String>,
    /// Built-in parameter: branching probability `x` (probability, e.g. 7/10).
    #[arg(long, value_parser = rational_arg, value_name = "P")]
    pub x: Option<BigRational>,
    /// Built-in parameter: branching probability `y` (probability).
    #[arg(long, value_parser = rational_arg, value_name = "P")]
    pub y: Option<BigRational>,
    /// Built-in parameter: reward `r0` (in [0, 1]).
    #[arg(long, value_parser = rational_arg, value_name = "R")]
    pub r0: Option<BigRational>,
    /// Built-in parameter: reward `r1` (in [0, 1]).
    #[arg(long, value_parser = rational_arg, value_name = "R")]
    pub r1: Option<BigRational>,
    /// Built-in parameter: probability of staying inside a loop (probability).
    #[arg(long, value_parser = rational_arg, value_name = "P")]
    pub stay: Option<BigRational>,
    /// Built-in parameter: reward inside the first loop (in [0, 1]).
    #[arg(long, value_parser = rational_arg, value_name = "R")]
    pub left_reward: Option<BigRational>,
    /// Built-in parameter: reward inside the second loop (in [0, 1]).
    #[arg(long, value_parser = rational_arg, value_name = "R")]
    pub right_reward: Option<BigRational>,
    /// Built-in parameter: known lower bound on nonzero probabilities.
    #[arg(long, value_parser = rational_arg, value_name = "P")]
    pub pi_min: Option<BigRational>,
    /// Output file; standard output when absent.
    #[arg(long, short, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Also report this yardstick (val, sval or asval); sval and asval need a
    /// single end component.
    #[arg(long, value_name = "KIND")]
    pub yardstick: Option<YardstickKind>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Number of states.
    #[arg(long, value_name = "N")]
    pub states: usize,
    /// Number of actions.
    #[arg(long, value_name = "M")]
    pub actions: usize,
    /// Accuracy, in (0, 1).
    #[arg(long, value_parser = rational_arg, value_name = "EPS")]
    pub epsilon: BigRational,
    /// Failure probability, in (0, 1).
    #[arg(long, value_parser = float_arg, value_name = "GAMMA")]
    pub gamma: f64,
    /// Lower bound on nonzero probabilities; enables the bounds that need it.
    #[arg(long, value_parser = rational_arg, value_name = "P")]
    pub pi_min: Option<BigRational>,
    /// Mixing constant c1 (>= 1) of the running-average tail bound.
    #[arg(long, value_parser = float_arg, requires = "c2")]
    pub c1: Option<f64>,
    /// Mixing constant c2 (> 0) of the running-average tail bound.
    #[arg(long, value_parser = float_arg, requires = "c1")]
    pub c2: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, short, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SizingChoice {
    /// Phase lengths exactly as given by the sample bounds.
    Faithful,
    /// Learning phases capped at 200 episodes and mixing constants c1 = 2,
    /// c2 = 16.
    Desk,
}

#[derive(Debug, Args)]
pub struct StrategyArgs {
    /// Strategy to build.
    #[arg(long, value_name = "MODE")]
    pub mode: Mode,
    /// Accuracy, in (0, 1).
    #[arg(long, value_parser = float_arg, default_value = "0.2", value_name = "EPS")]
    pub epsilon: f64,
    /// Failure probability, in (0, 1).
    #[arg(long, value_parser = float_arg, default_value = "0.2", value_name = "GAMMA")]
    pub gamma: f64,
    /// Phase sizing.
    #[arg(long, value_enum, default_value = "faithful")]
    pub sizing: SizingChoice,
    /// Cap on episodes per learning phase (overrides the sizing's cap).
    #[arg(long, value_name = "EPISODES")]
    pub learning_cap: Option<u64>,
}

impl StrategyArgs {
    fn params(&self) -> StrategyParams {
        let mut sizing = match self.sizing {
            SizingChoice::Faithful => Sizing::default(),
            SizingChoice::Desk => Sizing::desk(),
        };
        if self.learning_cap.is_some() {
            sizing.learning_cap = self.learning_cap;
        }
        StrategyParams { mode: self.mode, epsilon: self.epsilon, gamma: self.gamma, sizing }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub strategy: StrategyArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub strategy: StrategyArgs,
    /// Number of steps.
    #[arg(long, default_value_t = 200_000, value_name = "STEPS")]
    pub horizon: u64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trial index; the run's random stream is derived from seed and trial.
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    /// Length of the final window for the tail statistics (steps); half the
    /// horizon when absent.
    #[arg(long, value_name = "STEPS")]
    pub window: Option<u64>,
    /// Write the full trace as CSV to this file.
    #[arg(long, value_name = "FILE")]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment configuration JSON file.
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Override the configured master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the configured number of trials.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Number of worker threads; defaults to the configuration, then the
    /// MPLEARN_WORKERS environment variable, then one per core.
    #[arg(long)]
    pub workers: Option<usize>,
    /// JSON report file; standard output when absent.
    #[arg(long, short, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write a CSV report with one row per guarantee.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExamplesArgs {
    /// Export this built-in instance instead of listing all of them.
    #[arg(long, value_name = "NAME", requires = "dir")]
    pub export: Option<String>,
    /// Directory receiving `<NAME>.automaton.json` and `<NAME>.hidden.json`.
    #[arg(long, value_name = "DIR")]
    pub dir: Option<PathBuf>,
}

fn rational_arg(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn float_arg(s: &str) -> Result<f64, String> {
    rational_arg(s).map(|r| rational_to_f64(&r))
}

/// Failure of a subcommand, split by exit code.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InfiniteMemory | ModelError::ProductCap(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<LearnError> for CliError {
    fn from(e: LearnError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Precondition(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<StrategyError> for CliError {
    fn from(e: StrategyError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Model(m) => m.into(),
            HarnessError::Strategy(s) => s.into(),
            HarnessError::Solver(s) => s.into(),
            HarnessError::Config(_) | HarnessError::Empty(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(path: Option<&Path>, value: &Value) -> Result<(), CliError> {
    write_output(path, &(serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n"))
}

/// Automaton and optional hidden model named by the arguments.
fn load(args: &InstanceArgs) -> Result<(ParityAutomaton, Option<HiddenModel>), CliError> {
    if let Some(name) = &args.example {
        let mut p = BuiltinParams::default();
        let flags = [
            ("x", &args.x),
            ("y", &args.y),
            ("r0", &args.r0),
            ("r1", &args.r1),
            ("stay", &args.stay),
            ("left_reward", &args.left_reward),
            ("right_reward", &args.right_reward),
            ("pi_min", &args.pi_min),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                p.set(k, v.clone());
            }
        }
        let Instance { automaton, hidden, .. } = builtin(name, &p)?;
        return Ok((automaton, Some(hidden)));
    }
    let path = args.automaton.as_ref().expect("clap requires an automaton or an example");
    let aut = ParityAutomaton::from_json(&read_input(path)?)?;
    let hidden = match &args.hidden {
        Some(h) => {
            let hidden = HiddenModel::from_json(&aut, &read_input(h)?)?;
            validate_compatibility(&aut, &hidden)?;
            Some(hidden)
        }
        None => None,
    };
    Ok((aut, hidden))
}

fn load_with_hidden(args: &InstanceArgs) -> Result<(ParityAutomaton, HiddenModel), CliError> {
    match load(args)? {
        (aut, Some(h)) => Ok((aut, h)),
        _ => Err(CliError::Invalid("this command needs --hidden".into())),
    }
}

fn region_json(aut: &ParityAutomaton, r: &Region) -> Value {
    json!({
        "states": r.states.iter().map(|&q| aut.state_label(q)).collect::<Vec<_>>(),
        "strategy": r.strategy.iter().map(|(&q, &a)| (aut.state_label(q).to_string(), aut.action_name(a))).collect::<BTreeMap<_, _>>(),
    })
}

fn validate_cmd(args: &InstanceArgs) -> Result<(), CliError> {
    let (aut, hidden) = load(args)?;
    emit_json(
        args.out.as_deref(),
        &json!({
            "valid": true,
            "states": aut.n_states(),
            "actions": aut.action_names(),
            "transitions": aut.transitions().count(),
            "pi_min": format_rational(aut.pi_min()),
            "hidden_model": hidden.is_some(),
        }),
    )
}

fn analyze_cmd(args: &InstanceArgs) -> Result<(), CliError> {
    let (aut, _) = load(args)?;
    let mecs: Vec<Value> = mec_decomposition(&aut)
        .mecs
        .iter()
        .map(|m| {
            json!({
                "states": m.states.iter().map(|&q| aut.state_label(q)).collect::<Vec<_>>(),
                "actions": m.allowed.iter().map(|(&q, acts)| {
                    (aut.state_label(q).to_string(), acts.iter().map(|&a| aut.action_name(a)).collect::<Vec<_>>())
                }).collect::<BTreeMap<_, _>>(),
                "min_priority": m.min_priority,
                "classification": m.classification,
            })
        })
        .collect();
    emit_json(
        args.out.as_deref(),
        &json!({
            "mecs": mecs,
            "sure_winning": region_json(&aut, &sure_winning(&aut)),
            "almost_sure_winning": region_json(&aut, &almost_sure_winning(&aut)),
        }),
    )
}

fn solve_cmd(args: &SolveArgs) -> Result<(), CliError> {
    let (aut, hidden) = load_with_hidden(&args.instance)?;
    let mdp = Mdp::from_hidden(&aut, &hidden);
    let opts = SolverOptions::default();
    let sol = optimal_gain(&mdp, &opts)?;
    let label = |q: usize| aut.state_label(crate::model::StateId(q)).to_string();
    let mut out = json!({
        "gain": sol.gain.iter().enumerate().map(|(q, g)| (label(q), *g)).collect::<BTreeMap<_, _>>(),
        "strategy": sol.strategy.iter().enumerate()
            .filter_map(|(q, a)| a.map(|a| (label(q), aut.action_name(a))))
            .collect::<BTreeMap<_, _>>(),
        "unichain": sol.unichain,
        "residual": sol.residual,
    });
    if let Some(kind) = args.yardstick {
        let r = yardstick(&aut, &mdp, kind, &opts)?;
        out["yardstick"] = json!({
            "kind": kind,
            "value": r.value,
            "witness": r.witness_gec.map(|g| g.states.iter().map(|&q| aut.state_label(q)).collect::<Vec<_>>()),
        });
    }
    emit_json(args.instance.out.as_deref(), &out)
}

fn bounds_cmd(args: &BoundsArgs) -> Result<(), CliError> {
    let (n, m, gamma) = (args.states, args.actions, args.gamma);
    let eps = rational_to_f64(&args.epsilon);
    let mut out = json!({ "k": hoeffding_samples(n, m, eps, gamma)? });
    if let Some(pi) = &args.pi_min {
        let pi_f = rational_to_f64(pi);
        let eta = robustness_eta(&args.epsilon, pi, n)?;
        let plan = monitor_plan(n, m, pi_f, gamma)?;
        out["exploration"] = serde_json::to_value(exploration_episode_count(n, m, pi_f, eps, gamma)?).expect("serializable");
        out["robustness"] = serde_json::to_value(&eta).expect("serializable");
        out["zeta_lb"] = json!(zeta_lb(pi_f, m, n));
        out["monitor"] = json!({
            "k0": plan.k0,
            "first_windows": (0..5).map(|i| plan.window_len(plan.k0 + i)).collect::<Vec<_>>(),
            "budget_holds": plan.budget_holds(),
        });
        let mixing = match (args.c1, args.c2) {
            (Some(c1), Some(c2)) => MixingParams::user(c1, c2)?,
            _ => MixingParams::default_for(n, pi_f),
        };
        out["mixing"] = json!({ "params": mixing, "horizon": mixing_horizon(eps, &mixing)? });
    }
    emit_json(args.out.as_deref(), &out)
}

/// Phase lengths of a built machine.
pub fn describe(machine: &AnyMachine, max_reward: f64) -> Value {
    match machine {
        AnyMachine::SigmaFin(m) => json!({ "learning_steps": m.learning_steps }),
        AnyMachine::TauFin(m) => json!({
            "learning_steps": m.learning_steps,
            "mixing_steps": m.mixing_steps,
            "block_length": m.block_length(max_reward),
        }),
        AnyMachine::SigmaInf(m) => json!({
            "first_learning_phases": (0..3).map(|i| m.schedule.learning(i).ok()).collect::<Vec<_>>(),
        }),
        AnyMachine::SureGec(m) => json!({
            "first_learning_phases": (0..3).map(|i| m.inner.schedule.learning(i).ok()).collect::<Vec<_>>(),
            "monitor": { "k0": m.plan.k0, "zeta_lb": m.plan.zeta_lb, "first_window": m.plan.window_len(m.plan.k0) },
        }),
        AnyMachine::SureSingleEc(m) => json!({
            "learning_steps": m.learning_steps,
            "reach_budget": m.reach_budget,
            "good_components": m.candidates.len(),
        }),
        AnyMachine::AsSingleEc(m) => json!({
            "learning_steps": m.learning_steps,
            "good_components": m.candidates.len(),
            "inner": m.inner.iter().map(|t| describe(&AnyMachine::TauFin(t.clone()), max_reward)).collect::<Vec<_>>(),
        }),
        AnyMachine::SureGeneral(m) => json!({
            "components": m.inner.iter().map(|s| describe(&AnyMachine::SureSingleEc(s.clone()), max_reward)).collect::<Vec<_>>(),
        }),
        AnyMachine::AsGeneral(m) => json!({
            "components": m.inner.iter().map(|s| describe(&AnyMachine::AsSingleEc(s.clone()), max_reward)).collect::<Vec<_>>(),
        }),
    }
}

fn synth_cmd(args: &SynthArgs) -> Result<(), CliError> {
    let (aut, hidden) = load(&args.instance)?;
    let params = args.strategy.params();
    let built = build(&aut, &params)?;
    let max_reward = hidden.map_or(1.0, |h| h.max_reward());
    use crate::model::MealyMachine;
    emit_json(
        args.instance.out.as_deref(),
        &json!({
            "params": params,
            "finite_memory": built.machine.is_finite(),
            "phases": describe(&built.machine, max_reward),
        }),
    )
}

fn simulate_cmd(args: &SimulateArgs) -> Result<(), CliError> {
    let (aut, hidden) = load_with_hidden(&args.instance)?;
    let built = build(&aut, &args.strategy.params())?;
    let sampler = Sampler::new(&aut, &hidden);
    let mut opts = SimOptions::new(args.horizon);
    opts.mp_window = args.window;
    opts.keep_trace = args.trace.is_some();
    let sim = simulate(&aut, &sampler, &built.machine, &opts, args.seed, args.trial)?;
    if let (Some(path), Some(trace)) = (&args.trace, &sim.trace) {
        let file = std::fs::File::create(path).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        trace.write_csv(&aut, std::io::BufWriter::new(file)).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    emit_json(args.instance.out.as_deref(), &serde_json::to_value(&sim.result).expect("serializable"))
}

fn experiment_cmd(args: &ExperimentArgs) -> Result<(), CliError> {
    let mut config: ExperimentConfig =
        serde_json::from_str(&read_input(&args.config)?).map_err(|e| CliError::Invalid(format!("{}: {e}", args.config.display())))?;
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if args.workers.is_some() {
        config.workers = args.workers;
    }
    let outcome = run_experiment(&config)?;
    write_output(args.out.as_deref(), &emit_report(&outcome.stats, ReportFormat::Json)?)?;
    if let Some(path) = &args.csv {
        write_output(Some(path), &emit_report(&outcome.stats, ReportFormat::Csv)?)?;
    }
    Ok(())
}

fn examples_cmd(args: &ExamplesArgs) -> Result<(), CliError> {
    match (&args.export, &args.dir) {
        (Some(name), Some(dir)) => {
            let inst = builtin(name, &BuiltinParams::default())?;
            let a = dir.join(format!("{name}.automaton.json"));
            let h = dir.join(format!("{name}.hidden.json"));
            write_output(Some(&a), &(inst.automaton.to_json() + "\n"))?;
            write_output(Some(&h), &(inst.hidden.to_json(&inst.automaton) + "\n"))?;
            eprintln!("wrote {} and {}", a.display(), h.display());
            Ok(())
        }
        _ => {
            let params = |n: &str| match n {
                "fig1_left" => vec!["r0", "r1", "x", "pi_min"],
                "fig1_right" => vec!["x", "y", "pi_min"],
                "fig3" => vec!["stay", "left_reward", "right_reward", "pi_min"],
                _ => vec![],
            };
            let list: Vec<Value> = BUILTIN_NAMES.iter().map(|n| json!({ "name": n, "parameters": params(n) })).collect();
            emit_json(None, &Value::Array(list))
        }
    }
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Validate(a) => validate_cmd(a),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Synth(a) => synth_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Experiment(a) => experiment_cmd(a),
        Command::Examples(a) => examples_cmd(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn every_flag_is_documented() {
        let cmd = Cli::command();
        for sub in cmd.get_subcommands() {
            for arg in sub.get_arguments().filter(|a| !["help", "version"].contains(&a.get_id().as_str())) {
                assert!(arg.get_help().is_some(), "{} --{} has no help", sub.get_name(), arg.get_id());
            }
        }
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(dispatch(["mplearn", "bounds", "--states", "2"]), 1);
        assert_eq!(dispatch(["mplearn", "frobnicate"]), 1);
        assert_eq!(dispatch(["mplearn", "analyze", "--example", "nope"]), 1);
    }

    #[test]
    fn numeric_flags_take_rationals() {
        assert_eq!(float_arg("7/10").unwrap(), 0.7);
        assert_eq!(float_arg("0.25").unwrap(), 0.25);
        assert!(float_arg("seven").is_err());
    }
}
