use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::graphs::mec_decomposition;
use crate::model::rational::rational_to_f64;
use crate::model::{ActionId, HiddenModel, MealyMachine, ParityAutomaton, Phase, RunTrace, StateId, Step};

/// Hidden model in a form suited to sampling: cumulative probabilities and
/// rewards per enabled pair.
#[derive(Clone, Debug)]
pub struct Sampler {
    n_actions: usize,
    /// Indexed by `q * n_actions + a`: `(successor, cumulative prob, reward)`.
    rows: Vec<Vec<(StateId, f64, f64)>>,
}

impl Sampler {
    pub fn new(aut: &ParityAutomaton, hidden: &HiddenModel) -> Self {
        let m = aut.n_actions();
        let mut rows = vec![Vec::new(); aut.n_states() * m];
        for q in aut.states() {
            for &a in aut.enabled(q) {
                let mut acc = 0.0;
                rows[q.0 * m + a.0] = hidden
                    .row(q, a)
                    .into_iter()
                    .map(|o| {
                        acc += rational_to_f64(&o.prob);
                        (o.next, acc, rational_to_f64(&o.reward))
                    })
                    .collect();
            }
        }
        Self { n_actions: m, rows }
    }

    /// Successor and reward for a uniform draw `u` in `[0, 1)`; `None` when
    /// the pair is not enabled.
    pub fn sample(&self, q: StateId, a: ActionId, u: f64) -> Option<(StateId, f64)> {
        if a.0 >= self.n_actions {
            return None;
        }
        let row = self.rows.get(q.0 * self.n_actions + a.0)?;
        let last = row.last()?;
        let hit = row.iter().find(|(_, c, _)| u < *c).unwrap_or(last);
        Some((hit.0, hit.2))
    }
}

/// Seed of trial `trial` under master seed `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(trial))
}

#[derive(Clone, Debug)]
pub struct SimOptions {
    pub horizon: u64,
    /// Length of the final window used for the tail statistics; defaults to
    /// half the horizon.
    pub mp_window: Option<u64>,
    pub keep_trace: bool,
    /// Strategy whose choices are compared to the machine after a fallback.
    pub reference_winning: Option<Vec<ActionId>>,
}

impl SimOptions {
    pub fn new(horizon: u64) -> Self {
        Self { horizon, mp_window: None, keep_trace: false, reference_winning: None }
    }

    pub fn window(&self) -> u64 {
        self.mp_window.unwrap_or(self.horizon / 2).clamp(1, self.horizon.max(1))
    }
}

/// Statistics of one simulated run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: u64,
    pub seed: u64,
    /// Average reward over the final window.
    pub tail_mp: f64,
    pub full_mp: f64,
    /// Smallest priority of the states visited in the final window.
    pub tail_min_priority: u32,
    pub fallback_engaged: bool,
    pub fallback_step: Option<u64>,
    /// Steps after the fallback where the action differs from the reference
    /// winning strategy.
    pub post_fallback_mismatches: u64,
    /// Maximal end component containing every state of the final window.
    pub absorbed_mec: Option<usize>,
    /// Step at which each phase started.
    pub phases: Vec<(u64, Phase)>,
}

/// A trial's statistics with its trace when requested.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub result: TrialResult,
    pub trace: Option<RunTrace>,
}

/// Runs `machine` against the hidden model from the automaton's initial
/// state.
///
/// Step `i` uses two draws of the trial's random stream: one for the action
/// and one for the successor, so runs are reproducible from the seed.
pub fn simulate<M: MealyMachine>(
    aut: &ParityAutomaton,
    sampler: &Sampler,
    machine: &M,
    opts: &SimOptions,
    seed: u64,
    trial: u64,
) -> Result<Simulation, HarnessError> {
    if opts.horizon == 0 {
        return Err(HarnessError::Empty("horizon is 0".into()));
    }
    let mec_of = mec_decomposition(aut).mec_of;
    let tseed = trial_seed(seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(tseed);
    let window = opts.window();
    let tail_start = opts.horizon - window;
    let mut memory = machine.initial_memory();
    let mut q = aut.initial();
    let mut trace = opts.keep_trace.then(|| RunTrace::new(q));
    let mut phases = vec![(0, machine.phase(&memory))];
    let (mut total, mut tail) = (0.0, 0.0);
    let mut tail_min = u32::MAX;
    let mut absorbed: Option<Option<usize>> = None;
    let mut fallback_step = None;
    let mut mismatches = 0;
    for i in 0..opts.horizon {
        let u_action: f64 = rng.random();
        let u_next: f64 = rng.random();
        let phase = machine.phase(&memory);
        if phase != phases.last().expect("nonempty").1 {
            phases.push((i, phase));
        }
        let a = machine.output(&memory, q).pick(u_action);
        if !aut.is_enabled(q, a) {
            return Err(HarnessError::InvalidAction { step: i, state: aut.state_label(q), action: a.0 });
        }
        if phase == Phase::Fallback {
            fallback_step.get_or_insert(i);
            if let Some(w) = &opts.reference_winning {
                if w[q.0] != a {
                    mismatches += 1;
                }
            }
        }
        let (next, reward) = sampler.sample(q, a, u_next).expect("enabled pair has a row");
        total += reward;
        if i >= tail_start {
            tail += reward;
            tail_min = tail_min.min(aut.priority(q));
            absorbed = Some(match absorbed {
                None => mec_of[q.0],
                Some(m) if m == mec_of[q.0] => m,
                Some(_) => None,
            });
        }
        if let Some(t) = trace.as_mut() {
            t.push(a, reward, next);
        }
        machine.update(&mut memory, &Step { state: q, action: a, reward, next });
        q = next;
    }
    let result = TrialResult {
        trial,
        seed: tseed,
        tail_mp: tail / window as f64,
        full_mp: total / opts.horizon as f64,
        tail_min_priority: tail_min,
        fallback_engaged: fallback_step.is_some() || machine.phase(&memory) == Phase::Fallback,
        fallback_step,
        post_fallback_mismatches: mismatches,
        absorbed_mec: absorbed.flatten(),
        phases,
    };
    Ok(Simulation { result, trace })
}
