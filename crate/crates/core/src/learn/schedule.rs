use serde::{Deserialize, Serialize};

use super::bounds::{ceil_tol, exploration_episode_count};
use super::mixing::{mixing_horizon, MixingParams};
use super::LearnError;
use crate::model::rational::{rational_from_f64, rational_to_f64};
use crate::solver::robustness_eta;

/// A strictly decreasing sequence of accuracies in `(0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonSeq {
    /// `eps_i = base^i` for some `base` in `(0, 1)`.
    Geometric { base: f64 },
    /// Explicit prefix, continued geometrically with the ratio of its last
    /// two entries.
    Explicit(Vec<f64>),
}

impl Default for EpsilonSeq {
    fn default() -> Self {
        EpsilonSeq::Geometric { base: 0.5 }
    }
}

impl EpsilonSeq {
    pub fn validate(&self) -> Result<(), LearnError> {
        match self {
            EpsilonSeq::Geometric { base } if *base > 0.0 && *base < 1.0 => Ok(()),
            EpsilonSeq::Geometric { base } => Err(LearnError::Range("base", *base)),
            EpsilonSeq::Explicit(v) => {
                if v.len() < 2 {
                    return Err(LearnError::Schedule("explicit sequence needs at least two entries".into()));
                }
                if v.iter().any(|&e| !(e > 0.0 && e <= 1.0)) || v.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(LearnError::Schedule("sequence must be strictly decreasing in (0,1]".into()));
                }
                Ok(())
            }
        }
    }

    pub fn get(&self, i: usize) -> f64 {
        match self {
            EpsilonSeq::Geometric { base } => base.powi(i as i32),
            EpsilonSeq::Explicit(v) => match v.get(i) {
                Some(&e) => e,
                None => {
                    let n = v.len();
                    let ratio = v[n - 1] / v[n - 2];
                    v[n - 1] * ratio.powi((i - (n - 1)) as i32)
                }
            },
        }
    }
}

/// Practical sizing knobs shared by all strategy builders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sizing {
    /// Concentration constants; `None` uses [`MixingParams::default_for`].
    pub mixing: Option<MixingParams>,
    /// Upper bound on the number of `|Q|`-step episodes in one learning
    /// phase. Successive learning phases of the unbounded strategy double
    /// it. `None` uses the sample bounds as computed.
    pub learning_cap: Option<u64>,
    /// Fractional bits of rewards kept in memory.
    pub reward_bits: u32,
}

impl Default for Sizing {
    fn default() -> Self {
        Self { mixing: None, learning_cap: None, reward_bits: super::DEFAULT_REWARD_BITS }
    }
}

impl Sizing {
    /// Sizing that keeps every phase within a few thousand steps on the
    /// built-in instances.
    pub fn desk() -> Self {
        Self {
            mixing: Some(MixingParams::user(2.0, 16.0).expect("valid constants")),
            learning_cap: Some(200),
            reward_bits: super::DEFAULT_REWARD_BITS,
        }
    }

    pub fn mixing_for(&self, n_states: usize, pi_min: f64) -> MixingParams {
        self.mixing.unwrap_or_else(|| MixingParams::default_for(n_states, pi_min))
    }

    /// Learning steps (a multiple of `n_states`) that reach probability
    /// accuracy `accuracy` with confidence `1 - gamma`, after capping.
    pub fn learning_steps(
        &self,
        n_states: usize,
        n_actions: usize,
        pi_min: f64,
        accuracy: f64,
        gamma: f64,
        cap_scale: u32,
    ) -> Result<u64, LearnError> {
        let count = exploration_episode_count(n_states, n_actions, pi_min, accuracy, gamma)?;
        let mut episodes = count.episodes_saturating();
        if let Some(cap) = self.learning_cap {
            episodes = episodes.min(cap.saturating_mul(1u64.checked_shl(cap_scale).unwrap_or(u64::MAX)).max(1));
        }
        Ok(episodes.saturating_mul(n_states as u64))
    }
}

/// Probability error that keeps a model-optimal strategy `eps`-optimal.
pub fn robust_accuracy(eps: f64, pi_min: f64, n_states: usize) -> Result<f64, LearnError> {
    let e = rational_from_f64(eps).ok_or(LearnError::Range("epsilon", eps))?;
    let p = rational_from_f64(pi_min).ok_or(LearnError::Range("pi_min", pi_min))?;
    let b = robustness_eta(&e, &p, n_states).map_err(LearnError::Solver)?;
    Ok(rational_to_f64(&b.eta))
}

/// The optimization budget term covering the cost of the steps so far:
/// `ceil((s + l + m) * 2 (r - eps) / eps)`.
pub fn p_term(s: u64, l: u64, m: u64, r_max: f64, eps: f64) -> f64 {
    ceil_tol((s as f64 + l as f64 + m as f64) * (2.0 * (r_max - eps) / eps))
}

/// The optimization budget term that keeps the running average above the
/// previous episode's target while the next episode learns:
/// `ceil((s + l + m + p + l_next + m_next) (value - eps1) / (eps1 - eps2))`.
#[allow(clippy::too_many_arguments)]
pub fn f_term(s: u64, l: u64, m: u64, p: f64, l_next: u64, m_next: u64, value: f64, eps1: f64, eps2: f64) -> f64 {
    let base = s as f64 + l as f64 + m as f64 + p + l_next as f64 + m_next as f64;
    ceil_tol(base * ((value - eps1) / (eps1 - eps2)))
}

/// Everything about one episode of the unbounded learn-and-optimize loop.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpisodePlan {
    pub index: usize,
    /// First step of the episode.
    pub start: u64,
    pub learning: u64,
    pub mixing: u64,
    pub p: f64,
    pub f: f64,
    pub optimizing: u64,
    pub r_max: f64,
    pub value: f64,
}

impl EpisodePlan {
    pub fn end(&self) -> u64 {
        self.start.saturating_add(self.learning).saturating_add(self.optimizing)
    }
}

/// Episode lengths of the unbounded strategy on an automaton with
/// `n_states` states and `n_actions` actions.
///
/// Learning lengths are fixed in advance; optimization lengths depend on
/// the largest reward seen and the current value estimate, so they are
/// produced one episode at a time by [`EpisodeSchedule::plan`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpisodeSchedule {
    pub n_states: usize,
    pub n_actions: usize,
    pub pi_min: f64,
    pub epsilon: EpsilonSeq,
    pub mixing: MixingParams,
    pub sizing: Sizing,
}

/// Builds the schedule for an automaton of the given size.
pub fn schedule_sigma_infinity(
    n_states: usize,
    n_actions: usize,
    pi_min: f64,
    epsilon: EpsilonSeq,
    sizing: &Sizing,
) -> Result<EpisodeSchedule, LearnError> {
    epsilon.validate()?;
    if n_states == 0 || n_actions == 0 {
        return Err(LearnError::Range("size", 0.0));
    }
    if !(pi_min > 0.0 && pi_min <= 1.0) {
        return Err(LearnError::Range("pi_min", pi_min));
    }
    let mixing = sizing.mixing_for(n_states, pi_min);
    Ok(EpisodeSchedule { n_states, n_actions, pi_min, epsilon, mixing, sizing: sizing.clone() })
}

impl EpisodeSchedule {
    pub fn eps(&self, i: usize) -> f64 {
        self.epsilon.get(i)
    }

    /// Learning steps of episode `i`: `|Q|` times the episode count for
    /// accuracy `min(pi_min, eta(eps_{i+2}/4))` at confidence `eps_{i+1}/4`.
    pub fn learning(&self, i: usize) -> Result<u64, LearnError> {
        let eta = robust_accuracy(self.eps(i + 2) / 4.0, self.pi_min, self.n_states)?;
        let accuracy = eta.min(self.pi_min).min(0.999_999);
        self.sizing.learning_steps(self.n_states, self.n_actions, self.pi_min, accuracy, self.eps(i + 1) / 4.0, i as u32)
    }

    pub fn mixing_steps(&self, eps: f64) -> Result<u64, LearnError> {
        mixing_horizon(eps, &self.mixing)
    }

    /// Plan of episode `i` starting at step `start`, given the largest
    /// observed reward and a gain estimate (clamped to `[0, r_max]`).
    pub fn plan(&self, i: usize, start: u64, r_max: f64, value: f64) -> Result<EpisodePlan, LearnError> {
        let l = self.learning(i)?;
        let m = self.mixing_steps(self.eps(i + 2) / 4.0)?;
        let p = p_term(start, l, m, r_max, self.eps(i + 2));
        let l_next = self.learning(i + 1)?;
        let m_next = self.mixing_steps(self.eps(i + 3) / 4.0)?;
        let value = value.clamp(0.0, r_max.max(0.0));
        let f = f_term(start, l, m, p, l_next, m_next, value, self.eps(i + 1), self.eps(i + 2));
        let extra = p.max(f).max(0.0).min(u64::MAX as f64) as u64;
        let optimizing = m.saturating_add(extra);
        Ok(EpisodePlan { index: i, start, learning: l, mixing: m, p, f, optimizing, r_max, value })
    }

    /// The first `count` episodes assuming constant `r_max` and `value`.
    pub fn prefix(&self, count: usize, r_max: f64, value: f64) -> Result<Vec<EpisodePlan>, LearnError> {
        let mut out: Vec<EpisodePlan> = Vec::with_capacity(count);
        let mut start = 0;
        for i in 0..count {
            let plan = self.plan(i, start, r_max, value)?;
            start = plan.end();
            out.push(plan);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_term_example() {
        assert_eq!(p_term(100, 50, 10, 1.0, 0.25), 960.0);
        assert!(p_term(0, 10, 0, 0.1, 0.25) < 0.0);
    }

    #[test]
    fn f_term_by_hand() {
        // (1 + 2 + 3 + 4 + 5 + 6) * (0.9 - 0.5) / (0.5 - 0.25) = 33.6
        assert_eq!(f_term(1, 2, 3, 4.0, 5, 6, 0.9, 0.5, 0.25), 34.0);
    }

    #[test]
    fn epsilon_sequences() {
        let d = EpsilonSeq::default();
        assert_eq!(d.get(0), 1.0);
        assert_eq!(d.get(3), 0.125);
        let e = EpsilonSeq::Explicit(vec![0.5, 0.4]);
        e.validate().unwrap();
        assert!((e.get(2) - 0.32).abs() < 1e-12);
        assert!(EpsilonSeq::Explicit(vec![0.5, 0.6]).validate().is_err());
        assert!(EpsilonSeq::Geometric { base: 1.0 }.validate().is_err());
    }

    #[test]
    fn prefix_invariants() {
        let s = schedule_sigma_infinity(3, 2, 0.1, EpsilonSeq::default(), &Sizing::desk()).unwrap();
        let plans = s.prefix(4, 1.0, 0.9).unwrap();
        let mut start = 0;
        for (i, p) in plans.iter().enumerate() {
            assert_eq!(p.start, start);
            assert!(p.learning >= 3 && p.learning % 3 == 0);
            assert_eq!(p.optimizing, p.mixing + p.p.max(p.f).max(0.0) as u64);
            assert!(s.eps(i + 1) < s.eps(i));
            start = p.end();
        }
        assert_eq!(plans[1].start, plans[0].learning + plans[0].optimizing);
    }

    #[test]
    fn uncapped_learning_is_enormous() {
        let s = schedule_sigma_infinity(3, 2, 0.1, EpsilonSeq::default(), &Sizing::default()).unwrap();
        assert!(s.learning(0).unwrap() > 1_000_000_000);
    }
}
