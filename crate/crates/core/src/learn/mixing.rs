use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bounds::{ceil_tol, product_threshold};
use super::LearnError;
use crate::model::MarkovChain;
use crate::solver::chain_gain;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixingSource {
    DefaultFormula,
    UserSupplied,
    EmpiricalCalibration,
}

/// Constants of a concentration tail `c1 * exp(-k * c2 * eps^2)` for the
/// probability that the average reward after `k` steps is more than `eps`
/// away from the gain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingParams {
    pub c1: f64,
    pub c2: f64,
    pub source: MixingSource,
}

impl MixingParams {
    /// Conservative default `c1 = 2`, `c2 = pi_min^(2n) / (2n)`.
    pub fn default_for(n_states: usize, pi_min: f64) -> Self {
        let n = n_states.max(1) as f64;
        Self { c1: 2.0, c2: pi_min.powf(2.0 * n) / (2.0 * n), source: MixingSource::DefaultFormula }
    }

    pub fn user(c1: f64, c2: f64) -> Result<Self, LearnError> {
        if !(c1 >= 1.0 && c1.is_finite()) {
            return Err(LearnError::Range("c1", c1));
        }
        if !(c2 > 0.0 && c2.is_finite()) {
            return Err(LearnError::Range("c2", c2));
        }
        Ok(Self { c1, c2, source: MixingSource::UserSupplied })
    }

    /// Fits `c2` (with `c1 = 2`) so that the tail dominates the observed
    /// frequencies of `|average - gain| > eps` over `runs` simulations of
    /// `chain` from state 0, for each of the given lengths.
    ///
    /// A length with no observed deviation counts as frequency `1/runs`.
    pub fn calibrate(chain: &MarkovChain, eps: f64, lengths: &[u64], runs: u32, seed: u64) -> Result<Self, LearnError> {
        if lengths.is_empty() || runs == 0 || !(eps > 0.0) {
            return Err(LearnError::Range("calibration", eps));
        }
        let gain = chain_gain(chain).map_err(LearnError::Solver)?[0];
        let c1 = 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c2 = f64::INFINITY;
        for &k in lengths {
            let mut bad = 0u32;
            for _ in 0..runs {
                let mut s = 0usize;
                let mut total = 0.0;
                for _ in 0..k {
                    total += chain.reward[s];
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    let row = &chain.succ[s];
                    s = row.last().expect("nonempty row").0;
                    for &(t, p) in row {
                        acc += p;
                        if u < acc {
                            s = t;
                            break;
                        }
                    }
                }
                if (total / k as f64 - gain).abs() > eps {
                    bad += 1;
                }
            }
            let freq = (bad.max(1) as f64) / runs as f64;
            c2 = c2.min((c1 / freq).ln() / (k as f64 * eps * eps));
        }
        Ok(Self { c1, c2: c2.max(f64::MIN_POSITIVE), source: MixingSource::EmpiricalCalibration })
    }
}

/// Smallest `k >= 1` with `c1 exp(-k c2 eps^2) <= 2^{-k}`, if one exists.
pub fn tail_start(eps: f64, mixing: &MixingParams) -> Option<u64> {
    let a = mixing.c2 * eps * eps;
    let slope = a - std::f64::consts::LN_2;
    let lc1 = mixing.c1.ln();
    if slope > 0.0 {
        Some(ceil_tol(lc1 / slope).max(1.0).min(u64::MAX as f64) as u64)
    } else if lc1 <= 0.0 && slope == 0.0 {
        Some(1)
    } else {
        None
    }
}

/// Steps after which the running average stays within `eps` of the gain
/// with probability at least `1 - eps`.
///
/// This is the larger of the tail start and the smallest `m` with
/// `prod_{j >= m} (1 - 2^{-j}) >= 1 - eps`. When the tail never drops below
/// `2^{-k}` (small `c2 eps^2`), the tail start is replaced by the smallest
/// `k` with `sum_{j >= k} c1 exp(-j c2 eps^2) <= eps`.
pub fn mixing_horizon(eps: f64, mixing: &MixingParams) -> Result<u64, LearnError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LearnError::Range("epsilon", eps));
    }
    let k1 = match tail_start(eps, mixing) {
        Some(k) => k,
        None => {
            let a = mixing.c2 * eps * eps;
            let one_minus = -(-a).exp_m1();
            let k = (mixing.c1.ln() - eps.ln() - one_minus.ln()) / a;
            ceil_tol(k).max(1.0).min(u64::MAX as f64) as u64
        }
    };
    Ok(k1.max(product_threshold(eps) as u64))
}
