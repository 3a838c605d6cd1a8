use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::SolverError;
use crate::model::rational::{format_rational, rational_to_f64};

/// Closeness needed for a model-optimal strategy to be `epsilon`-optimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RobustnessBound {
    pub epsilon: BigRational,
    /// Maximal entrywise probability error.
    pub eta: BigRational,
    /// Maximal reward error.
    pub reward_slack: BigRational,
}

#[derive(Serialize)]
struct BoundView {
    epsilon: String,
    eta: String,
    eta_f64: f64,
    reward_slack: String,
}

impl Serialize for RobustnessBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        BoundView {
            epsilon: format_rational(&self.epsilon),
            eta: format_rational(&self.eta),
            eta_f64: rational_to_f64(&self.eta),
            reward_slack: format_rational(&self.reward_slack),
        }
        .serialize(s)
    }
}

impl RobustnessBound {
    pub fn eta_f64(&self) -> f64 {
        rational_to_f64(&self.eta)
    }
}

/// `eta = epsilon * pi_min / (24 n)` and `reward_slack = epsilon / 4`, exactly.
pub fn robustness_eta(epsilon: &BigRational, pi_min: &BigRational, n_states: usize) -> Result<RobustnessBound, SolverError> {
    if epsilon <= &BigRational::zero() || epsilon >= &BigRational::one() {
        return Err(SolverError::Precondition("epsilon must lie in (0,1)".into()));
    }
    if pi_min <= &BigRational::zero() || pi_min > &BigRational::one() {
        return Err(SolverError::Precondition("pi_min must lie in (0,1]".into()));
    }
    if n_states == 0 {
        return Err(SolverError::Precondition("need at least one state".into()));
    }
    let eta = epsilon * pi_min / BigRational::from_integer((24 * n_states).into());
    let reward_slack = epsilon / BigRational::from_integer(4.into());
    Ok(RobustnessBound { epsilon: epsilon.clone(), eta, reward_slack })
}

/// Bound on the difference of optimal gains between two same-support MDPs
/// whose probabilities differ by at most `eta` and rewards by at most
/// `reward_gap`: `4 n (eta/pi) / (1 - 2 n (eta/pi)) + reward_gap`.
pub fn perturbation_gap_bound(eta: f64, pi_min: f64, n_states: usize, reward_gap: f64) -> Result<f64, SolverError> {
    if pi_min <= 0.0 || eta < 0.0 || reward_gap < 0.0 {
        return Err(SolverError::Precondition("negative input or nonpositive pi_min".into()));
    }
    let ratio = eta / pi_min;
    let n = n_states as f64;
    let denom = 1.0 - 2.0 * n * ratio;
    if denom <= 0.0 {
        return Err(SolverError::Precondition("2 n eta / pi_min must be below 1".into()));
    }
    Ok(4.0 * n * ratio / denom + reward_gap)
}
