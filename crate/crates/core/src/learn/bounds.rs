use serde::Serialize;

use super::LearnError;

/// Ceiling that ignores floating point noise just above an integer.
pub fn ceil_tol(x: f64) -> f64 {
    (x - 1e-9 * x.abs().max(1.0)).ceil()
}

fn check_unit(name: &'static str, x: f64) -> Result<(), LearnError> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(LearnError::Range(name, x))
    }
}

/// Samples per state-action pair so that every empirical transition
/// probability is within `epsilon` of the truth with probability at least
/// `1 - gamma`: `ceil((ln(2 n^2 m) - ln gamma) / (2 epsilon^2))`.
pub fn hoeffding_samples(n_states: usize, n_actions: usize, epsilon: f64, gamma: f64) -> Result<u64, LearnError> {
    check_unit("epsilon", epsilon)?;
    check_unit("gamma", gamma)?;
    if n_states == 0 || n_actions == 0 {
        return Err(LearnError::Range("size", 0.0));
    }
    let cells = 2.0 * (n_states * n_states * n_actions) as f64;
    Ok(ceil_tol((cells.ln() - gamma.ln()) / (2.0 * epsilon * epsilon)) as u64)
}

/// Natural log of the per-episode lower bound `(pi_min / m)^n` on the
/// probability that an exploration episode of `n` steps follows a given path.
pub fn ln_visit_bound(n_states: usize, n_actions: usize, pi_min: f64) -> f64 {
    n_states as f64 * (pi_min / n_actions as f64).ln()
}

/// Number of uniform exploration episodes of `|Q|` steps that suffice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpisodeCount {
    /// Per-episode visit bound; may underflow to 0, see `ln_mu`.
    pub mu: f64,
    pub ln_mu: f64,
    /// Samples needed per state-action pair.
    pub k: u64,
    /// Number of episodes, if it fits in 128 bits.
    pub n: Option<u128>,
    pub ln_n: f64,
}

impl EpisodeCount {
    /// Episode count saturated to `u64::MAX`.
    pub fn episodes_saturating(&self) -> u64 {
        self.n.map(|n| n.min(u64::MAX as u128) as u64).unwrap_or(u64::MAX)
    }
}

/// Episodes of `|Q|` steps of uniform exploration after which every
/// state-action pair was tried at least `k` times with probability at least
/// `1 - gamma/2`, where `k` samples give `epsilon` accuracy with probability
/// `1 - gamma/2`.
///
/// Computed in log space. With `mu = (pi_min/m)^n` and `c = ln(2 n m) - ln
/// gamma`, the count is the smallest integer at least `k / mu` and at least
/// the larger root in `N` of `(N mu - k + 1)^2 = (N/2) c`.
pub fn exploration_episode_count(
    n_states: usize,
    n_actions: usize,
    pi_min: f64,
    epsilon: f64,
    gamma: f64,
) -> Result<EpisodeCount, LearnError> {
    check_unit("epsilon", epsilon)?;
    check_unit("gamma", gamma)?;
    if !(pi_min > 0.0 && pi_min <= 1.0) {
        return Err(LearnError::Range("pi_min", pi_min));
    }
    if n_states == 0 || n_actions == 0 {
        return Err(LearnError::Range("size", 0.0));
    }
    let ln_mu = ln_visit_bound(n_states, n_actions, pi_min);
    let cells = 4.0 * (n_states * n_states * n_actions) as f64;
    let k = ceil_tol((cells.ln() - gamma.ln()) / (2.0 * epsilon * epsilon));
    let c = (2.0 * (n_states * n_actions) as f64).ln() - gamma.ln();
    let km1 = k - 1.0;
    // Substituting v = N mu: v^2 - (2(k-1) + c/(2 mu)) v + (k-1)^2 = 0.
    let ln_half_c_over_mu = (c / 2.0).ln() - ln_mu;
    // Root = b (1 + sqrt(1 - x^2)) / 2 with b = 2(k-1) + c/(2 mu) and
    // x = 2(k-1)/b, evaluated in log space.
    let ln_a = (2.0 * km1).ln();
    let (hi, lo) = if ln_a > ln_half_c_over_mu { (ln_a, ln_half_c_over_mu) } else { (ln_half_c_over_mu, ln_a) };
    let ln_b = hi + (lo - hi).exp().ln_1p();
    let x = (ln_a - ln_b).exp();
    let ln_root = ln_b + ((1.0 + (1.0 - x * x).max(0.0).sqrt()) / 2.0).ln();
    let ln_n_first = k.ln() - ln_mu;
    let ln_n_second = ln_root - ln_mu;
    let ln_n = ln_n_first.max(ln_n_second);
    let n = if ln_n < 120.0 * std::f64::consts::LN_2 {
        Some(ceil_tol(ln_n.exp()) as u128)
    } else {
        None
    };
    Ok(EpisodeCount { mu: ln_mu.exp(), ln_mu, k: k as u64, n, ln_n })
}

/// Lower bound on the infinite product `prod_{j >= m} (1 - 2^{-j})`:
/// forty explicit factors times the closed tail bound.
pub fn tail_product_lower(m: u32) -> f64 {
    let mut p = 1.0;
    for j in m..=m + 40 {
        p *= 1.0 - (-(j as f64)).exp2();
    }
    p * (1.0 - (-((m + 40) as f64)).exp2())
}

/// Smallest `m >= 1` with `tail_product_lower(m) >= 1 - x`.
pub fn product_threshold(x: f64) -> u32 {
    let mut m = 1;
    while tail_product_lower(m) < 1.0 - x {
        m += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hoeffding_examples() {
        assert_eq!(hoeffding_samples(2, 2, 0.1, 0.05).unwrap(), 289);
        assert_eq!(hoeffding_samples(1, 1, 0.5, 0.5).unwrap(), 3);
        // (ln 16 + ln 100) / 0.02 = 368.9.
        assert_eq!(hoeffding_samples(2, 2, 0.1, 0.01).unwrap(), 369);
        assert!(hoeffding_samples(2, 2, 0.0, 0.1).is_err());
        assert!(hoeffding_samples(2, 2, 0.1, 1.0).is_err());
    }

    /// Smallest integer `N >= k/mu` with `(N mu - k + 1)^2 >= (N/2) c`,
    /// found by scanning upward.
    fn scan_oracle(n_states: usize, n_actions: usize, pi_min: f64, epsilon: f64, gamma: f64) -> u64 {
        let mu = (pi_min / n_actions as f64).powi(n_states as i32);
        let k = (((4 * n_states * n_states * n_actions) as f64).ln() - gamma.ln()) / (2.0 * epsilon * epsilon);
        let k = k.ceil();
        let c = ((2 * n_states * n_actions) as f64).ln() - gamma.ln();
        let mut n = (k / mu - 1e-9).ceil() as u64;
        loop {
            let lhs = (n as f64 * mu - k + 1.0).powi(2);
            if lhs >= n as f64 / 2.0 * c && n as f64 * mu >= k - 1.0 {
                return n;
            }
            n += 1;
        }
    }

    #[test]
    fn episode_count_example() {
        let e = exploration_episode_count(2, 2, 0.5, 0.1, 0.05).unwrap();
        assert!((e.mu - 1.0 / 16.0).abs() < 1e-15);
        // (ln 32 + ln 20) / 0.02 = 323.07.
        assert_eq!(e.k, 324);
        assert_eq!(e.n.unwrap() as u64, scan_oracle(2, 2, 0.5, 0.1, 0.05));
        assert_eq!(e.n.unwrap(), 7354);
    }

    #[test]
    fn episode_count_matches_scan() {
        for &(n, m, p, eps, g) in &[(3, 2, 0.2, 0.3, 0.1), (1, 1, 1.0, 0.2, 0.2), (2, 3, 0.3, 0.25, 0.05), (4, 2, 0.5, 0.4, 0.3)] {
            let e = exploration_episode_count(n, m, p, eps, g).unwrap();
            assert_eq!(e.n.unwrap() as u64, scan_oracle(n, m, p, eps, g), "{n} {m} {p} {eps} {g}");
        }
    }

    #[test]
    fn mu_values() {
        let e = exploration_episode_count(3, 2, 0.2, 0.1, 0.1).unwrap();
        assert!((e.mu - 1e-3).abs() < 1e-15);
        let e = exploration_episode_count(3, 1, 1.0, 0.1, 0.1).unwrap();
        assert_eq!(e.mu, 1.0);
        assert!(e.n.unwrap() as u64 >= e.k);
        assert_eq!(e.n.unwrap() as u64, scan_oracle(3, 1, 1.0, 0.1, 0.1));
    }

    #[test]
    fn huge_counts_stay_finite_in_log_space() {
        let e = exploration_episode_count(150, 4, 0.01, 0.01, 0.01).unwrap();
        assert!(e.n.is_none());
        assert!(e.ln_n.is_finite() && e.ln_n > 1500.0);
        assert_eq!(e.mu, 0.0);
    }

    #[test]
    fn tail_products() {
        assert_eq!(product_threshold(0.5), 2);
        assert_eq!(product_threshold(0.25), 3);
        assert!((tail_product_lower(2) - 0.5776).abs() < 1e-4);
        assert!((tail_product_lower(3) - 0.7701).abs() < 1e-4);
    }
}
