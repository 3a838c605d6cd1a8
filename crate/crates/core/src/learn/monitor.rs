use serde::Serialize;

use super::bounds::{ceil_tol, product_threshold, tail_product_lower};
use super::LearnError;

/// `(pi_min / |A|)^{|Q|}`: a lower bound on the probability that one
/// learning phase of at least `|Q|` exploration steps visits a given
/// state of a strongly connected component.
pub fn zeta_lb(pi_min: f64, n_actions: usize, n_states: usize) -> f64 {
    (pi_min / n_actions as f64).powi(n_states as i32)
}

/// Smallest `n >= 1` with `zeta^n <= 2^{-target}`.
pub fn episode_count_for_target(zeta: f64, target: u32) -> u64 {
    if zeta <= 0.0 {
        return 1;
    }
    let n = ceil_tol(target as f64 * std::f64::consts::LN_2 / -zeta.ln());
    n.max(1.0).min(u64::MAX as f64) as u64
}

/// Counter start and per-level episode counts `n_j` with
/// `zeta^{n_j} <= 2^{-(K0 + j)}`, so that `prod_j (1 - zeta^{n_j}) >= 1 - gamma`.
pub fn fbstrat_episode_counts(gamma: f64, zeta: f64, levels: usize) -> Result<(u32, Vec<u64>), LearnError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(LearnError::Range("gamma", gamma));
    }
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(LearnError::Range("zeta", zeta));
    }
    let k0 = product_threshold(gamma);
    Ok((k0, (0..levels).map(|j| episode_count_for_target(zeta, k0 + j as u32)).collect()))
}

/// Monitoring plan for the minimal even priority: the run is split into
/// windows of whole episodes, window `i` having `window_len(K0 + i)`
/// episodes. A window without a visit to a minimal-priority state ends the
/// optimization attempt.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonitorPlan {
    pub k0: u32,
    pub zeta_lb: f64,
    pub gamma: f64,
}

pub fn monitor_plan(n_states: usize, n_actions: usize, pi_min: f64, gamma: f64) -> Result<MonitorPlan, LearnError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(LearnError::Range("gamma", gamma));
    }
    if n_states == 0 || n_actions == 0 || !(pi_min > 0.0 && pi_min <= 1.0) {
        return Err(LearnError::Range("pi_min", pi_min));
    }
    Ok(MonitorPlan { k0: product_threshold(gamma), zeta_lb: zeta_lb(pi_min, n_actions, n_states), gamma })
}

impl MonitorPlan {
    /// Smallest `l` with `(1 - zeta)^l <= 2^{-k}`.
    pub fn window_len(&self, k: u32) -> u64 {
        if self.zeta_lb >= 1.0 {
            return 1;
        }
        let n = ceil_tol(k as f64 * std::f64::consts::LN_2 / -(-self.zeta_lb).ln_1p());
        n.max(1.0).min(u64::MAX as f64) as u64
    }

    /// Episode indices at which the first `count` windows end.
    pub fn window_ends(&self, count: usize) -> Vec<u64> {
        let mut end = 0u64;
        (0..count)
            .map(|i| {
                end = end.saturating_add(self.window_len(self.k0 + i as u32));
                end
            })
            .collect()
    }

    /// Step indices `J_0 = 0, J_1, ...` at which windows start, given the
    /// start step of every episode (`starts[e]` for episode `e`).
    pub fn boundaries(&self, starts: &[u64]) -> Vec<u64> {
        let mut out = vec![0];
        for e in self.window_ends(starts.len()) {
            match starts.get(e as usize) {
                Some(&s) => out.push(s),
                None => break,
            }
        }
        out
    }

    /// Numerical check that the windows fail with total probability at
    /// most `gamma`.
    pub fn budget_holds(&self) -> bool {
        tail_product_lower(self.k0) >= 1.0 - self.gamma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(zeta_lb(0.25, 2, 2), 1.0 / 64.0);
        let plan = monitor_plan(2, 2, 0.25, 0.5).unwrap();
        assert_eq!(plan.k0, 2);
        assert_eq!(plan.window_len(3), 133);
        assert!(plan.budget_holds());
        assert_eq!(episode_count_for_target(0.5, 5), 5);
        assert_eq!(episode_count_for_target(1.0 / 64.0, 6), 1);
    }

    #[test]
    fn counts_are_nondecreasing() {
        let (k0, n) = fbstrat_episode_counts(0.3, 0.01, 10).unwrap();
        assert_eq!(k0, product_threshold(0.3));
        assert!(n.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn boundaries_follow_episode_starts() {
        let plan = MonitorPlan { k0: 1, zeta_lb: 0.5, gamma: 0.9 };
        // Windows of 1, 2, 3 episodes.
        assert_eq!(plan.window_ends(3), vec![1, 3, 6]);
        let starts: Vec<u64> = (0..7).map(|e| 10 * e).collect();
        assert_eq!(plan.boundaries(&starts), vec![0, 10, 30, 60]);
    }
}
