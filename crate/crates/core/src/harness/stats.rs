use serde::{Deserialize, Serialize};

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Wilson score interval for `passes` successes out of `n` trials.
pub fn wilson_interval(passes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = passes as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Pass count of one guarantee over a set of trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeStat {
    pub name: String,
    pub passes: u64,
    pub n: u64,
    pub pass_fraction: f64,
    pub wilson_ci_99: (f64, f64),
}

impl GuaranteeStat {
    pub fn new(name: impl Into<String>, passes: u64, n: u64) -> Self {
        let pass_fraction = if n == 0 { 0.0 } else { passes as f64 / n as f64 };
        Self { name: name.into(), passes, n, pass_fraction, wilson_ci_99: wilson_interval(passes, n, Z_99) }
    }

    /// Counts the trials for which `pass` holds.
    pub fn count<T>(name: impl Into<String>, items: &[T], pass: impl Fn(&T) -> bool) -> Self {
        let passes = items.iter().filter(|t| pass(t)).count() as u64;
        Self::new(name, passes, items.len() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_closed_form_reference() {
        // 240/300 at 99%: reference values computed from the score formula
        // solved as a quadratic in p.
        let (lo, hi) = wilson_interval(240, 300, Z_99);
        let (n, p, z) = (300.0_f64, 0.8_f64, Z_99);
        let a = 1.0 + z * z / n;
        let b = -(2.0 * p + z * z / n);
        let c = p * p;
        let disc = (b * b - 4.0 * a * c).sqrt();
        assert!((lo - (-b - disc) / (2.0 * a)).abs() < 1e-12);
        assert!((hi - (-b + disc) / (2.0 * a)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_counts() {
        assert_eq!(wilson_interval(0, 0, Z_99), (0.0, 1.0));
        let (lo, hi) = wilson_interval(10, 10, Z_99);
        assert!(lo > 0.4 && hi == 1.0);
        let (lo, _) = wilson_interval(0, 10, Z_99);
        assert_eq!(lo, 0.0);
    }

    #[test]
    fn quantile_is_the_99_percent_point() {
        // Numerical integration of the standard normal density over [-z, z].
        let steps = 200_000;
        let h = 2.0 * Z_99 / steps as f64;
        let pdf = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut mass = 0.0;
        for i in 0..steps {
            let x = -Z_99 + (i as f64 + 0.5) * h;
            mass += pdf(x) * h;
        }
        assert!((mass - 0.99).abs() < 1e-8, "{mass}");
    }
}
