use nalgebra::{DMatrix, DVector};

use super::SolverError;
use crate::graphs::bscc_decomposition;
use crate::model::MarkovChain;

/// Largest chain handled by the dense linear solves.
pub const MAX_DENSE_CHAIN: usize = 4000;

/// Stationary distribution of the closed class `class` (sorted states).
pub fn stationary_distribution(chain: &MarkovChain, class: &[usize]) -> Result<Vec<f64>, SolverError> {
    let k = class.len();
    if k == 1 {
        return Ok(vec![1.0]);
    }
    let pos = |s: usize| class.binary_search(&s).ok();
    // Solve pi (P - I) = 0 with the last equation replaced by sum(pi) = 1.
    let mut a = DMatrix::<f64>::zeros(k, k);
    for (i, &s) in class.iter().enumerate() {
        a[(i, i)] -= 1.0;
        for &(t, p) in &chain.succ[s] {
            if let Some(j) = pos(t) {
                a[(j, i)] += p;
            }
        }
    }
    for j in 0..k {
        a[(k - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(k);
    b[k - 1] = 1.0;
    let x = a.lu().solve(&b).ok_or(SolverError::Singular)?;
    Ok(x.iter().copied().collect())
}

/// Expected mean payoff from every state of a finite chain.
pub fn chain_gain(chain: &MarkovChain) -> Result<Vec<f64>, SolverError> {
    let n = chain.len();
    if n > MAX_DENSE_CHAIN {
        return Err(SolverError::TooLarge(n));
    }
    let bsccs = bscc_decomposition(chain);
    let mut gain = vec![0.0; n];
    let mut recurrent = vec![false; n];
    for b in &bsccs {
        let pi = stationary_distribution(chain, b)?;
        let g: f64 = b.iter().zip(&pi).map(|(&s, p)| p * chain.reward[s]).sum();
        for &s in b {
            gain[s] = g;
            recurrent[s] = true;
        }
    }
    let transient: Vec<usize> = (0..n).filter(|&s| !recurrent[s]).collect();
    if transient.is_empty() {
        return Ok(gain);
    }
    let mut index = vec![usize::MAX; n];
    for (i, &s) in transient.iter().enumerate() {
        index[s] = i;
    }
    let k = transient.len();
    let mut a = DMatrix::<f64>::identity(k, k);
    let mut b = DVector::<f64>::zeros(k);
    for (i, &s) in transient.iter().enumerate() {
        for &(t, p) in &chain.succ[s] {
            if recurrent[t] {
                b[i] += p * gain[t];
            } else {
                a[(i, index[t])] -= p;
            }
        }
    }
    let x = a.lu().solve(&b).ok_or(SolverError::Singular)?;
    for (i, &s) in transient.iter().enumerate() {
        gain[s] = x[i];
    }
    Ok(gain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_product_chain, Memoryless, StateId};
    use crate::harness::examples::{fig1_right, Fig1RightParams};

    fn det(succ: Vec<Vec<(usize, f64)>>, reward: Vec<f64>) -> MarkovChain {
        let n = succ.len();
        MarkovChain { succ, reward, priority: vec![0; n] }
    }

    #[test]
    fn deterministic_cycle() {
        let c = det(vec![vec![(1, 1.0)], vec![(0, 1.0)]], vec![0.0, 1.0]);
        let g = chain_gain(&c).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-12 && (g[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn convex_combination_of_bottoms() {
        let c = det(vec![vec![(1, 0.5), (2, 0.5)], vec![(1, 1.0)], vec![(2, 1.0)]], vec![0.3, 0.0, 1.0]);
        assert!((chain_gain(&c).unwrap()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fig1_right_always_b() {
        let inst = fig1_right(&Fig1RightParams::default()).unwrap();
        let b = inst.automaton.action_by_name("b").unwrap();
        let a = inst.automaton.action_by_name("a").unwrap();
        let m = Memoryless::new(vec![b, a, a, a, a]);
        let chain = build_product_chain(&inst.automaton, &inst.hidden, &m, StateId(0), 100).unwrap();
        let g = chain_gain(&chain.to_markov_chain()).unwrap();
        assert!((g[0] - 0.7).abs() < 1e-12, "{}", g[0]);
    }
}
