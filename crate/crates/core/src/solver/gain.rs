use std::collections::{BTreeMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::chain::stationary_distribution;
use super::mdp::Mdp;
use super::SolverError;
use crate::graphs::{bscc_decomposition, mec_raw};
use crate::model::ActionId;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Span stopping threshold, relative to the largest expected reward.
    pub tol: f64,
    pub max_iter: u64,
    /// Weight of the original transition in the aperiodicity transform.
    pub tau: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 1_000_000, tau: 0.5 }
    }
}

/// Optimal expected mean payoff per state with a memoryless deterministic
/// optimal strategy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GainSolution {
    pub gain: Vec<f64>,
    /// Chosen action per present state (`None` for absent states).
    pub strategy: Vec<Option<ActionId>>,
    /// Whether the strategy's chain has a single bottom component.
    pub unichain: bool,
    /// Largest span reached by value iteration over all components.
    pub residual: f64,
}

impl GainSolution {
    /// Strategy as a dense table; absent states get action 0.
    pub fn dense_strategy(&self) -> Vec<ActionId> {
        self.strategy.iter().map(|a| a.unwrap_or(ActionId(0))).collect()
    }

    /// Largest gain over present states.
    pub fn max_gain(&self) -> f64 {
        self.gain
            .iter()
            .zip(&self.strategy)
            .filter(|(_, s)| s.is_some())
            .map(|(g, _)| *g)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Result of solving one maximal end component.
struct ComponentSolution {
    gain: f64,
    policy: BTreeMap<usize, ActionId>,
    residual: f64,
}

/// Optimal gain and a memoryless deterministic optimal strategy, unichain
/// inside every maximal end component it stays in.
pub fn optimal_gain(mdp: &Mdp, opts: &SolverOptions) -> Result<GainSolution, SolverError> {
    let n = mdp.n_states();
    let scale = mdp.reward_scale();
    let graph = mdp.action_graph();
    let present: BTreeMap<usize, Vec<ActionId>> = (0..n)
        .filter(|&q| mdp.is_present(q))
        .map(|q| (q, mdp.choices[q].iter().map(|c| c.action).collect()))
        .collect();
    if present.is_empty() {
        return Err(SolverError::Precondition("no state has an action".into()));
    }
    if let Some((q, _)) = present
        .iter()
        .find(|(q, _)| mdp.choices[**q].iter().any(|c| c.outcomes.iter().any(|o| !mdp.is_present(o.0))))
    {
        return Err(SolverError::Precondition(format!("state {q} has a successor outside the model")));
    }
    let mecs = mec_raw(&graph, &present);
    let mut node_of = vec![usize::MAX; n];
    for (i, m) in mecs.iter().enumerate() {
        for &q in m.keys() {
            node_of[q] = i;
        }
    }
    let transient: Vec<usize> = present.keys().copied().filter(|&q| node_of[q] == usize::MAX).collect();
    for (j, &q) in transient.iter().enumerate() {
        node_of[q] = mecs.len() + j;
    }
    let solved: Vec<ComponentSolution> =
        mecs.iter().map(|m| solve_component(mdp, m, scale, opts)).collect::<Result<_, _>>()?;

    let quotient = build_quotient(mdp, &mecs, &transient, &node_of);
    let choice = quotient_policy_iteration(&quotient, &solved, scale)?;

    let mut strategy = vec![None; n];
    let mut gain = vec![0.0; n];
    for (i, m) in mecs.iter().enumerate() {
        match quotient.options[i][choice.policy[i]] {
            QuotientOption::Stay => {
                for (&q, &a) in &solved[i].policy {
                    strategy[q] = Some(a);
                }
            }
            QuotientOption::Move { state, action, .. } => {
                let toward = approach(mdp, m, &[state]);
                for (&q, &a) in &toward {
                    strategy[q] = Some(a);
                }
                strategy[state] = Some(action);
            }
        }
        for &q in m.keys() {
            gain[q] = choice.values[i];
        }
    }
    for (j, &q) in transient.iter().enumerate() {
        let node = mecs.len() + j;
        if let QuotientOption::Move { action, .. } = quotient.options[node][choice.policy[node]] {
            strategy[q] = Some(action);
        }
        gain[q] = choice.values[node];
    }
    let chain = mdp.chain_of(&strategy);
    let bottoms = bscc_decomposition(&chain);
    let unichain = bottoms.iter().filter(|b| mdp.is_present(b[0])).count() == 1;
    let residual = solved.iter().map(|s| s.residual).fold(0.0, f64::max);
    Ok(GainSolution { gain, strategy, unichain, residual })
}

/// Relative value iteration on one maximal end component followed by
/// exact evaluation of the greedy policy and restitching to a unichain
/// policy. Falls back to policy iteration if value iteration hits the cap.
fn solve_component(
    mdp: &Mdp,
    comp: &BTreeMap<usize, Vec<ActionId>>,
    scale: f64,
    opts: &SolverOptions,
) -> Result<ComponentSolution, SolverError> {
    let states: Vec<usize> = comp.keys().copied().collect();
    let k = states.len();
    let mut local = BTreeMap::new();
    for (i, &q) in states.iter().enumerate() {
        local.insert(q, i);
    }
    // Local copy of the allowed choices: (mean reward, [(local successor, prob)], action).
    let rows: Vec<Vec<(f64, Vec<(usize, f64)>, ActionId)>> = states
        .iter()
        .map(|q| {
            comp[q]
                .iter()
                .map(|&a| {
                    let c = mdp.choice(*q, a).expect("allowed action exists");
                    let succ = c.outcomes.iter().map(|&(t, p, _)| (local[&t], p)).collect();
                    (c.mean_reward, succ, a)
                })
                .collect()
        })
        .collect();
    let tau = opts.tau;
    let stop = opts.tol * scale;
    let mut h = vec![0.0; k];
    let mut next = vec![0.0; k];
    let mut span = f64::INFINITY;
    let mut converged = false;
    for _ in 0..opts.max_iter {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..k {
            let best = rows[i]
                .iter()
                .map(|(r, succ, _)| r + tau * succ.iter().map(|&(t, p)| p * h[t]).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            next[i] = best + (1.0 - tau) * h[i];
            let d = next[i] - h[i];
            lo = lo.min(d);
            hi = hi.max(d);
        }
        span = hi - lo;
        let base = next[0];
        for i in 0..k {
            h[i] = next[i] - base;
        }
        if span <= stop {
            converged = true;
            break;
        }
    }
    if !converged {
        return component_policy_iteration(mdp, comp, &states, &rows, scale).map(|mut s| {
            s.residual = span;
            s
        });
    }
    // Greedy policy with ties to the lowest action.
    let tie = 1e-11 * scale;
    let mut policy = BTreeMap::new();
    for (i, &q) in states.iter().enumerate() {
        let values: Vec<f64> =
            rows[i].iter().map(|(r, succ, _)| r + tau * succ.iter().map(|&(t, p)| p * h[t]).sum::<f64>()).collect();
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let j = values.iter().position(|&v| v >= best - tie).expect("nonempty row");
        policy.insert(q, rows[i][j].2);
    }
    let (policy, gain) = make_unichain(mdp, comp, policy)?;
    Ok(ComponentSolution { gain, policy, residual: span })
}

/// Evaluates the bottom components of `policy` inside `comp` and, if there
/// are several, redirects every state outside the best one toward it.
fn make_unichain(
    mdp: &Mdp,
    comp: &BTreeMap<usize, Vec<ActionId>>,
    policy: BTreeMap<usize, ActionId>,
) -> Result<(BTreeMap<usize, ActionId>, f64), SolverError> {
    let mut strategy = vec![None; mdp.n_states()];
    for (&q, &a) in &policy {
        strategy[q] = Some(a);
    }
    let chain = mdp.chain_of(&strategy);
    let bottoms: Vec<Vec<usize>> = bscc_decomposition(&chain).into_iter().filter(|b| policy.contains_key(&b[0])).collect();
    let mut best: Option<(f64, usize)> = None;
    for (i, b) in bottoms.iter().enumerate() {
        let pi = stationary_distribution(&chain, b)?;
        let g: f64 = b.iter().zip(&pi).map(|(&s, p)| p * chain.reward[s]).sum();
        if best.is_none_or(|(bg, _)| g > bg) {
            best = Some((g, i));
        }
    }
    let (gain, idx) = best.ok_or(SolverError::Precondition("component without bottom class".into()))?;
    if bottoms.len() == 1 {
        return Ok((policy, gain));
    }
    let target = &bottoms[idx];
    let mut out = approach(mdp, comp, target);
    for &q in target {
        out.insert(q, policy[&q]);
    }
    Ok((out, gain))
}

/// Lowest action moving one step closer to `targets` inside `comp`, for
/// every state of `comp` not in `targets` (which get their first action).
fn approach(mdp: &Mdp, comp: &BTreeMap<usize, Vec<ActionId>>, targets: &[usize]) -> BTreeMap<usize, ActionId> {
    let mut dist: BTreeMap<usize, usize> = targets.iter().map(|&t| (t, 0)).collect();
    let mut pred: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&q, acts) in comp {
        for &a in acts {
            for o in &mdp.choice(q, a).expect("allowed action").outcomes {
                pred.entry(o.0).or_default().push(q);
            }
        }
    }
    let mut queue: VecDeque<usize> = targets.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for &u in pred.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if !dist.contains_key(&u) {
                dist.insert(u, d + 1);
                queue.push_back(u);
            }
        }
    }
    comp.iter()
        .map(|(&q, acts)| {
            let d = dist[&q];
            let a = if d == 0 {
                acts[0]
            } else {
                *acts
                    .iter()
                    .find(|&&a| {
                        mdp.choice(q, a).expect("allowed").outcomes.iter().any(|o| dist.get(&o.0) == Some(&(d - 1)))
                    })
                    .expect("distance witness")
            };
            (q, a)
        })
        .collect()
}

/// Unichain policy iteration on a communicating component, used when value
/// iteration does not converge within the cap.
fn component_policy_iteration(
    mdp: &Mdp,
    comp: &BTreeMap<usize, Vec<ActionId>>,
    states: &[usize],
    rows: &[Vec<(f64, Vec<(usize, f64)>, ActionId)>],
    scale: f64,
) -> Result<ComponentSolution, SolverError> {
    let k = states.len();
    let (mut policy, _) = make_unichain(mdp, comp, approach(mdp, comp, &states[..1]))?;
    let tie = 1e-11 * scale;
    for _ in 0..10_000 {
        let pick: Vec<usize> = states
            .iter()
            .enumerate()
            .map(|(i, q)| rows[i].iter().position(|r| r.2 == policy[q]).expect("policy action"))
            .collect();
        // Solve g + h = r + P h with h[0] = 0; unknowns (g, h[1..]).
        let mut a = DMatrix::<f64>::zeros(k, k);
        let mut b = DVector::<f64>::zeros(k);
        for i in 0..k {
            let (r, succ, _) = &rows[i][pick[i]];
            a[(i, 0)] = 1.0;
            if i > 0 {
                a[(i, i)] += 1.0;
            }
            for &(t, p) in succ {
                if t > 0 {
                    a[(i, t)] -= p;
                }
            }
            b[i] = *r;
        }
        let x = a.lu().solve(&b).ok_or(SolverError::Singular)?;
        let g = x[0];
        let h = |t: usize| if t == 0 { 0.0 } else { x[t] };
        let mut changed = false;
        let mut improved = BTreeMap::new();
        for (i, &q) in states.iter().enumerate() {
            let values: Vec<f64> =
                rows[i].iter().map(|(r, succ, _)| r + succ.iter().map(|&(t, p)| p * h(t)).sum::<f64>()).collect();
            let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let cur = values[pick[i]];
            let j = if best > cur + tie { values.iter().position(|&v| v >= best - tie).expect("row") } else { pick[i] };
            changed |= j != pick[i];
            improved.insert(q, rows[i][j].2);
        }
        if !changed {
            return Ok(ComponentSolution { gain: g, policy, residual: 0.0 });
        }
        policy = make_unichain(mdp, comp, improved)?.0;
    }
    Err(SolverError::NoConvergence)
}

#[derive(Clone, Debug)]
enum QuotientOption {
    /// Remain in the component forever, earning its optimal gain.
    Stay,
    /// Play `action` at `state`, reaching nodes with the given probabilities.
    Move { state: usize, action: ActionId, to: Vec<(usize, f64)> },
}

struct Quotient {
    options: Vec<Vec<QuotientOption>>,
}

fn build_quotient(
    mdp: &Mdp,
    mecs: &[BTreeMap<usize, Vec<ActionId>>],
    transient: &[usize],
    node_of: &[usize],
) -> Quotient {
    let moves = |q: usize, filter: &dyn Fn(ActionId) -> bool| -> Vec<QuotientOption> {
        mdp.choices[q]
            .iter()
            .filter(|c| filter(c.action))
            .map(|c| {
                let mut to: BTreeMap<usize, f64> = BTreeMap::new();
                for &(t, p, _) in &c.outcomes {
                    *to.entry(node_of[t]).or_default() += p;
                }
                QuotientOption::Move { state: q, action: c.action, to: to.into_iter().collect() }
            })
            .collect()
    };
    let mut options = Vec::new();
    for m in mecs {
        let mut opts = vec![QuotientOption::Stay];
        for (&q, acts) in m {
            opts.extend(moves(q, &|a| !acts.contains(&a)));
        }
        options.push(opts);
    }
    for &q in transient {
        options.push(moves(q, &|_| true));
    }
    Quotient { options }
}

struct QuotientChoice {
    policy: Vec<usize>,
    values: Vec<f64>,
}

/// Maximizes the expected gain of the component the run settles in.
fn quotient_policy_iteration(q: &Quotient, solved: &[ComponentSolution], scale: f64) -> Result<QuotientChoice, SolverError> {
    let n = q.options.len();
    let mut policy = vec![0usize; n];
    let tie = 1e-11 * scale.max(f64::MIN_POSITIVE);
    for _ in 0..10_000 {
        let mut a = DMatrix::<f64>::identity(n, n);
        let mut b = DVector::<f64>::zeros(n);
        for i in 0..n {
            match &q.options[i][policy[i]] {
                QuotientOption::Stay => b[i] = solved[i].gain,
                QuotientOption::Move { to, .. } => {
                    for &(j, p) in to {
                        a[(i, j)] -= p;
                    }
                }
            }
        }
        let v = a.lu().solve(&b).ok_or(SolverError::Singular)?;
        let value = |i: usize, o: &QuotientOption| match o {
            QuotientOption::Stay => solved[i].gain,
            QuotientOption::Move { to, .. } => to.iter().map(|&(j, p)| p * v[j]).sum(),
        };
        let mut changed = false;
        for i in 0..n {
            let vals: Vec<f64> = q.options[i].iter().map(|o| value(i, o)).collect();
            let best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if best > vals[policy[i]] + tie {
                policy[i] = vals.iter().position(|&x| x >= best - tie).expect("option");
                changed = true;
            }
        }
        if !changed {
            return Ok(QuotientChoice { policy, values: v.iter().copied().collect() });
        }
    }
    Err(SolverError::NoConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::examples::*;
    use crate::solver::Mdp;

    fn solve(inst: &Instance) -> GainSolution {
        optimal_gain(&Mdp::from_hidden(&inst.automaton, &inst.hidden), &SolverOptions::default()).unwrap()
    }

    #[test]
    fn fig1_right_value() {
        let s = solve(&fig1_right(&Fig1RightParams::default()).unwrap());
        for g in &s.gain {
            assert!((g - 0.7).abs() < 1e-9, "{g}");
        }
        assert_eq!(s.strategy[0], Some(ActionId(1)));
        assert!(s.unichain);
    }

    #[test]
    fn fig1_left_value() {
        let s = solve(&fig1_left(&Fig1LeftParams::default()).unwrap());
        for g in &s.gain {
            assert!((g - 0.9).abs() < 1e-9, "{g}");
        }
        assert_eq!(s.strategy[0], Some(ActionId(1)));
    }

    #[test]
    fn single_self_loop() {
        let mdp = Mdp::new(vec![vec![crate::solver::Choice::new(ActionId(0), vec![(0, 1.0, 0.25)])]], vec![0]);
        let s = optimal_gain(&mdp, &SolverOptions::default()).unwrap();
        assert!((s.gain[0] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn two_mec_values() {
        let s = solve(&two_mec().unwrap());
        let expect = [0.85, 0.7, 0.7, 0.7, 1.0, 1.0];
        for (g, e) in s.gain.iter().zip(expect) {
            assert!((g - e).abs() < 1e-9, "{g} vs {e}");
        }
        assert!(!s.unichain);
    }

    #[test]
    fn policy_iteration_fallback_agrees() {
        let inst = fig1_left(&Fig1LeftParams::default()).unwrap();
        let mdp = Mdp::from_hidden(&inst.automaton, &inst.hidden);
        let opts = SolverOptions { max_iter: 1, ..Default::default() };
        let s = optimal_gain(&mdp, &opts).unwrap();
        assert!((s.gain[0] - 0.9).abs() < 1e-9);
    }
}
