//! Random instance generators and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use mplearn::model::{ActionId, ParityAutomaton, StateId};
use mplearn::solver::{chain_gain, Choice, Mdp};

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Random automaton with at most `max_states` states and `max_actions`
/// actions; every state has at least one enabled action with one to three
/// successors, and priorities lie in `0..=3`.
pub fn random_automaton(rng: &mut ChaCha8Rng, max_states: usize, max_actions: usize) -> ParityAutomaton {
    let n = rng.random_range(1..=max_states);
    let m = rng.random_range(1..=max_actions);
    let priorities: Vec<u32> = (0..n).map(|_| rng.random_range(0..=3)).collect();
    let mut triples = Vec::new();
    for q in 0..n {
        let mut any = false;
        for a in 0..m {
            if any && rng.random_bool(0.4) {
                continue;
            }
            any = true;
            let k = rng.random_range(1..=3.min(n));
            let mut succ: Vec<usize> = Vec::new();
            while succ.len() < k {
                let t = rng.random_range(0..n);
                if !succ.contains(&t) {
                    succ.push(t);
                }
            }
            triples.extend(succ.into_iter().map(|t| (q, a, t)));
        }
    }
    let names = (0..m).map(|a| format!("a{a}")).collect();
    ParityAutomaton::new((0..n as i64).collect(), priorities, names, &triples, ratio(1, 3), 0).expect("generated automaton is valid")
}

/// Random MDP over at most `max_states` states and `max_actions` actions
/// with random positive probabilities and rewards in `[0, 1]`.
pub fn random_mdp(rng: &mut ChaCha8Rng, max_states: usize, max_actions: usize) -> Mdp {
    let n = rng.random_range(1..=max_states);
    let m = rng.random_range(1..=max_actions);
    let choices = (0..n)
        .map(|_| {
            let k = rng.random_range(1..=m);
            (0..k)
                .map(|a| {
                    let mut succ: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
                    if succ.is_empty() {
                        succ.push(rng.random_range(0..n));
                    }
                    let w: Vec<f64> = succ.iter().map(|_| rng.random_range(1..=4) as f64).collect();
                    let total: f64 = w.iter().sum();
                    let outcomes = succ.iter().zip(&w).map(|(&t, &x)| (t, x / total, rng.random_range(0.0..=1.0))).collect();
                    Choice::new(ActionId(a), outcomes)
                })
                .collect()
        })
        .collect();
    Mdp::new(choices, vec![0; n])
}

/// Smallest positive transition probability of an MDP.
pub fn mdp_pi_min(mdp: &Mdp) -> f64 {
    mdp.choices.iter().flatten().flat_map(|c| c.outcomes.iter().map(|o| o.1)).fold(1.0, f64::min)
}

/// Every deterministic memoryless strategy of an automaton.
pub fn all_strategies(aut: &ParityAutomaton) -> Vec<Vec<ActionId>> {
    let mut out = vec![Vec::new()];
    for q in aut.states() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                aut.enabled(q).iter().map(move |&a| {
                    let mut p = prefix.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    out
}

/// Maximal end components by enumeration of state subsets: a subset is an
/// end component when every state keeps an action whose successors stay
/// inside and the subset is strongly connected under those actions.
pub fn brute_force_mecs(aut: &ParityAutomaton) -> BTreeSet<BTreeMap<StateId, Vec<ActionId>>> {
    let n = aut.n_states();
    let mut ecs: Vec<(u32, BTreeMap<StateId, Vec<ActionId>>)> = Vec::new();
    for mask in 1u32..(1 << n) {
        let inside = |q: usize| mask & (1 << q) != 0;
        let mut allowed = BTreeMap::new();
        let mut ok = true;
        for q in (0..n).filter(|&q| inside(q)) {
            let acts: Vec<ActionId> = aut
                .enabled(StateId(q))
                .iter()
                .copied()
                .filter(|&a| aut.successors(StateId(q), a).iter().all(|t| inside(t.0)))
                .collect();
            if acts.is_empty() {
                ok = false;
                break;
            }
            allowed.insert(StateId(q), acts);
        }
        if !ok {
            continue;
        }
        let edges = |q: usize| -> Vec<usize> {
            allowed[&StateId(q)].iter().flat_map(|&a| aut.successors(StateId(q), a).iter().map(|t| t.0)).collect()
        };
        let strongly_connected = (0..n).filter(|&q| inside(q)).all(|q| {
            let mut seen = vec![false; n];
            let mut stack = vec![q];
            while let Some(v) = stack.pop() {
                for w in edges(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            (0..n).filter(|&t| inside(t)).all(|t| seen[t])
        });
        if strongly_connected {
            ecs.push((mask, allowed));
        }
    }
    ecs.iter()
        .filter(|(m, _)| !ecs.iter().any(|(o, _)| o != m && o & m == *m))
        .map(|(_, a)| a.clone())
        .collect()
}

/// States from which the deterministic strategy `choice` wins the parity
/// objective against every resolution of the nondeterminism.
///
/// A state loses exactly when it can reach an odd-priority state `v` lying
/// on a cycle through states of priority at least that of `v`.
pub fn surely_won_by(aut: &ParityAutomaton, choice: &[ActionId]) -> Vec<bool> {
    let n = aut.n_states();
    let succ = |q: usize| aut.successors(StateId(q), choice[q]).iter().map(|t| t.0);
    let reach = |from: Vec<usize>, keep: &dyn Fn(usize) -> bool| {
        let mut seen = vec![false; n];
        let mut stack = from;
        while let Some(v) = stack.pop() {
            for w in succ(v) {
                if keep(w) && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };
    let bad: Vec<usize> = (0..n)
        .filter(|&v| {
            let p = aut.priority(StateId(v));
            p % 2 == 1 && reach(vec![v], &|w| aut.priority(StateId(w)) >= p)[v]
        })
        .collect();
    (0..n)
        .map(|q| {
            let mut r = reach(vec![q], &|_| true);
            r[q] = true;
            !bad.iter().any(|&v| r[v])
        })
        .collect()
}

/// Union over all deterministic memoryless strategies of the surely won
/// states.
pub fn brute_force_sure_region(aut: &ParityAutomaton) -> BTreeSet<StateId> {
    let mut won = vec![false; aut.n_states()];
    for s in all_strategies(aut) {
        for (q, w) in surely_won_by(aut, &s).into_iter().enumerate() {
            won[q] |= w;
        }
    }
    (0..aut.n_states()).filter(|&q| won[q]).map(StateId).collect()
}

/// Every deterministic memoryless policy of an MDP, as `Some(action)` per
/// state.
pub fn all_policies(mdp: &Mdp) -> Vec<Vec<Option<ActionId>>> {
    let mut out = vec![Vec::new()];
    for row in &mdp.choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                row.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(Some(c.action));
                    p
                })
            })
            .collect();
    }
    out
}

/// Per-state optimal gain by exhaustive policy enumeration.
pub fn brute_force_gain(mdp: &Mdp) -> Vec<f64> {
    let mut best = vec![f64::NEG_INFINITY; mdp.n_states()];
    for p in all_policies(mdp) {
        let g = chain_gain(&mdp.chain_of(&p)).expect("small chain");
        for (b, v) in best.iter_mut().zip(g) {
            *b = b.max(v);
        }
    }
    best
}

/// Gain of a fixed policy from every state.
pub fn policy_gain(mdp: &Mdp, policy: &[Option<ActionId>]) -> Vec<f64> {
    chain_gain(&mdp.chain_of(policy)).expect("small chain")
}

/// Copy of `mdp` with every probability moved by at most `eta` (same
/// support, rows still summing to one) and every reward by at most
/// `reward_gap`, clamped to `[0, 1]`.
pub fn perturb(rng: &mut ChaCha8Rng, mdp: &Mdp, eta: f64, reward_gap: f64) -> Mdp {
    let choices = mdp
        .choices
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| {
                    let k = c.outcomes.len();
                    let mut delta: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..=1.0)).collect();
                    let mean = delta.iter().sum::<f64>() / k as f64;
                    delta.iter_mut().for_each(|d| *d -= mean);
                    let scale = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
                    let factor = if scale > 0.0 { eta * 0.999 / scale } else { 0.0 };
                    let outcomes = c
                        .outcomes
                        .iter()
                        .zip(&delta)
                        .map(|(&(t, p, r), d)| {
                            let r2 = (r + rng.random_range(-reward_gap..=reward_gap)).clamp(0.0, 1.0);
                            (t, p + d * factor, r2)
                        })
                        .collect();
                    Choice::new(c.action, outcomes)
                })
                .collect()
        })
        .collect();
    Mdp::new(choices, mdp.priorities.clone())
}

/// `P(X >= k)` for `X ~ Binomial(n, p)`.
pub fn binomial_upper_tail(n: u64, k: u64, p: f64) -> f64 {
    let ln_choose = |n: u64, i: u64| -> f64 { (1..=i).map(|j| ((n - i + j) as f64 / j as f64).ln()).sum() };
    (k..=n)
        .map(|i| (ln_choose(n, i) + i as f64 * p.ln() + (n - i) as f64 * (1.0 - p).ln()).exp())
        .sum::<f64>()
        .min(1.0)
}
