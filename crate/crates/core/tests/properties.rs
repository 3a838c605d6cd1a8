//! Property tests over randomly generated automata, MDPs and logs.

mod common;

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_gain, brute_force_mecs, brute_force_sure_region, random_automaton, random_mdp, ratio, surely_won_by};
use mplearn::graphs::{almost_sure_winning, is_end_component, mec_decomposition, sure_winning, ActionGraph, Classification};
use mplearn::harness::{simulate, wilson_interval, Sampler, SimOptions};
use mplearn::learn::{estimate_model, hoeffding_samples, schedule_sigma_infinity, EpsilonSeq, MonitorPlan, ObservationLog, Sizing};
use mplearn::model::rational::{format_rational, parse_rational};
use mplearn::model::{HiddenModel, ParityAutomaton, StateId};
use mplearn::solver::{optimal_gain, SolverOptions};
use mplearn::strategies::{build, Mode, StrategyParams};

fn automaton(seed: u64) -> ParityAutomaton {
    random_automaton(&mut ChaCha8Rng::seed_from_u64(seed), 6, 3)
}

/// Random hidden model on the automaton's support with rewards in
/// `{0, 1/4, ..., 1}`; the automaton's probability floor is lowered to the
/// smallest drawn probability.
fn hidden_for(aut: &ParityAutomaton, rng: &mut ChaCha8Rng) -> (ParityAutomaton, HiddenModel) {
    let mut hidden = HiddenModel::new();
    let mut floor = BigRational::one();
    for q in aut.states() {
        for &a in aut.enabled(q) {
            let succ = aut.successors(q, a);
            let w: Vec<i64> = succ.iter().map(|_| rng.random_range(1..=3)).collect();
            let total: i64 = w.iter().sum();
            for (&t, &x) in succ.iter().zip(&w) {
                let p = ratio(x, total);
                floor = floor.min(p.clone());
                hidden.set(q, a, t, p, ratio(rng.random_range(0..=4), 4));
            }
        }
    }
    (aut.with_pi_min(floor).unwrap(), hidden)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mecs_match_subset_enumeration(seed in any::<u64>()) {
        let aut = automaton(seed);
        let found: BTreeSet<_> = mec_decomposition(&aut).mecs.into_iter().map(|m| m.allowed).collect();
        prop_assert_eq!(found, brute_force_mecs(&aut));
    }

    #[test]
    fn mecs_are_disjoint_end_components(seed in any::<u64>()) {
        let aut = automaton(seed);
        let dec = mec_decomposition(&aut);
        let g = ActionGraph::from_automaton(&aut);
        let mut seen = BTreeSet::new();
        for (i, m) in dec.mecs.iter().enumerate() {
            prop_assert!(is_end_component(&g, &m.allowed));
            for &q in &m.states {
                prop_assert!(seen.insert(q));
                prop_assert_eq!(dec.of(q), Some(i));
            }
            prop_assert_eq!(m.min_priority, m.states.iter().map(|&q| aut.priority(q)).min().unwrap());
        }
    }

    #[test]
    fn sure_region_matches_enumeration_and_its_strategy_wins(seed in any::<u64>()) {
        let aut = automaton(seed);
        let region = sure_winning(&aut);
        prop_assert_eq!(&region.states, &brute_force_sure_region(&aut));
        let won = surely_won_by(&aut, &region.dense_strategy(&aut));
        for &q in &region.states {
            prop_assert!(won[q.0], "state {:?} not won by the region strategy", q);
        }
    }

    #[test]
    fn almost_sure_region_contains_sure_region_and_good_components(seed in any::<u64>()) {
        let aut = automaton(seed);
        let sure = sure_winning(&aut);
        let almost = almost_sure_winning(&aut);
        prop_assert!(sure.states.is_subset(&almost.states));
        for m in mec_decomposition(&aut).mecs {
            if m.classification != Classification::Neither {
                prop_assert!(m.states.is_subset(&almost.states));
            }
        }
        for (&q, &a) in &almost.strategy {
            prop_assert!(aut.is_enabled(q, a));
            prop_assert!(aut.successors(q, a).iter().all(|t| almost.states.contains(t)));
        }
    }

    #[test]
    fn estimated_rows_are_distributions_on_the_support(seed in any::<u64>(), steps in 1usize..400) {
        let aut = automaton(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let mut log = ObservationLog::new(&aut);
        for _ in 0..steps {
            let q = StateId(rng.random_range(0..aut.n_states()));
            let acts = aut.enabled(q);
            let a = acts[rng.random_range(0..acts.len())];
            let succ = aut.successors(q, a);
            let t = succ[rng.random_range(0..succ.len())];
            log.record_step(q, a, 0.5, t).unwrap();
        }
        prop_assert_eq!(log.total(), steps as u64);
        let model = estimate_model(&log, &aut);
        for ((q, a), row) in &model.delta_hat {
            let sum = row.iter().fold(BigRational::zero(), |s, (_, p)| s + p);
            prop_assert_eq!(sum, BigRational::one());
            for (t, p) in row {
                prop_assert!(aut.has_transition(*q, *a, *t));
                prop_assert!(*p > BigRational::zero());
            }
        }
    }

    #[test]
    fn solver_gain_matches_policy_enumeration(seed in any::<u64>()) {
        let mdp = random_mdp(&mut ChaCha8Rng::seed_from_u64(seed), 4, 2);
        let sol = optimal_gain(&mdp, &SolverOptions::default()).unwrap();
        let oracle = brute_force_gain(&mdp);
        for (g, o) in sol.gain.iter().zip(&oracle) {
            prop_assert!((g - o).abs() < 1e-6, "{} vs {}", g, o);
        }
    }

    #[test]
    fn machine_outputs_are_enabled_actions(seed in any::<u64>(), run_seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_automaton(&mut rng, 5, 3);
        let (aut, hidden) = hidden_for(&base, &mut rng);
        let sampler = Sampler::new(&aut, &hidden);
        for mode in Mode::ALL {
            let params = StrategyParams { mode, epsilon: 0.3, gamma: 0.3, sizing: Sizing { learning_cap: Some(5), ..Sizing::desk() } };
            if let Ok(b) = build(&aut, &params) {
                // `simulate` rejects any action that is not enabled.
                let r = simulate(&aut, &sampler, &b.machine, &SimOptions::new(1_500), run_seed, 0);
                prop_assert!(r.is_ok(), "{}: {:?}", mode, r.err());
            }
        }
    }
}

proptest! {
    #[test]
    fn hoeffding_count_is_the_smallest_sufficient(n in 1usize..30, m in 1usize..6, eps in 0.01f64..0.9, gamma in 0.001f64..0.9) {
        let k = hoeffding_samples(n, m, eps, gamma).unwrap();
        let need = (2.0 * (n * n * m) as f64 / gamma).ln();
        let slack = 1e-9 * need.abs().max(1.0);
        prop_assert!(2.0 * eps * eps * k as f64 >= need - slack);
        prop_assert!(k == 0 || 2.0 * eps * eps * (k - 1) as f64 <= need + slack);
    }

    #[test]
    fn monitor_windows_grow_and_meet_their_target(zeta in 0.0001f64..0.99, k0 in 1u32..6) {
        let plan = MonitorPlan { k0, zeta_lb: zeta, gamma: 0.5 };
        let lens: Vec<u64> = (k0..k0 + 8).map(|k| plan.window_len(k)).collect();
        prop_assert!(lens.windows(2).all(|w| w[0] <= w[1]));
        for (i, &l) in lens.iter().enumerate() {
            let k = (k0 + i as u32) as f64;
            // (1 - zeta)^l <= 2^-k, and l - 1 steps would not suffice.
            prop_assert!(l as f64 * (-zeta).ln_1p() <= -k * std::f64::consts::LN_2 + 1e-9);
            prop_assert!(l == 1 || (l - 1) as f64 * (-zeta).ln_1p() > -k * std::f64::consts::LN_2 - 1e-9);
        }
    }

    #[test]
    fn schedules_tile_the_run(n in 1usize..6, m in 1usize..4, pi_den in 2i64..10, base in 0.3f64..0.8) {
        let pi = 1.0 / pi_den as f64;
        let sched = schedule_sigma_infinity(n, m, pi, EpsilonSeq::Geometric { base }, &Sizing::desk()).unwrap();
        let plans = sched.prefix(4, 1.0, 0.5).unwrap();
        prop_assert_eq!(plans[0].start, 0);
        for w in plans.windows(2) {
            prop_assert_eq!(w[1].start, w[0].end());
            prop_assert!(sched.eps(w[1].index) < sched.eps(w[0].index));
            prop_assert!(w[0].learning <= w[1].learning);
        }
        for p in &plans {
            prop_assert!(p.optimizing >= p.mixing);
            prop_assert!(p.learning > 0);
        }
    }

    #[test]
    fn wilson_interval_brackets_the_estimate(n in 1u64..5000, frac in 0.0f64..=1.0) {
        let passes = ((n as f64) * frac).round() as u64;
        let (lo, hi) = wilson_interval(passes, n, 2.5758293035489004);
        let p = passes as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }

    #[test]
    fn rationals_round_trip(num in -10_000i64..10_000, den in 1i64..10_000) {
        let r = ratio(num, den);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn automata_round_trip_through_json(seed in any::<u64>()) {
        let aut = automaton(seed);
        let back = ParityAutomaton::from_json(&aut.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), aut.to_json());
    }
}
