use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{ActionId, HiddenModel, ModelError, ParityAutomaton, StateId};
use crate::model::rational::rational_to_f64;

/// A finite run prefix: a start state followed by steps.
///
/// Index `i` of the trace refers to the `i`-th visited state, so a trace
/// with `k` steps covers states `0..=k`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunTrace {
    pub start: StateId,
    pub actions: Vec<ActionId>,
    pub rewards: Vec<f64>,
    pub next: Vec<StateId>,
}

#[derive(Serialize, Deserialize)]
struct StepRecord {
    q: i64,
    a: String,
    reward: f64,
    next: i64,
}

impl RunTrace {
    pub fn new(start: StateId) -> Self {
        Self { start, ..Default::default() }
    }

    pub fn push(&mut self, action: ActionId, reward: f64, next: StateId) {
        self.actions.push(action);
        self.rewards.push(reward);
        self.next.push(next);
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// State visited at position `i` (`0..=len`).
    pub fn state(&self, i: usize) -> StateId {
        if i == 0 {
            self.start
        } else {
            self.next[i - 1]
        }
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        std::iter::once(self.start).chain(self.next.iter().copied())
    }

    /// Checks that every step is a transition and carries the hidden reward.
    pub fn check_consistency(&self, aut: &ParityAutomaton, hidden: &HiddenModel) -> Result<(), ModelError> {
        for i in 0..self.len() {
            let (q, a, t) = (self.state(i), self.actions[i], self.next[i]);
            if !aut.has_transition(q, a, t) {
                return Err(ModelError::Invalid(format!("step {i} is not a transition")));
            }
            let r = hidden.reward(q, a, t).map(rational_to_f64);
            if r != Some(self.rewards[i]) {
                return Err(ModelError::Invalid(format!("step {i} reward differs from the model")));
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, aut: &ParityAutomaton, out: W) -> Result<(), ModelError> {
        let mut w = csv::Writer::from_writer(out);
        for i in 0..self.len() {
            w.serialize(self.record(aut, i)).map_err(|e| ModelError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| ModelError::Io(e.to_string()))
    }

    pub fn write_json_lines<W: Write>(&self, aut: &ParityAutomaton, mut out: W) -> Result<(), ModelError> {
        for i in 0..self.len() {
            let line = serde_json::to_string(&self.record(aut, i)).map_err(ModelError::Json)?;
            writeln!(out, "{line}").map_err(|e| ModelError::Io(e.to_string()))?;
        }
        Ok(())
    }

    fn record(&self, aut: &ParityAutomaton, i: usize) -> StepRecord {
        StepRecord {
            q: aut.state_label(self.state(i)),
            a: aut.action_name(self.actions[i]).to_string(),
            reward: self.rewards[i],
            next: aut.state_label(self.next[i]),
        }
    }
}

/// Average reward of the steps `from..to`.
pub fn finite_mean_payoff(trace: &RunTrace, from: usize, to: usize) -> Result<f64, ModelError> {
    if from >= to || to > trace.len() {
        return Err(ModelError::EmptyWindow(from, to));
    }
    let sum: f64 = trace.rewards[from..to].iter().sum();
    Ok(sum / (to - from) as f64)
}

/// Minimal priority among the states at positions `from..=to`.
pub fn min_priority_seen(trace: &RunTrace, aut: &ParityAutomaton, from: usize, to: usize) -> Result<u32, ModelError> {
    if from > to || to > trace.len() {
        return Err(ModelError::EmptyWindow(from, to));
    }
    Ok((from..=to).map(|i| aut.priority(trace.state(i))).min().expect("nonempty window"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::examples::{fig1_right, Fig1RightParams};
    use proptest::prelude::*;

    fn with_rewards(rewards: &[f64]) -> RunTrace {
        let mut t = RunTrace::new(StateId(0));
        for &r in rewards {
            t.push(ActionId(0), r, StateId(0));
        }
        t
    }

    #[test]
    fn mean_payoff_windows() {
        assert_eq!(finite_mean_payoff(&with_rewards(&[1.0; 4]), 0, 4).unwrap(), 1.0);
        assert_eq!(finite_mean_payoff(&with_rewards(&[0.0, 1.0, 0.0, 1.0]), 0, 4).unwrap(), 0.5);
        assert_eq!(finite_mean_payoff(&with_rewards(&[0.0, 0.0, 1.0, 1.0]), 2, 4).unwrap(), 1.0);
        assert!(finite_mean_payoff(&with_rewards(&[1.0]), 1, 1).is_err());
    }

    #[test]
    fn min_priority_on_fig1_right() {
        let inst = fig1_right(&Fig1RightParams::default()).unwrap();
        let aut = &inst.automaton;
        let a = aut.action_by_name("a").unwrap();
        let q = |l| aut.state_by_label(l).unwrap();
        let mut t = RunTrace::new(q(0));
        t.push(a, 1.0, q(4));
        t.push(a, 1.0, q(0));
        t.push(a, 0.0, q(3));
        assert_eq!(min_priority_seen(&t, aut, 0, 3).unwrap(), 0);
        let mut t = RunTrace::new(q(0));
        t.push(a, 1.0, q(4));
        t.push(a, 1.0, q(0));
        t.push(a, 1.0, q(4));
        assert_eq!(min_priority_seen(&t, aut, 0, 3).unwrap(), 1);
    }

    #[test]
    fn single_state_window() {
        let aut = ParityAutomaton::new(
            vec![0],
            vec![2],
            vec!["a".into()],
            &[(0, 0, 0)],
            num_rational::BigRational::from_integer(1.into()),
            0,
        )
        .unwrap();
        assert_eq!(min_priority_seen(&RunTrace::new(StateId(0)), &aut, 0, 0).unwrap(), 2);
    }

    #[test]
    fn exports_records() {
        let inst = fig1_right(&Fig1RightParams::default()).unwrap();
        let aut = &inst.automaton;
        let mut t = RunTrace::new(StateId(0));
        t.push(ActionId(0), 1.0, StateId(4));
        let mut csv_out = Vec::new();
        t.write_csv(aut, &mut csv_out).unwrap();
        assert_eq!(String::from_utf8(csv_out).unwrap(), "q,a,reward,next\n0,a,1.0,4\n");
        let mut json_out = Vec::new();
        t.write_json_lines(aut, &mut json_out).unwrap();
        assert_eq!(String::from_utf8(json_out).unwrap(), "{\"q\":0,\"a\":\"a\",\"reward\":1.0,\"next\":4}\n");
    }

    proptest! {
        #[test]
        fn halves_average_to_whole(rewards in prop::collection::vec(0u32..=8, 1..40)) {
            let n = rewards.len();
            let mut doubled: Vec<f64> = rewards.iter().map(|&r| r as f64 / 8.0).collect();
            doubled.extend(rewards.iter().rev().map(|&r| r as f64 / 8.0));
            let t = with_rewards(&doubled);
            let whole = finite_mean_payoff(&t, 0, 2 * n).unwrap();
            let left = finite_mean_payoff(&t, 0, n).unwrap();
            let right = finite_mean_payoff(&t, n, 2 * n).unwrap();
            prop_assert!((whole - (left + right) / 2.0).abs() < 1e-12);
            let mean = doubled.iter().sum::<f64>() / doubled.len() as f64;
            prop_assert!((whole - mean).abs() < 1e-12);
        }
    }
}
