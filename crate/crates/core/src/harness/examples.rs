//! Built-in instances: two small three- and five-state automata, the
//! single-end-component automaton with two good sub-components, and a small
//! instance with two maximal end components.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::model::{validate_compatibility, ActionId, HiddenModel, ModelError, ParityAutomaton, StateId};

/// An automaton together with a compatible hidden model.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub automaton: ParityAutomaton,
    pub hidden: HiddenModel,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `(from, action, to, prob, reward)` rows over dense indices.
type Row = (usize, usize, usize, BigRational, BigRational);

fn assemble(
    name: &str,
    priorities: Vec<u32>,
    actions: &[&str],
    rows: Vec<Row>,
    pi_min: BigRational,
) -> Result<Instance, ModelError> {
    let triples: Vec<_> = rows.iter().map(|(f, a, t, _, _)| (*f, *a, *t)).collect();
    let labels = (0..priorities.len() as i64).collect();
    let automaton = ParityAutomaton::new(
        labels,
        priorities,
        actions.iter().map(|s| s.to_string()).collect(),
        &triples,
        pi_min,
        0,
    )?;
    let mut hidden = HiddenModel::new();
    for (f, a, t, p, r) in rows {
        hidden.set(StateId(f), ActionId(a), StateId(t), p, r);
    }
    Ok(Instance { name: name.to_string(), automaton, hidden })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig1LeftParams {
    /// Reward of the self-loop at `q0`.
    pub r0: BigRational,
    /// Reward of transitions into and out of `q2`.
    pub r1: BigRational,
    /// Probability of moving from `q1` to `q2`.
    pub x: BigRational,
    pub pi_min: BigRational,
}

impl Default for Fig1LeftParams {
    fn default() -> Self {
        Self { r0: q(1, 2), r1: BigRational::one(), x: q(9, 10), pi_min: q(1, 10) }
    }
}

/// Three states `q0:2, q1:1, q2:0`; `a` loops at `q0`, `b` moves to `q1`,
/// from `q1` action `a` goes to `q2` with probability `x` and back to `q0`
/// otherwise, and `q2` returns to `q1`.
///
/// The instance is not validated, so out-of-range parameters can be used
/// to exercise validation.
pub fn fig1_left(p: &Fig1LeftParams) -> Result<Instance, ModelError> {
    let z = BigRational::zero;
    let one = BigRational::one;
    let rows = vec![
        (0, 0, 0, one(), p.r0.clone()),
        (0, 1, 1, one(), z()),
        (1, 0, 0, one() - &p.x, z()),
        (1, 0, 2, p.x.clone(), p.r1.clone()),
        (2, 0, 1, one(), p.r1.clone()),
    ];
    assemble("fig1_left", vec![2, 1, 0], &["a", "b"], rows, p.pi_min.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig1RightParams {
    /// Probability that `a` leads to the priority-0 state `q3`.
    pub x: BigRational,
    /// Probability that `b` leads to `q1`.
    pub y: BigRational,
    pub pi_min: BigRational,
}

impl Default for Fig1RightParams {
    fn default() -> Self {
        Self { x: q(7, 10), y: q(3, 10), pi_min: q(1, 10) }
    }
}

/// Five states `q0..q4` with priorities `1,1,1,0,1`. From `q0`, action `a`
/// reaches `q3` (reward 0) with probability `x` or `q4` (reward 1); action
/// `b` reaches `q1` (reward 0) with probability `y` or `q2` (reward 1).
/// Every other state returns to `q0` with the reward it was entered with.
pub fn fig1_right(p: &Fig1RightParams) -> Result<Instance, ModelError> {
    let z = BigRational::zero;
    let one = BigRational::one;
    let rows = vec![
        (0, 0, 3, p.x.clone(), z()),
        (0, 0, 4, one() - &p.x, one()),
        (0, 1, 1, p.y.clone(), z()),
        (0, 1, 2, one() - &p.y, one()),
        (1, 0, 0, one(), z()),
        (2, 0, 0, one(), one()),
        (3, 0, 0, one(), z()),
        (4, 0, 0, one(), one()),
    ];
    assemble("fig1_right", vec![1, 1, 1, 0, 1], &["a", "b"], rows, p.pi_min.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig3Params {
    /// Probability of staying in place on the `{q1,q2}` and `{q3,q4}` loops.
    pub stay: BigRational,
    /// Reward on transitions inside `{q1,q2}`.
    pub left_reward: BigRational,
    /// Reward on transitions inside `{q3,q4}`.
    pub right_reward: BigRational,
    pub pi_min: BigRational,
}

impl Default for Fig3Params {
    fn default() -> Self {
        Self { stay: q(1, 2), left_reward: BigRational::zero(), right_reward: BigRational::one(), pi_min: q(1, 10) }
    }
}

/// Single end component in which the only way to switch between the two
/// good sub-components `{q1,q2}` (action `a`) and `{q3,q4}` (action `b`)
/// passes the odd state `q0`.
pub fn fig3(p: &Fig3Params) -> Result<Instance, ModelError> {
    let z = BigRational::zero;
    let one = BigRational::one;
    let leave = one() - &p.stay;
    let (l, r) = (&p.left_reward, &p.right_reward);
    let rows = vec![
        (0, 0, 1, one(), z()),
        (0, 1, 3, one(), z()),
        (1, 1, 0, one(), z()),
        (3, 0, 0, one(), z()),
        (1, 0, 1, p.stay.clone(), l.clone()),
        (1, 0, 2, leave.clone(), l.clone()),
        (2, 0, 2, p.stay.clone(), l.clone()),
        (2, 0, 1, leave.clone(), l.clone()),
        (3, 1, 3, p.stay.clone(), r.clone()),
        (3, 1, 4, leave.clone(), r.clone()),
        (4, 1, 4, p.stay.clone(), r.clone()),
        (4, 1, 3, leave, r.clone()),
    ];
    assemble("fig3", vec![1, 2, 2, 2, 2], &["a", "b"], rows, p.pi_min.clone())
}

/// Six states: `s0` (priority 1) branches evenly into two maximal end
/// components.
///
/// The first, on `u0:1, u1:0, u2:1`, has optimal gain 0.7 (play `b` at
/// `u0`), which is also the best gain among parity-winning strategies. The
/// second, on `v0:2, v1:1`, has optimal gain 1 via the odd cycle through
/// `v1`, but only the self-loop at `v0` (gain 0.4) is good.
pub fn two_mec() -> Result<Instance, ModelError> {
    let z = BigRational::zero;
    let one = BigRational::one;
    let (s0, u0, u1, u2, v0, v1) = (0, 1, 2, 3, 4, 5);
    let rows = vec![
        (s0, 0, u0, q(1, 2), z()),
        (s0, 0, v0, q(1, 2), z()),
        (u0, 0, u1, one(), q(3, 10)),
        (u1, 0, u0, one(), q(3, 10)),
        (u0, 1, u2, q(1, 2), one()),
        (u0, 1, u1, q(1, 2), q(1, 2)),
        (u2, 0, u0, one(), one()),
        (v0, 0, v0, one(), q(2, 5)),
        (v0, 1, v1, one(), one()),
        (v1, 0, v0, one(), one()),
    ];
    assemble("two_mec", vec![1, 1, 0, 1, 2, 1], &["a", "b"], rows, q(1, 10))
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 4] = ["fig1_left", "fig1_right", "fig3", "two_mec"];

/// Parameters for built-in instances, keyed by the short names used on the
/// command line (`x`, `y`, `r0`, `r1`, `stay`, `left_reward`,
/// `right_reward`, `pi_min`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuiltinParams {
    pub values: std::collections::BTreeMap<String, BigRational>,
}

impl BuiltinParams {
    pub fn set(&mut self, key: &str, value: BigRational) {
        self.values.insert(key.to_string(), value);
    }

    fn take(&self, key: &str, default: BigRational) -> BigRational {
        self.values.get(key).cloned().unwrap_or(default)
    }
}

/// Looks up a built-in instance by name and validates it.
pub fn builtin(name: &str, params: &BuiltinParams) -> Result<Instance, ModelError> {
    let known: &[&str] = match name {
        "fig1_left" => &["r0", "r1", "x", "pi_min"],
        "fig1_right" => &["x", "y", "pi_min"],
        "fig3" => &["stay", "left_reward", "right_reward", "pi_min"],
        "two_mec" => &[],
        _ => return Err(ModelError::Invalid(format!("unknown example {name:?}; known: {}", BUILTIN_NAMES.join(", ")))),
    };
    if let Some(k) = params.values.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(ModelError::Invalid(format!("example {name} has no parameter {k:?}")));
    }
    let inst = match name {
        "fig1_left" => {
            let d = Fig1LeftParams::default();
            fig1_left(&Fig1LeftParams {
                r0: params.take("r0", d.r0),
                r1: params.take("r1", d.r1),
                x: params.take("x", d.x),
                pi_min: params.take("pi_min", d.pi_min),
            })?
        }
        "fig1_right" => {
            let d = Fig1RightParams::default();
            fig1_right(&Fig1RightParams {
                x: params.take("x", d.x),
                y: params.take("y", d.y),
                pi_min: params.take("pi_min", d.pi_min),
            })?
        }
        "fig3" => {
            let d = Fig3Params::default();
            fig3(&Fig3Params {
                stay: params.take("stay", d.stay),
                left_reward: params.take("left_reward", d.left_reward),
                right_reward: params.take("right_reward", d.right_reward),
                pi_min: params.take("pi_min", d.pi_min),
            })?
        }
        _ => two_mec()?,
    };
    validate_compatibility(&inst.automaton, &inst.hidden)?;
    Ok(inst)
}

/// All built-in instances with default parameters.
pub fn builtin_examples() -> Vec<Instance> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n, &BuiltinParams::default()).expect("built-in instances are valid"))
        .collect()
}
