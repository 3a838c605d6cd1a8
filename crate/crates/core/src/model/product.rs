use std::collections::{BTreeMap, HashMap, VecDeque};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::rational::rational_to_f64;
use super::{HiddenModel, MealyMachine, ModelError, ParityAutomaton, StateId, Step};

/// Default bound on the number of product states.
pub const DEFAULT_PRODUCT_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductEdge {
    pub target: usize,
    pub prob: BigRational,
    pub reward: BigRational,
}

/// Markov chain induced by a finite Mealy machine on a hidden model,
/// restricted to the product states reachable from the start.
///
/// State 0 is the start. Edges leading to the same target with the same
/// reward are merged.
#[derive(Clone, Debug)]
pub struct ProductChain<M> {
    pub states: Vec<(StateId, M)>,
    pub edges: Vec<Vec<ProductEdge>>,
    pub priorities: Vec<u32>,
}

/// Numeric Markov chain with expected one-step rewards.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovChain {
    pub succ: Vec<Vec<(usize, f64)>>,
    pub reward: Vec<f64>,
    pub priority: Vec<u32>,
}

impl MarkovChain {
    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }
}

impl<M> ProductChain<M> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Whether every row sums to exactly one.
    pub fn is_row_stochastic(&self) -> bool {
        self.edges.iter().all(|row| {
            let total: BigRational = row.iter().map(|e| e.prob.clone()).sum();
            total.is_one()
        })
    }

    pub fn to_markov_chain(&self) -> MarkovChain {
        let mut succ = Vec::with_capacity(self.len());
        let mut reward = Vec::with_capacity(self.len());
        for row in &self.edges {
            let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
            let mut r = BigRational::zero();
            for e in row {
                *merged.entry(e.target).or_default() += rational_to_f64(&e.prob);
                r += &e.prob * &e.reward;
            }
            succ.push(merged.into_iter().collect());
            reward.push(rational_to_f64(&r));
        }
        MarkovChain { succ, reward, priority: self.priorities.clone() }
    }

    /// Automaton states appearing in the product.
    pub fn automaton_states(&self) -> Vec<StateId> {
        let mut v: Vec<StateId> = self.states.iter().map(|(q, _)| *q).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Builds the reachable product of `aut`/`hidden` with a finite machine,
/// starting in `start` with the machine's initial memory.
pub fn build_product_chain<S: MealyMachine>(
    aut: &ParityAutomaton,
    hidden: &HiddenModel,
    machine: &S,
    start: StateId,
    cap: usize,
) -> Result<ProductChain<S::Memory>, ModelError> {
    if !machine.is_finite() {
        return Err(ModelError::InfiniteMemory);
    }
    let mut index: HashMap<(StateId, S::Memory), usize> = HashMap::new();
    let mut states: Vec<(StateId, S::Memory)> = Vec::new();
    let mut edges: Vec<Vec<ProductEdge>> = Vec::new();
    let mut queue = VecDeque::new();
    let m0 = machine.initial_memory();
    index.insert((start, m0.clone()), 0);
    states.push((start, m0));
    queue.push_back(0usize);
    let mut rows: HashMap<(StateId, usize), Vec<(StateId, BigRational, BigRational, f64)>> = HashMap::new();
    while let Some(i) = queue.pop_front() {
        let (q, m) = states[i].clone();
        let dist = machine.output(&m, q);
        let actions = dist.actions();
        let pa = BigRational::new(1.into(), (actions.len() as i64).into());
        let mut merged: BTreeMap<(usize, BigRational), BigRational> = BTreeMap::new();
        for a in actions {
            if !aut.is_enabled(q, a) {
                return Err(ModelError::Invalid(format!(
                    "machine chose disabled action {} at state {}",
                    aut.action_name(a),
                    aut.state_label(q)
                )));
            }
            let row = rows.entry((q, a.0)).or_insert_with(|| {
                hidden
                    .row(q, a)
                    .into_iter()
                    .map(|o| {
                        let rf = rational_to_f64(&o.reward);
                        (o.next, o.prob, o.reward, rf)
                    })
                    .collect()
            });
            for (next, p, r, rf) in row.iter() {
                let mut m2 = m.clone();
                machine.update(&mut m2, &Step { state: q, action: a, reward: *rf, next: *next });
                let key = (*next, m2);
                let j = match index.get(&key) {
                    Some(&j) => j,
                    None => {
                        let j = states.len();
                        if j >= cap {
                            return Err(ModelError::ProductCap(cap));
                        }
                        index.insert(key.clone(), j);
                        states.push(key);
                        queue.push_back(j);
                        j
                    }
                };
                *merged.entry((j, r.clone())).or_insert_with(BigRational::zero) += &pa * p;
            }
        }
        if edges.len() <= i {
            edges.resize(i + 1, Vec::new());
        }
        edges[i] = merged
            .into_iter()
            .map(|((target, reward), prob)| ProductEdge { target, prob, reward })
            .collect();
    }
    edges.resize(states.len(), Vec::new());
    let priorities = states.iter().map(|(q, _)| aut.priority(*q)).collect();
    Ok(ProductChain { states, edges, priorities })
}
