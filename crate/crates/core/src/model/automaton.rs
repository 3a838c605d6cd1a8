use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{format_rational, parse_rational, rational_to_f64};
use super::{ActionId, ModelError, StateId};

/// JSON document describing an automaton.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutomatonDoc {
    pub states: Vec<StateDoc>,
    pub actions: Vec<String>,
    pub transitions: Vec<TransitionDoc>,
    pub pi_min: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDoc {
    pub id: i64,
    pub priority: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub from: i64,
    pub action: String,
    pub to: i64,
}

/// Known support structure: states, actions, transition relation and
/// priorities, together with the lower bound on nonzero probabilities.
///
/// States and actions are addressed by dense indices; the user-facing
/// integer ids and action names are kept for I/O.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityAutomaton {
    labels: Vec<i64>,
    priorities: Vec<u32>,
    action_names: Vec<String>,
    /// `succ[q][a]` is the sorted successor list; empty if `a` is not enabled.
    succ: Vec<Vec<Vec<StateId>>>,
    enabled: Vec<Vec<ActionId>>,
    pi_min: BigRational,
    initial: StateId,
}

impl ParityAutomaton {
    /// Builds and validates an automaton from dense data.
    ///
    /// `transitions` holds `(q, a, q')` triples over indices `0..priorities.len()`
    /// and `0..action_names.len()`.
    pub fn new(
        labels: Vec<i64>,
        priorities: Vec<u32>,
        action_names: Vec<String>,
        transitions: &[(usize, usize, usize)],
        pi_min: BigRational,
        initial: usize,
    ) -> Result<Self, ModelError> {
        let n = priorities.len();
        if n == 0 {
            return Err(ModelError::Empty("states"));
        }
        if action_names.is_empty() {
            return Err(ModelError::Empty("actions"));
        }
        if labels.len() != n {
            return Err(ModelError::Invalid("label count differs from state count".into()));
        }
        let mut seen_labels = BTreeSet::new();
        for &l in &labels {
            if !seen_labels.insert(l) {
                return Err(ModelError::Duplicate(format!("state id {l}")));
            }
        }
        let mut seen_names = BTreeSet::new();
        for name in &action_names {
            if !seen_names.insert(name.as_str()) {
                return Err(ModelError::Duplicate(format!("action {name}")));
            }
        }
        if initial >= n {
            return Err(ModelError::UnknownState(initial as i64));
        }
        if pi_min <= BigRational::zero() || pi_min > BigRational::one() {
            return Err(ModelError::PiMinRange(format_rational(&pi_min)));
        }
        let m = action_names.len();
        let mut succ = vec![vec![Vec::new(); m]; n];
        for &(q, a, t) in transitions {
            if q >= n || t >= n {
                return Err(ModelError::UnknownState(q.max(t) as i64));
            }
            if a >= m {
                return Err(ModelError::UnknownAction(format!("index {a}")));
            }
            succ[q][a].push(StateId(t));
        }
        for (q, row) in succ.iter_mut().enumerate() {
            for (a, list) in row.iter_mut().enumerate() {
                let before = list.len();
                list.sort();
                list.dedup();
                if list.len() != before {
                    return Err(ModelError::Duplicate(format!(
                        "transition ({}, {}, _)",
                        labels[q], action_names[a]
                    )));
                }
            }
        }
        let enabled: Vec<Vec<ActionId>> = succ
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, l)| !l.is_empty())
                    .map(|(a, _)| ActionId(a))
                    .collect()
            })
            .collect();
        for (q, acts) in enabled.iter().enumerate() {
            if acts.is_empty() {
                return Err(ModelError::Deadlock(labels[q]));
            }
            for &a in acts {
                let k = succ[q][a.0].len();
                if &pi_min * BigRational::from_integer(k.into()) > BigRational::one() {
                    return Err(ModelError::PiMinSupport {
                        state: labels[q],
                        action: action_names[a.0].clone(),
                        support: k,
                    });
                }
            }
        }
        Ok(Self {
            labels,
            priorities,
            action_names,
            succ,
            enabled,
            pi_min,
            initial: StateId(initial),
        })
    }

    /// Parses and validates the JSON document format.
    pub fn from_doc(doc: &AutomatonDoc) -> Result<Self, ModelError> {
        let mut index = HashMap::new();
        let mut labels = Vec::new();
        let mut priorities = Vec::new();
        for s in &doc.states {
            if index.insert(s.id, labels.len()).is_some() {
                return Err(ModelError::Duplicate(format!("state id {}", s.id)));
            }
            labels.push(s.id);
            priorities.push(s.priority);
        }
        let mut action_index = HashMap::new();
        for (i, name) in doc.actions.iter().enumerate() {
            if action_index.insert(name.as_str(), i).is_some() {
                return Err(ModelError::Duplicate(format!("action {name}")));
            }
        }
        let mut triples = Vec::with_capacity(doc.transitions.len());
        for t in &doc.transitions {
            let q = *index.get(&t.from).ok_or(ModelError::UnknownState(t.from))?;
            let to = *index.get(&t.to).ok_or(ModelError::UnknownState(t.to))?;
            let a = *action_index
                .get(t.action.as_str())
                .ok_or_else(|| ModelError::UnknownAction(t.action.clone()))?;
            triples.push((q, a, to));
        }
        let pi_min = parse_rational(&doc.pi_min)?;
        let initial = match doc.initial {
            Some(id) => *index.get(&id).ok_or(ModelError::UnknownState(id))?,
            None => 0,
        };
        Self::new(labels, priorities, doc.actions.clone(), &triples, pi_min, initial)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: AutomatonDoc = serde_json::from_str(text).map_err(ModelError::Json)?;
        Self::from_doc(&doc)
    }

    pub fn to_doc(&self) -> AutomatonDoc {
        AutomatonDoc {
            states: (0..self.n_states())
                .map(|q| StateDoc { id: self.labels[q], priority: self.priorities[q] })
                .collect(),
            actions: self.action_names.clone(),
            transitions: self
                .transitions()
                .map(|(q, a, t)| TransitionDoc {
                    from: self.labels[q.0],
                    action: self.action_names[a.0].clone(),
                    to: self.labels[t.0],
                })
                .collect(),
            pi_min: format_rational(&self.pi_min),
            initial: Some(self.labels[self.initial.0]),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("automaton serializes")
    }

    pub fn n_states(&self) -> usize {
        self.priorities.len()
    }

    pub fn n_actions(&self) -> usize {
        self.action_names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.n_states()).map(StateId)
    }

    pub fn priority(&self, q: StateId) -> u32 {
        self.priorities[q.0]
    }

    pub fn priorities(&self) -> &[u32] {
        &self.priorities
    }

    /// Actions enabled at `q`, in increasing index order.
    pub fn enabled(&self, q: StateId) -> &[ActionId] {
        &self.enabled[q.0]
    }

    pub fn is_enabled(&self, q: StateId, a: ActionId) -> bool {
        !self.succ[q.0][a.0].is_empty()
    }

    /// Sorted successor list of `(q, a)`; empty when `a` is not enabled.
    pub fn successors(&self, q: StateId, a: ActionId) -> &[StateId] {
        &self.succ[q.0][a.0]
    }

    pub fn has_transition(&self, q: StateId, a: ActionId, t: StateId) -> bool {
        self.succ[q.0][a.0].binary_search(&t).is_ok()
    }

    /// All triples of the transition relation in lexicographic index order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, ActionId, StateId)> + '_ {
        self.succ.iter().enumerate().flat_map(|(q, row)| {
            row.iter()
                .enumerate()
                .flat_map(move |(a, l)| l.iter().map(move |&t| (StateId(q), ActionId(a), t)))
        })
    }

    pub fn n_transitions(&self) -> usize {
        self.succ.iter().flatten().map(Vec::len).sum()
    }

    pub fn pi_min(&self) -> &BigRational {
        &self.pi_min
    }

    pub fn pi_min_f64(&self) -> f64 {
        rational_to_f64(&self.pi_min)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn with_initial(mut self, q: StateId) -> Self {
        assert!(q.0 < self.n_states());
        self.initial = q;
        self
    }

    pub fn with_pi_min(&self, pi_min: BigRational) -> Result<Self, ModelError> {
        let triples: Vec<_> = self.transitions().map(|(q, a, t)| (q.0, a.0, t.0)).collect();
        Self::new(
            self.labels.clone(),
            self.priorities.clone(),
            self.action_names.clone(),
            &triples,
            pi_min,
            self.initial.0,
        )
    }

    pub fn state_label(&self, q: StateId) -> i64 {
        self.labels[q.0]
    }

    pub fn state_by_label(&self, label: i64) -> Option<StateId> {
        self.labels.iter().position(|&l| l == label).map(StateId)
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.action_names[a.0]
    }

    pub fn action_names(&self) -> &[String] {
        &self.action_names
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionId> {
        self.action_names.iter().position(|n| n == name).map(ActionId)
    }

    /// Sub-automaton on `states` keeping, for each kept state, the actions in
    /// `allowed` (or all enabled actions if `allowed` is `None`) whose successors
    /// all stay inside `states`.
    ///
    /// Returns the new automaton and the map from new indices to old indices.
    /// Fails if some kept state is left without an action.
    pub fn restrict(
        &self,
        states: &BTreeSet<StateId>,
        allowed: Option<&BTreeMap<StateId, Vec<ActionId>>>,
    ) -> Result<(Self, Vec<StateId>), ModelError> {
        let origin: Vec<StateId> = states.iter().copied().collect();
        let mut new_index = vec![usize::MAX; self.n_states()];
        for (i, q) in origin.iter().enumerate() {
            new_index[q.0] = i;
        }
        let mut triples = Vec::new();
        for (i, &q) in origin.iter().enumerate() {
            let acts: Vec<ActionId> = match allowed.and_then(|m| m.get(&q)) {
                Some(list) => list.clone(),
                None => self.enabled(q).to_vec(),
            };
            for a in acts {
                let succ = self.successors(q, a);
                if succ.is_empty() || succ.iter().any(|t| new_index[t.0] == usize::MAX) {
                    continue;
                }
                for t in succ {
                    triples.push((i, a.0, new_index[t.0]));
                }
            }
        }
        let initial = if new_index[self.initial.0] != usize::MAX { new_index[self.initial.0] } else { 0 };
        let aut = Self::new(
            origin.iter().map(|q| self.labels[q.0]).collect(),
            origin.iter().map(|q| self.priorities[q.0]).collect(),
            self.action_names.clone(),
            &triples,
            self.pi_min.clone(),
            initial,
        )?;
        Ok((aut, origin))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(states: &[(i64, u32)], trans: &[(i64, &str, i64)], pi: &str) -> AutomatonDoc {
        let mut actions: Vec<String> = Vec::new();
        for (_, a, _) in trans {
            if !actions.iter().any(|x| x == a) {
                actions.push(a.to_string());
            }
        }
        AutomatonDoc {
            states: states.iter().map(|&(id, priority)| StateDoc { id, priority }).collect(),
            actions,
            transitions: trans
                .iter()
                .map(|&(from, a, to)| TransitionDoc { from, action: a.into(), to })
                .collect(),
            pi_min: pi.into(),
            initial: None,
        }
    }

    #[test]
    fn smallest_automaton_is_valid() {
        let aut = ParityAutomaton::from_doc(&doc(&[(0, 0)], &[(0, "a", 0)], "1/1")).unwrap();
        assert_eq!(aut.n_states(), 1);
        assert_eq!(aut.enabled(StateId(0)), &[ActionId(0)]);
    }

    #[test]
    fn deadlock_is_rejected() {
        let err = ParityAutomaton::from_doc(&doc(&[(0, 0), (1, 1)], &[(0, "a", 1)], "1/2"))
            .unwrap_err();
        assert!(matches!(err, ModelError::Deadlock(1)));
        assert!(err.to_string().contains("deadlock"));
    }

    #[test]
    fn pi_min_checks() {
        let d = doc(&[(0, 0), (1, 0)], &[(0, "a", 0), (0, "a", 1), (1, "a", 0)], "0");
        assert!(matches!(ParityAutomaton::from_doc(&d).unwrap_err(), ModelError::PiMinRange(_)));
        let mut d2 = d.clone();
        d2.pi_min = "3/2".into();
        assert!(matches!(ParityAutomaton::from_doc(&d2).unwrap_err(), ModelError::PiMinRange(_)));
        let mut d3 = d.clone();
        d3.pi_min = "2/3".into();
        assert!(matches!(
            ParityAutomaton::from_doc(&d3).unwrap_err(),
            ModelError::PiMinSupport { support: 2, .. }
        ));
        let mut d4 = d;
        d4.pi_min = "1/2".into();
        assert!(ParityAutomaton::from_doc(&d4).is_ok());
    }

    #[test]
    fn unknown_references_and_duplicates() {
        let d = doc(&[(0, 0)], &[(0, "a", 7)], "1");
        assert!(matches!(ParityAutomaton::from_doc(&d).unwrap_err(), ModelError::UnknownState(7)));
        let d = doc(&[(0, 0), (0, 1)], &[(0, "a", 0)], "1");
        assert!(matches!(ParityAutomaton::from_doc(&d).unwrap_err(), ModelError::Duplicate(_)));
        let d = doc(&[(0, 0)], &[(0, "a", 0), (0, "a", 0)], "1");
        assert!(matches!(ParityAutomaton::from_doc(&d).unwrap_err(), ModelError::Duplicate(_)));
        let mut d = doc(&[(0, 0)], &[(0, "a", 0)], "1");
        d.transitions[0].action = "z".into();
        assert!(matches!(ParityAutomaton::from_doc(&d).unwrap_err(), ModelError::UnknownAction(_)));
    }

    #[test]
    fn json_round_trip() {
        let d = doc(
            &[(10, 1), (20, 0), (30, 2)],
            &[(10, "a", 20), (10, "a", 30), (20, "b", 10), (30, "a", 30), (30, "b", 10)],
            "1/4",
        );
        let aut = ParityAutomaton::from_doc(&d).unwrap();
        let again = ParityAutomaton::from_json(&aut.to_json()).unwrap();
        assert_eq!(aut, again);
    }

    #[test]
    fn restriction_drops_leaving_actions() {
        let d = doc(
            &[(0, 1), (1, 0), (2, 2)],
            &[(0, "a", 1), (1, "a", 0), (1, "b", 2), (2, "a", 2)],
            "1",
        );
        let aut = ParityAutomaton::from_doc(&d).unwrap();
        let keep: BTreeSet<_> = [StateId(0), StateId(1)].into_iter().collect();
        let (sub, origin) = aut.restrict(&keep, None).unwrap();
        assert_eq!(origin, vec![StateId(0), StateId(1)]);
        assert_eq!(sub.n_transitions(), 2);
        assert_eq!(sub.state_label(StateId(1)), 1);
        let keep: BTreeSet<_> = [StateId(0)].into_iter().collect();
        assert!(aut.restrict(&keep, None).is_err());
    }
}
