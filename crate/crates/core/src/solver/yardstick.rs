use serde::{Deserialize, Serialize};

use super::gain::{optimal_gain, SolverOptions};
use super::mdp::Mdp;
use super::SolverError;
use crate::graphs::{almost_sure_winning, maximal_good_components, mec_decomposition, sure_winning, EndComponent};
use crate::model::ParityAutomaton;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YardstickKind {
    /// Optimal expected mean payoff without parity constraint.
    Val,
    /// Best expectation among surely winning strategies.
    SVal,
    /// Best expectation among almost-surely winning strategies.
    AsVal,
}

impl std::str::FromStr for YardstickKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "val" => Ok(Self::Val),
            "sval" => Ok(Self::SVal),
            "asval" => Ok(Self::AsVal),
            _ => Err(format!("unknown yardstick {s:?} (expected val, sval or asval)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YardstickReport {
    pub kind: YardstickKind,
    pub value: f64,
    pub witness_gec: Option<EndComponent>,
    pub per_gec_values: Vec<(EndComponent, f64)>,
}

/// Val, sVal or asVal of a single-component automaton.
///
/// sVal and asVal are computed as the best optimal gain over the maximal
/// good end components contained in the automaton. The automaton must be
/// surely good (sVal) or almost-surely good (asVal) and consist of one
/// maximal end component. Val is the optimal gain at the initial state.
pub fn yardstick(
    aut: &ParityAutomaton,
    mdp: &Mdp,
    kind: YardstickKind,
    opts: &SolverOptions,
) -> Result<YardstickReport, SolverError> {
    if kind == YardstickKind::Val {
        let sol = optimal_gain(mdp, opts)?;
        return Ok(YardstickReport { kind, value: sol.gain[aut.initial().0], witness_gec: None, per_gec_values: vec![] });
    }
    let region = match kind {
        YardstickKind::SVal => sure_winning(aut),
        _ => almost_sure_winning(aut),
    };
    if !region.is_everything(aut) {
        return Err(SolverError::Precondition(match kind {
            YardstickKind::SVal => "automaton is not surely good".into(),
            _ => "automaton is not almost-surely good".into(),
        }));
    }
    let dec = mec_decomposition(aut);
    if dec.mecs.len() != 1 || dec.mecs[0].len() != aut.n_states() {
        return Err(SolverError::Precondition("automaton is not a single end component".into()));
    }
    component_yardstick(aut, mdp, &dec.mecs[0], kind, opts)
}

/// Best optimal gain over the maximal good end components inside `ec`,
/// without checking any precondition on the automaton.
pub fn component_yardstick(
    aut: &ParityAutomaton,
    mdp: &Mdp,
    ec: &EndComponent,
    kind: YardstickKind,
    opts: &SolverOptions,
) -> Result<YardstickReport, SolverError> {
    let mut per = Vec::new();
    for g in maximal_good_components(aut, ec) {
        let sol = optimal_gain(&mdp.restricted(&g), opts)?;
        let any = *g.states.iter().next().expect("nonempty component");
        per.push((g, sol.gain[any.0]));
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, (_, v)) in per.iter().enumerate() {
        if best.is_none_or(|(_, b)| *v > b) {
            best = Some((i, *v));
        }
    }
    let (i, value) = best.ok_or(SolverError::Inconsistent("no good end component inside a good automaton".into()))?;
    Ok(YardstickReport { kind, value, witness_gec: Some(per[i].0.clone()), per_gec_values: per })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::examples::*;
    use crate::model::StateId;

    fn mdp(inst: &Instance) -> Mdp {
        Mdp::from_hidden(&inst.automaton, &inst.hidden)
    }

    #[test]
    fn fig1_right_asval() {
        let inst = fig1_right(&Fig1RightParams::default()).unwrap();
        let r = yardstick(&inst.automaton, &mdp(&inst), YardstickKind::AsVal, &SolverOptions::default()).unwrap();
        assert!((r.value - 0.7).abs() < 1e-9);
        assert_eq!(r.witness_gec.unwrap().len(), 5);
        let err = yardstick(&inst.automaton, &mdp(&inst), YardstickKind::SVal, &SolverOptions::default());
        assert!(err.is_err());
    }

    #[test]
    fn fig3_sval_picks_rewarding_side() {
        let inst = fig3(&Fig3Params::default()).unwrap();
        let r = yardstick(&inst.automaton, &mdp(&inst), YardstickKind::SVal, &SolverOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        let w = r.witness_gec.unwrap();
        assert!(w.contains(StateId(3)) && w.contains(StateId(4)) && w.len() == 2);
    }

    #[test]
    fn single_good_component_all_equal() {
        let inst = fig1_left(&Fig1LeftParams::default()).unwrap();
        // One end component whose minimal priority 0 is even.
        let m = mdp(&inst);
        let o = SolverOptions::default();
        let v = yardstick(&inst.automaton, &m, YardstickKind::Val, &o).unwrap().value;
        let s = yardstick(&inst.automaton, &m, YardstickKind::SVal, &o).unwrap().value;
        let a = yardstick(&inst.automaton, &m, YardstickKind::AsVal, &o).unwrap().value;
        assert!((v - s).abs() < 1e-9 && (v - a).abs() < 1e-9);
    }
}
