//! Witness selection for refutations on general frames.
//!
//! Starting from the refuting world (and an optional seed), keep one witness
//! for every true `◊ψ` and every false `□ψ` among the subformulas, until the
//! kept set is closed; then restrict the frame and the field.

use super::ConstructionError;
use crate::algebra::{field_generate, AlgebraError, Closure, Program, Semantics, SetField, Valuation};
use crate::formula::{subformulas, Formula};
use crate::frames::FiniteFrame;
use crate::genspace::{Base, GeneralStructure};
use crate::subset::Subset;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessChoice {
    pub world: usize,
    pub formula: String,
    pub witness: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub kept_worlds: Subset,
    /// Original index of each restricted world.
    pub index: Vec<usize>,
    pub restricted: GeneralStructure,
    /// `μ(p) = ν(p) ∩ V`, reindexed.
    pub restricted_valuation: Valuation,
    pub witness_log: Vec<WitnessChoice>,
    /// The generated field has more atoms than the Boolean algebra of the
    /// subformula values alone.
    pub enlarged: bool,
    /// First subformula and kept world where truth differs.
    pub truth_failure: Option<(String, usize)>,
    /// `φ` is still false at the image of the refuting world.
    pub refutes: bool,
}

impl SelectionResult {
    pub fn restricted_field(&self) -> &SetField {
        self.restricted.field()
    }
    pub fn truth_lemma(&self) -> bool {
        self.truth_failure.is_none()
    }
}

/// Value of `phi` on `0..n` under `closure`.
pub(crate) fn value(phi: &Formula, val: &Valuation, n: usize, closure: &Closure) -> Result<Subset, AlgebraError> {
    let prog = Program::compile(phi);
    let slots = prog
        .letters()
        .iter()
        .map(|p| val.get(p).ok_or_else(|| AlgebraError::Unassigned(p.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(prog.run(&slots, n, closure, Semantics::Modal, &mut Vec::new()))
}

fn boolean_atoms(n: usize, sets: &[Subset]) -> usize {
    let mut atoms = vec![Subset::full(n)];
    for &s in sets {
        atoms = atoms.into_iter().flat_map(|a| [a & s, a.minus(s)]).filter(|a| !a.is_empty()).collect();
    }
    atoms.len()
}

pub fn cgfp_select(
    s: &GeneralStructure,
    phi: &Formula,
    val: &Valuation,
    w: usize,
    seed: Subset,
) -> Result<SelectionResult, ConstructionError> {
    let n = s.size();
    if w >= n || !seed.is_subset(Subset::full(n)) {
        return Err(ConstructionError::Parameter("world or seed outside the carrier".into()));
    }
    val.check_in(s.field())?;
    let closure = s.field().closure();
    if value(phi, val, n, closure)?.contains(w) {
        return Err(ConstructionError::NotRefuted(w));
    }
    let frame = s.frame();
    let subs = subformulas(phi);
    let values: Vec<Subset> = subs.iter().map(|f| value(f, val, n, closure)).collect::<Result<_, _>>()?;
    let value_of = |f: &Formula| values[subs.iter().position(|g| g == f).unwrap()];
    // (operator formula, set a witness must come from, when the demand applies)
    let demands: Vec<(&Formula, Subset, Subset)> = subs
        .iter()
        .filter_map(|f| match f {
            Formula::Diamond(a) => Some((f, value_of(a), value_of(f))),
            Formula::Box(a) => Some((f, value_of(a).complement(n), value_of(f).complement(n))),
            _ => None,
        })
        .collect();
    let mut kept = seed.with(w);
    let mut queue: Vec<usize> = kept.iter().collect();
    let mut witness_log = Vec::new();
    while let Some(v) = queue.first().copied() {
        queue.remove(0);
        for (f, pool, active) in &demands {
            if !active.contains(v) {
                continue;
            }
            let candidates = frame.successors(v) & *pool;
            let u = (candidates & kept).first().or(candidates.first()).expect("closure semantics guarantee a witness");
            witness_log.push(WitnessChoice { world: v, formula: f.to_string(), witness: u });
            if !kept.contains(u) {
                kept = kept.with(u);
                queue.push(u);
            }
        }
    }
    let (sub, index) = frame.restrict(kept);
    let m = sub.size();
    let sub_closure = Closure::Rows(sub.rows().to_vec());
    let mut restricted_valuation = Valuation::new();
    for (p, &a) in &val.assignment {
        restricted_valuation = restricted_valuation.with(p, a.preimage(&index));
    }
    let mut truth_failure = None;
    let mut mu_values = Vec::new();
    for (f, &nu) in subs.iter().zip(&values) {
        let mu = value(f, &restricted_valuation, m, &sub_closure)?;
        if truth_failure.is_none() {
            if let Some(i) = (mu ^ nu.preimage(&index)).first() {
                truth_failure = Some((f.to_string(), index[i]));
            }
        }
        mu_values.push(mu);
    }
    let field = field_generate(m, sub_closure, &mu_values)?;
    let enlarged = field.atoms().len() > boolean_atoms(m, &mu_values);
    let wi = index.iter().position(|&x| x == w).unwrap();
    let refutes = !mu_values.last().unwrap().contains(wi);
    let restricted = GeneralStructure::new(Base::Frame(sub), field.members().to_vec())?;
    Ok(SelectionResult {
        kept_worlds: kept,
        index,
        restricted,
        restricted_valuation,
        witness_log,
        enlarged,
        truth_failure,
        refutes,
    })
}

/// Convenience for full frames.
pub fn cgfp_select_frame(f: &FiniteFrame, phi: &Formula, val: &Valuation, w: usize) -> Result<SelectionResult, ConstructionError> {
    let s = GeneralStructure::full_frame(f.clone())?;
    cgfp_select(&s, phi, val, w, Subset::EMPTY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::frames::{make_chain, make_fork};

    #[test]
    fn chain_keeps_both() {
        let ch = make_chain(2).unwrap();
        let phi = parse("p -> []p").unwrap();
        let r = cgfp_select_frame(&ch, &phi, &Valuation::new().with("p", Subset::singleton(0)), 0).unwrap();
        assert_eq!(r.kept_worlds, Subset::full(2));
        assert!(r.truth_lemma() && r.refutes);
        assert_eq!(r.witness_log[0].witness, 1);
    }

    #[test]
    fn no_modal_subformulas() {
        let ch = make_chain(3).unwrap();
        let phi = parse("p").unwrap();
        let s = GeneralStructure::full_frame(ch).unwrap();
        let r = cgfp_select(&s, &phi, &Valuation::new().with("p", Subset::EMPTY), 1, Subset::singleton(2)).unwrap();
        assert_eq!(r.kept_worlds, Subset::from_iter([1, 2]));
        assert!(r.witness_log.is_empty());
    }

    #[test]
    fn seeded_fork() {
        let f = make_fork(1).unwrap();
        let phi = parse("<>[]p -> []<>p").unwrap();
        let s = GeneralStructure::full_frame(f).unwrap();
        let r = cgfp_select(&s, &phi, &Valuation::new().with("p", Subset::singleton(1)), 0, Subset::singleton(1)).unwrap();
        assert!(Subset::from_iter([0, 1]).is_subset(r.kept_worlds));
        assert!(r.truth_lemma() && r.refutes);
        assert_eq!(r.kept_worlds, Subset::full(3));
    }

    #[test]
    fn rejects_true_formula() {
        let ch = make_chain(2).unwrap();
        let phi = parse("p -> <>p").unwrap();
        let e = cgfp_select_frame(&ch, &phi, &Valuation::new().with("p", Subset::singleton(0)), 0);
        assert_eq!(e.unwrap_err(), ConstructionError::NotRefuted(0));
    }
}
