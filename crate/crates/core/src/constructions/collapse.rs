//! Collapsing a cluster by agreement on subformulas.

use super::cgfp::value;
use super::ConstructionError;
use crate::algebra::{Closure, Valuation};
use crate::formula::{subformulas, Formula};
use crate::frames::{quotient, FiniteFrame, FrameMap, MorphismCheck};
use crate::subset::Subset;

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseResult {
    pub quotient: FiniteFrame,
    pub projection: FrameMap,
    pub classes: Vec<Subset>,
    /// `f[ν(p)]` for every letter.
    pub valuation: Valuation,
    pub morphism: MorphismCheck,
    /// Value of `φ` on the quotient pulls back to its value on the cluster.
    pub preserved: bool,
}

pub fn cluster_collapse(c: &FiniteFrame, phi: &Formula, val: &Valuation) -> Result<CollapseResult, ConstructionError> {
    let n = c.size();
    if n == 0 || c.rows().iter().any(|&r| r != Subset::full(n)) {
        return Err(ConstructionError::NotACluster);
    }
    let closure = Closure::Rows(c.rows().to_vec());
    let values: Vec<Subset> = subformulas(phi).iter().map(|f| value(f, val, n, &closure)).collect::<Result<_, _>>()?;
    let mut classes: Vec<Subset> = Vec::new();
    for w in 0..n {
        let same = |v: usize| values.iter().all(|a| a.contains(w) == a.contains(v));
        match classes.iter_mut().find(|k| same(k.first().unwrap())) {
            Some(k) => *k = k.with(w),
            None => classes.push(Subset::singleton(w)),
        }
    }
    let (q, projection) = quotient(c, &classes)?;
    let mut pushed = Valuation::new();
    for (p, &a) in &val.assignment {
        pushed = pushed.with(p, a.image(&projection.assignment));
    }
    let qclosure = Closure::Rows(q.rows().to_vec());
    let before = value(phi, val, n, &closure)?;
    let after = value(phi, &pushed, q.size(), &qclosure)?;
    Ok(CollapseResult {
        morphism: projection.check_p_morphism(),
        preserved: after.preimage(&projection.assignment) == before,
        quotient: q,
        projection,
        classes,
        valuation: pushed,
    })
}
