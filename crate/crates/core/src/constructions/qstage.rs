//! Stage-`k` approximation of a labeling of the rationals onto a rooted frame.
//!
//! A point `c` with interval `(a, b)` and label `w` receives `k` flank points
//! on each side: midpoints of `J_i = [c − (c−a)/2^{i−1}, c − (c−a)/2^i]` on
//! the left and the mirror images on the right, both labeled `θ_w(i−1)`.

use super::tcomb::EnumerationFamily;
use super::ConstructionError;
use crate::frames::FiniteFrame;
use crate::scalar::Scalar;
use crate::subset::Subset;
use serde::{Deserialize, Serialize};

/// Above this the point count `(2k)^k` is impractical.
pub const MAX_STAGES: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct QPoint<S> {
    pub value: S,
    pub lo: S,
    pub hi: S,
    pub label: usize,
    pub generation: usize,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QStage<S> {
    pub k: usize,
    pub frame: FiniteFrame,
    /// Points in creation order; `order` lists them left to right.
    pub points: Vec<QPoint<S>>,
    pub order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QStageReport {
    pub k: usize,
    pub points: usize,
    pub strictly_increasing: bool,
    pub root_label: bool,
    /// Every flank label lies in `R` of its center's label.
    pub forth: bool,
    /// Per world, the labels seen by every non-frontier point labeled with it.
    pub coverage: Vec<Subset>,
    /// Least number of times a flank hits any `v ∈ R(w)`.
    pub min_hits: usize,
    pub full_coverage: bool,
    pub pass: bool,
}

fn half<S: Scalar>() -> S {
    S::from_ratio(1, 2)
}

pub fn q_stage<S: Scalar>(f: &FiniteFrame, k: usize) -> Result<QStage<S>, ConstructionError> {
    q_stage_with(f, &EnumerationFamily::cyclic(f), k)
}

pub fn q_stage_with<S: Scalar>(f: &FiniteFrame, theta: &EnumerationFamily, k: usize) -> Result<QStage<S>, ConstructionError> {
    if k == 0 || k > MAX_STAGES {
        return Err(ConstructionError::Parameter(format!("stages must be in 1..={MAX_STAGES}")));
    }
    let root = f.root().map_err(|_| ConstructionError::NotRooted)?;
    theta.validate(f)?;
    let mut points = vec![QPoint { value: half(), lo: S::zero(), hi: S::one(), label: root, generation: 0, parent: None }];
    let mut start = 0;
    for g in 0..k {
        let end = points.len();
        for p in start..end {
            let (c, a, b, w) = (points[p].value.clone(), points[p].lo.clone(), points[p].hi.clone(), points[p].label);
            let (mut lw, mut rw) = (c.clone() - a, b - c.clone());
            for i in 1..=k {
                let label = theta.theta(w, i - 1);
                // J_i on the left is [c − lw, c − lw/2]
                let (l_outer, l_inner) = (c.clone() - lw.clone(), c.clone() - lw.clone() * half());
                let (r_inner, r_outer) = (c.clone() + rw.clone() * half(), c.clone() + rw.clone());
                for (lo, hi) in [(l_outer, l_inner), (r_inner, r_outer)] {
                    let value = (lo.clone() + hi.clone()) * half();
                    points.push(QPoint { value, lo, hi, label, generation: g + 1, parent: Some(p) });
                }
                lw = lw * half();
                rw = rw * half();
            }
        }
        start = end;
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&x, &y| points[x].value.partial_cmp(&points[y].value).unwrap());
    Ok(QStage { k, frame: f.clone(), points, order })
}

impl<S: Scalar> QStage<S> {
    pub fn report(&self) -> QStageReport {
        let f = &self.frame;
        let n = f.size();
        let strictly_increasing = self.order.windows(2).all(|w| self.points[w[0]].value < self.points[w[1]].value);
        let root_label = f.roots().contains(self.points[0].label);
        let mut seen = vec![Subset::EMPTY; self.points.len()];
        let mut hits = vec![vec![0usize; n]; self.points.len()];
        let mut forth = true;
        for q in &self.points {
            if let Some(p) = q.parent {
                forth &= f.related(self.points[p].label, q.label);
                seen[p] = seen[p].with(q.label);
                hits[p][q.label] += 1;
            }
        }
        let mut coverage: Vec<Option<Subset>> = vec![None; n];
        let mut min_hits = usize::MAX;
        for (p, q) in self.points.iter().enumerate() {
            if q.generation >= self.k {
                continue;
            }
            let c = coverage[q.label].get_or_insert(seen[p]);
            *c = *c & seen[p];
            for v in f.successors(q.label).iter() {
                min_hits = min_hits.min(hits[p][v]);
            }
        }
        let coverage: Vec<Subset> = coverage.into_iter().map(Option::unwrap_or_default).collect();
        let full_coverage = self
            .points
            .iter()
            .filter(|q| q.generation < self.k)
            .all(|q| coverage[q.label] == f.successors(q.label));
        QStageReport {
            k: self.k,
            points: self.points.len(),
            pass: strictly_increasing && root_label && forth,
            strictly_increasing,
            root_label,
            forth,
            coverage,
            min_hits: if min_hits == usize::MAX { 0 } else { min_hits },
            full_coverage,
        }
    }

    /// `[value, label]` pairs left to right.
    pub fn listing(&self) -> Vec<(String, String)> {
        self.order.iter().map(|&i| (self.points[i].value.fraction_string(), self.frame.label(self.points[i].label))).collect()
    }
}
