//! Middle-thirds labeling of an interval onto the binary tree.
//!
//! Level 0 removes the middle thirds `U_{i,j}` of `[0,1]`; level `k+1` repeats
//! the removal inside the closure of every level-`k` interval. A removed
//! interval with odd `j` appends `r` (1) to its parent's label, even `j`
//! appends `l` (0).

use super::ConstructionError;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// An open interval removed at some level.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovedInterval<S> {
    pub lo: S,
    pub hi: S,
    /// Removal stage `i` and index `j` (1-based) inside the parent.
    pub stage: usize,
    pub index: usize,
    pub label: Vec<u8>,
    /// Index of the enclosing interval one level up.
    pub parent: Option<usize>,
}

/// A closed interval surviving all kept removal stages.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedStage<S> {
    pub lo: S,
    pub hi: S,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalConstruction<S> {
    pub depth: usize,
    /// Removal stages `i ≤ removal_depth` are kept inside each level.
    pub removal_depth: usize,
    pub levels: Vec<Vec<RemovedInterval<S>>>,
    pub cantor_stages: Vec<Vec<ClosedStage<S>>>,
}

fn third<S: Scalar>() -> S {
    S::from_ratio(1, 3)
}

/// Middle-thirds removal on `[lo, hi]` up to stage `r`.
fn split<S: Scalar>(lo: &S, hi: &S, r: usize) -> (Vec<(S, S, usize, usize)>, Vec<(S, S)>) {
    let mut removed = Vec::new();
    let mut stage = vec![(lo.clone(), hi.clone())];
    for i in 0..=r {
        let mut next = Vec::with_capacity(stage.len() * 2);
        for (j, (a, b)) in stage.into_iter().enumerate() {
            let w = (b.clone() - a.clone()) * third::<S>();
            let (m1, m2) = (a.clone() + w.clone(), b.clone() - w);
            removed.push((m1.clone(), m2.clone(), i, j + 1));
            next.push((a, m1));
            next.push((m2, b));
        }
        stage = next;
    }
    (removed, stage)
}

/// Levels `0..=depth`, keeping removal stages up to `removal_depth` per level.
pub fn interval_construction_with<S: Scalar>(depth: usize, removal_depth: usize) -> IntervalConstruction<S> {
    let mut levels: Vec<Vec<RemovedInterval<S>>> = Vec::new();
    let mut cantor_stages = Vec::new();
    for k in 0..=depth {
        let parents: Vec<(S, S, Vec<u8>, Option<usize>)> = if k == 0 {
            vec![(S::zero(), S::one(), vec![], None)]
        } else {
            levels[k - 1].iter().enumerate().map(|(p, u)| (u.lo.clone(), u.hi.clone(), u.label.clone(), Some(p))).collect()
        };
        let mut level = Vec::new();
        let mut closed = Vec::new();
        for (lo, hi, label, parent) in parents {
            let (removed, rest) = split(&lo, &hi, removal_depth);
            for (a, b, i, j) in removed {
                let mut l = label.clone();
                l.push((j % 2) as u8);
                level.push(RemovedInterval { lo: a, hi: b, stage: i, index: j, label: l, parent });
            }
            closed.extend(rest.into_iter().map(|(lo, hi)| ClosedStage { lo, hi, parent }));
        }
        level.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        closed.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        levels.push(level);
        cantor_stages.push(closed);
    }
    IntervalConstruction { depth, removal_depth, levels, cantor_stages }
}

/// Default removal depth is `min(depth, 2)`.
pub fn interval_construction<S: Scalar>(depth: usize) -> IntervalConstruction<S> {
    interval_construction_with(depth, depth.min(2))
}

/// Label chain `L₀(x), L₁(x), …` of a point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointChain {
    pub labels: Vec<Vec<u8>>,
    /// Step `m` at which `x` was found in a Cantor set of level `m`.
    pub stopped_at: Option<usize>,
}

/// Float scalars cannot detect cycles exactly; this bounds the scan.
const FLOAT_SCAN: usize = 60;

/// Runs at most `k` label steps. Exact scalars detect membership in the
/// Cantor set by revisiting a rescaled position.
pub fn label_of_point<S: Scalar>(x: &S, k: usize) -> Result<PointChain, ConstructionError> {
    if *x < S::zero() || *x > S::one() {
        return Err(ConstructionError::Parameter(format!("{x} lies outside [0,1]")));
    }
    let (one, two, three) = (S::one(), S::from_int(2), S::from_int(3));
    let mut t = x.clone();
    let mut label = vec![];
    let mut labels = vec![label.clone()];
    for step in 0..=k {
        // locate t in the middle-thirds tree of [0,1]
        let mut seen: Vec<S> = Vec::new();
        // parity of j: left children are odd, right children even
        let mut odd = true;
        let hit = loop {
            if S::EXACT && seen.contains(&t) || !S::EXACT && seen.len() >= FLOAT_SCAN {
                break false;
            }
            seen.push(t.clone());
            if t.clone() * three.clone() < one {
                t = t * three.clone();
                odd = true;
            } else if t.clone() * three.clone() > two {
                t = t * three.clone() - two.clone();
                odd = false;
            } else if t.clone() * three.clone() == one || t.clone() * three.clone() == two {
                break false;
            } else {
                break true;
            }
        };
        if !hit {
            return Ok(PointChain { labels, stopped_at: Some(step) });
        }
        if step == k {
            break;
        }
        label.push(odd as u8);
        labels.push(label.clone());
        t = t * three.clone() - one.clone();
    }
    Ok(PointChain { labels, stopped_at: None })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub depth: usize,
    pub removal_depth: usize,
    pub level_sizes: Vec<usize>,
    /// `max length in 𝒰_k` as `p/q`, with whether it equals `1/3^{k+1}`.
    pub max_lengths: Vec<String>,
    pub max_length_exact: bool,
    pub disjoint: bool,
    pub label_domains: bool,
    /// Removed length inside every parent equals `|I|(1 − (2/3)^{r+1})`.
    pub removed_sums: bool,
    pub child_labels: bool,
    /// Every sequence of length `k+1` labels some member of `𝒰_k`.
    pub all_sequences: bool,
    pub missing_sequence: Option<String>,
    pub pass: bool,
}

fn close<S: Scalar>(a: &S, b: &S) -> bool {
    if S::EXACT {
        return a == b;
    }
    let d = a.clone() - b.clone();
    let eps = S::from_ratio(1, 1_000_000_000);
    d < eps && S::zero() - d < eps
}

fn pow<S: Scalar>(b: S, e: usize) -> S {
    (0..e).fold(S::one(), |acc, _| acc * b.clone())
}

pub fn verify_interval_lemmas<S: Scalar>(c: &IntervalConstruction<S>) -> IntervalReport {
    let r = c.removal_depth;
    let mut max_lengths = Vec::new();
    let mut max_length_exact = true;
    let mut disjoint = true;
    let mut label_domains = true;
    for (k, level) in c.levels.iter().enumerate() {
        let bound = pow(third::<S>(), k + 1);
        let mut max = S::zero();
        for u in level {
            let len = u.hi.clone() - u.lo.clone();
            if len > max {
                max = len;
            }
            label_domains &= u.label.len() == k + 1;
        }
        max_length_exact &= close(&max, &bound);
        max_lengths.push(max.fraction_string());
        disjoint &= level.windows(2).all(|w| w[0].hi <= w[1].lo) && level.iter().all(|u| u.lo < u.hi);
    }
    // per-parent removed totals and child labels
    let kept = S::one() - pow(S::from_ratio(2, 3), r + 1);
    let mut removed_sums = true;
    let mut child_labels = true;
    for k in 0..c.levels.len() {
        let nparents = if k == 0 { 1 } else { c.levels[k - 1].len() };
        let mut totals = vec![S::zero(); nparents];
        let mut seen = vec![[false; 2]; nparents];
        for u in &c.levels[k] {
            let p = u.parent.unwrap_or(0);
            totals[p] = totals[p].clone() + (u.hi.clone() - u.lo.clone());
            let (plabel, plo, phi) = match u.parent {
                Some(p) => {
                    let q = &c.levels[k - 1][p];
                    (q.label.as_slice(), q.lo.clone(), q.hi.clone())
                }
                None => (&[][..], S::zero(), S::one()),
            };
            child_labels &= u.label.starts_with(plabel) && u.label[plabel.len()] == (u.index % 2) as u8;
            child_labels &= plo <= u.lo && u.hi <= phi;
            seen[p][u.label[plabel.len()] as usize] = true;
        }
        for p in 0..nparents {
            let width = match k {
                0 => S::one(),
                _ => c.levels[k - 1][p].hi.clone() - c.levels[k - 1][p].lo.clone(),
            };
            removed_sums &= close(&totals[p], &(width * kept.clone()));
            child_labels &= r == 0 || seen[p] == [true, true];
        }
    }
    let mut missing_sequence = None;
    for (k, level) in c.levels.iter().enumerate() {
        if k >= 20 {
            break;
        }
        let mut hit = vec![false; 1 << (k + 1)];
        for u in level {
            let code = u.label.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
            hit[code] = true;
        }
        if let Some(code) = hit.iter().position(|h| !h) {
            let s: String = (0..=k).rev().map(|i| if code >> i & 1 == 1 { '1' } else { '0' }).collect();
            missing_sequence = Some(s);
            break;
        }
    }
    let all_sequences = missing_sequence.is_none();
    IntervalReport {
        depth: c.depth,
        removal_depth: r,
        level_sizes: c.levels.iter().map(Vec::len).collect(),
        pass: max_length_exact && disjoint && label_domains && removed_sums && child_labels && all_sequences,
        max_lengths,
        max_length_exact,
        disjoint,
        label_domains,
        removed_sums,
        child_labels,
        all_sequences,
        missing_sequence,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalJson {
    pub depth: usize,
    pub removal_depth: usize,
    pub levels: Vec<Vec<IntervalEntry>>,
    pub cantor_stages: Vec<Vec<[String; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalEntry {
    pub lo: String,
    pub hi: String,
    pub stage: usize,
    pub index: usize,
    pub label: String,
}

impl<S: Scalar> IntervalConstruction<S> {
    pub fn to_json(&self) -> IntervalJson {
        IntervalJson {
            depth: self.depth,
            removal_depth: self.removal_depth,
            levels: self
                .levels
                .iter()
                .map(|l| {
                    l.iter()
                        .map(|u| IntervalEntry {
                            lo: u.lo.fraction_string(),
                            hi: u.hi.fraction_string(),
                            stage: u.stage,
                            index: u.index,
                            label: u.label.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect(),
                        })
                        .collect()
                })
                .collect(),
            cantor_stages: self
                .cantor_stages
                .iter()
                .map(|l| l.iter().map(|c| [c.lo.fraction_string(), c.hi.fraction_string()]).collect())
                .collect(),
        }
    }

    /// The level-`k` member containing `x`, if any.
    pub fn member_containing(&self, k: usize, x: &S) -> Option<&RemovedInterval<S>> {
        self.levels.get(k)?.iter().find(|u| u.lo < *x && *x < u.hi)
    }
}
