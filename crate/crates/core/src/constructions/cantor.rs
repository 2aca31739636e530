//! Labeling of the truncated Cantor tree `L₂` onto the truncated `L_b`.
//!
//! `θ_t` cycles through the children of `t` followed by `t` itself, so the
//! labels along any path of right children strictly increase.

use super::tcomb::comb_labels;
use super::ConstructionError;
use crate::frames::TruncatedTree;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

#[derive(Debug, Clone, PartialEq)]
pub struct CantorLabeling {
    pub source: TruncatedTree,
    pub target: TruncatedTree,
    /// Target node index for each source node.
    pub labels: Vec<usize>,
}

fn theta(target: &TruncatedTree, t: usize, n: usize) -> usize {
    let kids = target.children(t);
    let period = kids.len() + 1;
    let k = n % period;
    if k < kids.len() {
        kids[k]
    } else {
        t
    }
}

pub fn cantor_to_lalpha(b: usize, depth: usize) -> Result<CantorLabeling, ConstructionError> {
    if b < 1 || depth < 2 {
        return Err(ConstructionError::Parameter("need b ≥ 1 and depth ≥ 2".into()));
    }
    let source = TruncatedTree::new(2, depth, true)?;
    let target = TruncatedTree::new(b, depth, true)?;
    // a limit proxy's value is the supremum of its prefix labels, which at the
    // truncation is the label of the proxy itself
    let labels = comb_labels(&source, 0usize, |&t, n| theta(&target, t, n));
    Ok(CantorLabeling { source, target, labels })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CantorReport {
    pub monotone: bool,
    /// `f(↑a) ⊆ ↑f(a)` for every node.
    pub into_upsets: bool,
    /// Nodes `a` with `len(a) ≤ d − b − 1` whose image covers `↑f(a)` up to
    /// the reachable depth.
    pub claim_checked: usize,
    pub claim_failure: Option<String>,
    /// Target depth fully covered by `f(↑root)`.
    pub root_cover_depth: usize,
    pub root_cover: bool,
    /// Limit proxies whose prefix labels strictly increase on every step
    /// taken by a right child.
    pub pass: bool,
}

impl CantorLabeling {
    pub fn f(&self, a: usize) -> &[u8] {
        self.target.node(self.labels[a])
    }

    /// Labels of the chain of prefixes of `a`.
    pub fn prefix_labels(&self, a: usize) -> Vec<Vec<u8>> {
        let seq = self.source.node(a);
        (0..=seq.len()).map(|k| self.f(self.source.index_of(&seq[..k]).unwrap()).to_vec()).collect()
    }

    pub fn to_json(&self) -> super::tcomb::LabeledMapJson {
        let nodes: Vec<String> = self.source.nodes().iter().map(|s| TruncatedTree::node_name(s)).collect();
        let labels: BTreeMap<String, usize> = nodes.iter().cloned().zip(self.labels.iter().copied()).collect();
        let target = crate::frames::FrameJson {
            worlds: self.target.len(),
            relation: vec![],
            labels: self
                .target
                .nodes()
                .iter()
                .enumerate()
                .map(|(i, s)| (i.to_string(), TruncatedTree::node_name(s)))
                .collect(),
        };
        super::tcomb::LabeledMapJson { nodes, labels, target }
    }

    pub fn verify(&self) -> CantorReport {
        let (s, t) = (&self.source, &self.target);
        let b = t.branching();
        let d = s.depth();
        let mut monotone = true;
        for a in 1..s.len() {
            let p = s.parent(a).unwrap();
            if !t.le(self.labels[p], self.labels[a]) {
                monotone = false;
            }
        }
        // image sets of subtrees, bottom-up
        let mut images: Vec<HashSet<usize>> = self.labels.iter().map(|&x| HashSet::from([x])).collect();
        for a in (1..s.len()).rev() {
            let p = s.parent(a).unwrap();
            let moved = std::mem::take(&mut images[a]);
            images[p].extend(moved.iter().copied());
            images[a] = moved;
        }
        let mut into_upsets = true;
        let mut claim_checked = 0;
        let mut claim_failure = None;
        for a in 0..s.len() {
            let fa = self.labels[a];
            if !images[a].iter().all(|&x| t.le(fa, x)) {
                into_upsets = false;
            }
            let len = s.node(a).len();
            if len + b + 1 > d {
                continue;
            }
            claim_checked += 1;
            let reach = (d - len) / (b + 1);
            let flen = t.node(fa).len();
            for x in t.upset(fa) {
                if t.node(x).len() <= flen + reach && !images[a].contains(&x) && claim_failure.is_none() {
                    claim_failure = Some(format!(
                        "{} misses {}",
                        TruncatedTree::node_name(s.node(a)),
                        TruncatedTree::node_name(t.node(x))
                    ));
                }
            }
        }
        let root_cover_depth = d / (b + 1);
        let root_cover = (0..t.len()).filter(|&x| t.node(x).len() <= root_cover_depth).all(|x| images[0].contains(&x));
        let ones: Vec<u8> = vec![1; d];
        let chain = self.prefix_labels(s.index_of(&ones).unwrap());
        let increasing = chain.windows(2).all(|w| w[1].len() > w[0].len() && w[1].starts_with(&w[0]));
        CantorReport {
            pass: monotone && into_upsets && claim_failure.is_none() && root_cover && (b == 1 || increasing),
            monotone,
            into_upsets,
            claim_checked,
            claim_failure,
            root_cover_depth,
            root_cover,
        }
    }
}
