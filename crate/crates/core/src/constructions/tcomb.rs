//! t-comb labelings of the binary tree onto rooted frames.
//!
//! The root gets a root of the frame; if `a` carries `w` then every `lⁿ(a)`
//! carries `w` and `r(lⁿ(a))` carries `θ_w(n)`.

use super::ConstructionError;
use crate::frames::{FiniteFrame, TruncatedTree};
use crate::subset::Subset;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Per-world cyclic enumerations `θ_w` of `R(w)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationFamily {
    pub sequences: Vec<Vec<usize>>,
}

impl EnumerationFamily {
    /// `θ_w` lists `R(w)` in increasing world order.
    pub fn cyclic(f: &FiniteFrame) -> Self {
        EnumerationFamily { sequences: (0..f.size()).map(|w| f.successors(w).iter().collect()).collect() }
    }

    /// Each `θ_w` must list `R(w)` exactly once per period.
    pub fn validate(&self, f: &FiniteFrame) -> Result<(), ConstructionError> {
        if self.sequences.len() != f.size() {
            return Err(ConstructionError::Parameter("one enumeration per world required".into()));
        }
        for (w, seq) in self.sequences.iter().enumerate() {
            let set = Subset::from_iter(seq.iter().copied().filter(|&v| v < 64));
            if seq.len() != f.successors(w).len() || set != f.successors(w) {
                return Err(ConstructionError::BadEnumeration { world: w });
            }
        }
        Ok(())
    }

    pub fn theta(&self, w: usize, n: usize) -> usize {
        let s = &self.sequences[w];
        s[n % s.len()]
    }
}

/// Comb scheme on a binary tree for an arbitrary label type.
pub(crate) fn comb_labels<L: Clone>(tree: &TruncatedTree, root: L, theta: impl Fn(&L, usize) -> L) -> Vec<L> {
    assert_eq!(tree.branching(), 2, "comb labelings live on the binary tree");
    let mut labels: Vec<Option<L>> = vec![None; tree.len()];
    labels[0] = Some(root);
    // breadth-first order puts parents first
    for a in 1..tree.len() {
        let seq = tree.node(a);
        let parent = tree.parent(a).unwrap();
        let label = if *seq.last().unwrap() == 0 {
            labels[parent].clone().unwrap()
        } else {
            let mut n = 0;
            let mut c = parent;
            while tree.node(c).last() == Some(&0) {
                n += 1;
                c = tree.parent(c).unwrap();
            }
            theta(labels[c].as_ref().unwrap(), n)
        };
        labels[a] = Some(label);
    }
    labels.into_iter().map(Option::unwrap).collect()
}

/// Tree nodes labeled by worlds of a target frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMap {
    pub tree: TruncatedTree,
    pub target: FiniteFrame,
    pub labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledMapJson {
    pub nodes: Vec<String>,
    pub labels: BTreeMap<String, usize>,
    pub target: crate::frames::FrameJson,
}

impl LabeledMap {
    pub fn image(&self) -> Subset {
        Subset::from_iter(self.labels.iter().copied())
    }

    pub fn to_json(&self) -> LabeledMapJson {
        let nodes: Vec<String> = self.tree.nodes().iter().map(|s| TruncatedTree::node_name(s)).collect();
        let labels = nodes.iter().cloned().zip(self.labels.iter().copied()).collect();
        LabeledMapJson { nodes, labels, target: self.target.to_json() }
    }

    /// Frame map from the tree order (at most 64 nodes).
    pub fn frame_map(&self) -> Result<crate::frames::FrameMap, ConstructionError> {
        Ok(crate::frames::FrameMap::new(self.tree.to_frame()?, self.target.clone(), self.labels.clone())?)
    }

    /// Labels occurring in each node's subtree.
    pub fn subtree_labels(&self) -> Vec<Subset> {
        let mut sub: Vec<Subset> = self.labels.iter().map(|&w| Subset::singleton(w)).collect();
        for a in (1..self.tree.len()).rev() {
            let p = self.tree.parent(a).unwrap();
            sub[p] = sub[p] | sub[a];
        }
        sub
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph labeling {\n  rankdir=BT;\n");
        for (a, seq) in self.tree.nodes().iter().enumerate() {
            s.push_str(&format!(
                "  n{a} [label=\"{}: {}\"];\n",
                TruncatedTree::node_name(seq),
                self.target.label(self.labels[a])
            ));
            if let Some(p) = self.tree.parent(a) {
                s.push_str(&format!("  n{p} -> n{a};\n"));
            }
        }
        s.push_str("}\n");
        s
    }
}

pub fn tcomb_labeling(f: &FiniteFrame, theta: &EnumerationFamily, depth: usize) -> Result<LabeledMap, ConstructionError> {
    if depth < 1 {
        return Err(ConstructionError::Parameter("depth must be at least 1".into()));
    }
    if !f.is_s4() {
        let crate::frames::S4Check::Fail { missing } = f.check_s4() else { unreachable!() };
        return Err(crate::frames::FrameError::NotS4(missing.0, missing.1).into());
    }
    let root = f.root().map_err(|_| ConstructionError::NotRooted)?;
    theta.validate(f)?;
    let tree = TruncatedTree::new(2, depth, true)?;
    let labels = comb_labels(&tree, root, |&w, n| theta.theta(w, n));
    Ok(LabeledMap { tree, target: f.clone(), labels })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombReport {
    pub depth: usize,
    /// Nodes up to this depth have their back condition checked.
    pub margin: i64,
    pub forth_violation: Option<(String, String)>,
    pub back_violation: Option<(String, usize)>,
    pub image: Subset,
    pub onto: bool,
    pub back_checked_nodes: usize,
    pub pass: bool,
}

/// Forth along every edge; back for nodes with depth ≤ d − |W| − 1.
pub fn verify_comb_pmorphism(m: &LabeledMap, f: &FiniteFrame) -> CombReport {
    let tree = &m.tree;
    let name = |a: usize| TruncatedTree::node_name(tree.node(a));
    let mut forth_violation = None;
    for a in 1..tree.len() {
        let p = tree.parent(a).unwrap();
        if !f.related(m.labels[p], m.labels[a]) || !f.related(m.labels[a], m.labels[a]) {
            forth_violation = Some((name(p), name(a)));
            break;
        }
    }
    let margin = tree.depth() as i64 - f.size() as i64 - 1;
    let sub = m.subtree_labels();
    let mut back_violation = None;
    let mut back_checked_nodes = 0;
    for a in 0..tree.len() {
        if tree.node(a).len() as i64 > margin {
            continue;
        }
        back_checked_nodes += 1;
        if let Some(v) = f.successors(m.labels[a]).minus(sub[a]).first() {
            back_violation = Some((name(a), v));
            break;
        }
    }
    let image = m.image();
    let onto = image == f.carrier();
    CombReport {
        depth: tree.depth(),
        margin,
        pass: forth_violation.is_none() && back_violation.is_none() && margin >= 0,
        forth_violation,
        back_violation,
        image,
        onto,
        back_checked_nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{make_chain, make_cluster, make_fork};

    #[test]
    fn single_world() {
        let c1 = make_cluster(1).unwrap();
        let m = tcomb_labeling(&c1, &EnumerationFamily::cyclic(&c1), 4).unwrap();
        assert!(m.labels.iter().all(|&w| w == 0));
        assert!(verify_comb_pmorphism(&m, &c1).pass);
    }

    #[test]
    fn chain_scheme() {
        let ch = make_chain(2).unwrap();
        let theta = EnumerationFamily::cyclic(&ch);
        assert_eq!(theta.sequences[0], vec![0, 1]);
        let m = tcomb_labeling(&ch, &theta, 6).unwrap();
        let at = |s: &[u8]| m.labels[m.tree.index_of(s).unwrap()];
        assert_eq!(at(&[]), 0);
        assert_eq!(at(&[0]), 0);
        assert_eq!(at(&[1]), 0);
        assert_eq!(at(&[0, 1]), 1);
        let r = verify_comb_pmorphism(&m, &ch);
        assert!(r.pass && r.onto);
        assert_eq!(r.margin, 3);
    }

    #[test]
    fn fork_image() {
        let f = make_fork(1).unwrap();
        let m = tcomb_labeling(&f, &EnumerationFamily::cyclic(&f), 8).unwrap();
        assert_eq!(m.image(), f.carrier());
        assert!(verify_comb_pmorphism(&m, &f).pass);
    }

    #[test]
    fn fault_injection() {
        let ch = make_chain(2).unwrap();
        let mut m = tcomb_labeling(&ch, &EnumerationFamily::cyclic(&ch), 6).unwrap();
        let a = m.tree.index_of(&[0, 1]).unwrap();
        let child = m.tree.index_of(&[0, 1, 0]).unwrap();
        m.labels[child] = 0;
        let r = verify_comb_pmorphism(&m, &ch);
        assert!(!r.pass);
        assert_eq!(r.forth_violation, Some(("01".into(), "010".into())));
        let _ = a;
    }

    #[test]
    fn rejects_unrooted_and_bad_theta() {
        let d = crate::frames::make_discrete(2).unwrap();
        assert_eq!(tcomb_labeling(&d, &EnumerationFamily::cyclic(&d), 3), Err(ConstructionError::NotRooted));
        let ch = make_chain(2).unwrap();
        let bad = EnumerationFamily { sequences: vec![vec![0, 0], vec![1]] };
        assert!(tcomb_labeling(&ch, &bad, 3).is_err());
        let swapped = EnumerationFamily { sequences: vec![vec![1, 0], vec![1]] };
        assert!(verify_comb_pmorphism(&tcomb_labeling(&ch, &swapped, 6).unwrap(), &ch).pass);
    }
}
