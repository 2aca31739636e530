//! Finite Kripke frames, S4 combinatorics, frame morphisms, and the named
//! frame families (clusters, forks, truncated trees).

use crate::subset::{Subset, MAX_CARRIER};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("carrier of {0} worlds exceeds the {MAX_CARRIER}-world limit")]
    TooLarge(usize),
    #[error("pair ({0},{1}) outside the carrier")]
    OutOfRange(usize, usize),
    #[error("not an S4 frame: pair ({0},{1}) missing")]
    NotS4(usize, usize),
    #[error("size must be at least 1")]
    ZeroSize,
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("frame has no root")]
    NotRooted,
    #[error("invalid map: {0}")]
    BadMap(String),
}

/// A finite carrier `0..size` with a binary relation stored as successor rows.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteFrame {
    rows: Vec<Subset>,
    labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum S4Check {
    Pass,
    Fail { missing: (usize, usize) },
}

impl FiniteFrame {
    pub fn new(size: usize, pairs: &[(usize, usize)]) -> Result<Self, FrameError> {
        if size > MAX_CARRIER {
            return Err(FrameError::TooLarge(size));
        }
        let mut rows = vec![Subset::EMPTY; size];
        for &(i, j) in pairs {
            if i >= size || j >= size {
                return Err(FrameError::OutOfRange(i, j));
            }
            rows[i] = rows[i].with(j);
        }
        Ok(FiniteFrame { rows, labels: None })
    }

    /// Builds a frame from successor sets `R(w)`.
    pub fn from_rows(rows: Vec<Subset>) -> Result<Self, FrameError> {
        let n = rows.len();
        if n > MAX_CARRIER {
            return Err(FrameError::TooLarge(n));
        }
        for (i, r) in rows.iter().enumerate() {
            if !r.is_subset(Subset::full(n)) {
                return Err(FrameError::OutOfRange(i, 63 - r.0.leading_zeros() as usize));
            }
        }
        Ok(FiniteFrame { rows, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.size());
        self.labels = Some(labels);
        self
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn carrier(&self) -> Subset {
        Subset::full(self.size())
    }

    pub fn rows(&self) -> &[Subset] {
        &self.rows
    }

    pub fn related(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    /// `R(w)`.
    pub fn successors(&self, w: usize) -> Subset {
        self.rows[w]
    }

    /// `R⁻¹(A)`: worlds that see some member of `a`.
    pub fn predecessors(&self, a: Subset) -> Subset {
        Subset::from_iter((0..self.size()).filter(|&w| self.rows[w].meets(a)))
    }

    /// Worlds all of whose successors lie in `a`.
    pub fn box_of(&self, a: Subset) -> Subset {
        Subset::from_iter((0..self.size()).filter(|&w| self.rows[w].is_subset(a)))
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.size()).flat_map(|i| self.rows[i].iter().map(move |j| (i, j))).collect()
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, w: usize) -> String {
        self.labels.as_ref().map_or_else(|| w.to_string(), |l| l[w].clone())
    }

    pub fn check_s4(&self) -> S4Check {
        for w in 0..self.size() {
            if !self.related(w, w) {
                return S4Check::Fail { missing: (w, w) };
            }
        }
        for a in 0..self.size() {
            for b in self.rows[a].iter() {
                for c in self.rows[b].iter() {
                    if !self.related(a, c) {
                        return S4Check::Fail { missing: (a, c) };
                    }
                }
            }
        }
        S4Check::Pass
    }

    pub fn is_s4(&self) -> bool {
        self.check_s4() == S4Check::Pass
    }

    fn require_s4(&self) -> Result<(), FrameError> {
        match self.check_s4() {
            S4Check::Pass => Ok(()),
            S4Check::Fail { missing: (a, b) } => Err(FrameError::NotS4(a, b)),
        }
    }

    pub fn clusters(&self) -> Result<ClusterPartition, FrameError> {
        self.require_s4()?;
        let mut seen = Subset::EMPTY;
        let mut clusters = Vec::new();
        let mut maximal = Vec::new();
        for w in 0..self.size() {
            if seen.contains(w) {
                continue;
            }
            let c = Subset::from_iter(self.rows[w].iter().filter(|&v| self.related(v, w)));
            seen = seen | c;
            maximal.push(self.rows[w] == c);
            clusters.push(c);
        }
        Ok(ClusterPartition { clusters, maximal })
    }

    pub fn roots(&self) -> Subset {
        let all = self.carrier();
        Subset::from_iter((0..self.size()).filter(|&w| self.rows[w] == all))
    }

    pub fn is_rooted(&self) -> bool {
        !self.roots().is_empty()
    }

    /// Least-index root.
    pub fn root(&self) -> Result<usize, FrameError> {
        self.roots().first().ok_or(FrameError::NotRooted)
    }

    /// Connectedness of the underlying undirected graph.
    pub fn is_path_connected(&self) -> bool {
        let n = self.size();
        if n == 0 {
            return true;
        }
        let sym: Vec<Subset> = (0..n).map(|w| self.rows[w] | self.predecessors(Subset::singleton(w))).collect();
        let mut reach = Subset::singleton(0);
        loop {
            let next = reach.iter().fold(reach, |acc, w| acc | sym[w]);
            if next == reach {
                return reach == self.carrier();
            }
            reach = next;
        }
    }

    /// Restriction to `keep`, reindexed in increasing order; returns the
    /// subframe and the inclusion assignment.
    pub fn restrict(&self, keep: Subset) -> (FiniteFrame, Vec<usize>) {
        let idx: Vec<usize> = keep.iter().collect();
        let pos: HashMap<usize, usize> = idx.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let rows = idx
            .iter()
            .map(|&w| Subset::from_iter(self.rows[w].iter().filter_map(|v| pos.get(&v).copied())))
            .collect();
        let mut sub = FiniteFrame { rows, labels: None };
        if let Some(l) = &self.labels {
            sub.labels = Some(idx.iter().map(|&w| l[w].clone()).collect());
        }
        (sub, idx)
    }

    pub fn generated_subframe(&self, w: usize) -> Result<(FiniteFrame, FrameMap), FrameError> {
        self.require_s4()?;
        let (sub, idx) = self.restrict(self.rows[w]);
        let inc = FrameMap::new(sub.clone(), self.clone(), idx)?;
        Ok((sub, inc))
    }

    /// Relation upsets: sets closed under `R`.
    pub fn is_upset(&self, a: Subset) -> bool {
        a.iter().all(|w| self.rows[w].is_subset(a))
    }

    /// Transitive reflexive closure of the relation.
    pub fn reflexive_transitive_closure(&self) -> FiniteFrame {
        let n = self.size();
        let mut rows: Vec<Subset> = (0..n).map(|w| self.rows[w].with(w)).collect();
        for k in 0..n {
            for i in 0..n {
                if rows[i].contains(k) {
                    rows[i] = rows[i] | rows[k];
                }
            }
        }
        FiniteFrame { rows, labels: self.labels.clone() }
    }

    pub fn to_json(&self) -> FrameJson {
        FrameJson {
            worlds: self.size(),
            relation: self.pairs().into_iter().map(|(a, b)| [a, b]).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| l.iter().enumerate().map(|(i, s)| (i.to_string(), s.clone())).collect())
                .unwrap_or_default(),
        }
    }

    pub fn from_json(j: &FrameJson) -> Result<Self, FrameError> {
        let pairs: Vec<(usize, usize)> = j.relation.iter().map(|p| (p[0], p[1])).collect();
        let mut f = FiniteFrame::new(j.worlds, &pairs)?;
        if !j.labels.is_empty() {
            let mut labels: Vec<String> = (0..j.worlds).map(|i| i.to_string()).collect();
            for (k, v) in &j.labels {
                let i: usize = k.parse().map_err(|_| FrameError::BadMap(format!("label key {k}")))?;
                if i >= j.worlds {
                    return Err(FrameError::OutOfRange(i, i));
                }
                labels[i] = v.clone();
            }
            f.labels = Some(labels);
        }
        Ok(f)
    }

    /// DOT rendering: non-trivial clusters are boxed and edges follow the
    /// covering relation between clusters (arrows point up the order).
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph {name} {{\n  rankdir=BT;\n");
        let node = |w: usize| format!("  n{w} [label=\"{}\"];\n", self.label(w));
        match self.clusters() {
            Ok(part) => {
                for (k, c) in part.clusters.iter().enumerate() {
                    if c.len() > 1 {
                        let _ = writeln!(s, "  subgraph cluster_{k} {{\n    style=rounded;");
                        for w in c.iter() {
                            s.push_str("  ");
                            s.push_str(&node(w));
                        }
                        s.push_str("  }\n");
                    } else {
                        s.push_str(&node(c.first().unwrap()));
                    }
                }
                let reps: Vec<usize> = part.clusters.iter().map(|c| c.first().unwrap()).collect();
                for (i, &a) in reps.iter().enumerate() {
                    for (j, &b) in reps.iter().enumerate() {
                        if i == j || !self.related(a, b) {
                            continue;
                        }
                        let covered = reps.iter().enumerate().any(|(k, &m)| {
                            k != i && k != j && self.related(a, m) && self.related(m, b)
                        });
                        if !covered {
                            let _ = writeln!(s, "  n{a} -> n{b};");
                        }
                    }
                }
            }
            Err(_) => {
                for w in 0..self.size() {
                    s.push_str(&node(w));
                }
                for (a, b) in self.pairs() {
                    let _ = writeln!(s, "  n{a} -> n{b};");
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

impl std::fmt::Debug for FiniteFrame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteFrame({} worlds, {:?})", self.size(), self.pairs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameJson {
    pub worlds: usize,
    pub relation: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

impl Serialize for FiniteFrame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteFrame {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = FrameJson::deserialize(d)?;
        FiniteFrame::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// Clusters ordered by least member, with maximality markers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterPartition {
    pub clusters: Vec<Subset>,
    pub maximal: Vec<bool>,
}

impl ClusterPartition {
    pub fn maximal_clusters(&self) -> Vec<Subset> {
        self.clusters.iter().zip(&self.maximal).filter(|(_, &m)| m).map(|(c, _)| *c).collect()
    }

    pub fn cluster_of(&self, w: usize) -> Subset {
        *self.clusters.iter().find(|c| c.contains(w)).expect("world in partition")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameMap {
    pub source: FiniteFrame,
    pub target: FiniteFrame,
    pub assignment: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum MorphismCheck {
    Pass,
    /// `w R w'` but not `f(w) S f(w')`.
    Forth { w: usize, w2: usize },
    /// `f(w) S v` with no `R`-successor of `w` mapped to `v`.
    Back { w: usize, v: usize },
}

impl FrameMap {
    pub fn new(source: FiniteFrame, target: FiniteFrame, assignment: Vec<usize>) -> Result<Self, FrameError> {
        if assignment.len() != source.size() {
            return Err(FrameError::BadMap(format!(
                "assignment has {} entries for {} worlds",
                assignment.len(),
                source.size()
            )));
        }
        if let Some(&v) = assignment.iter().find(|&&v| v >= target.size()) {
            return Err(FrameError::BadMap(format!("world {v} not in target")));
        }
        Ok(FrameMap { source, target, assignment })
    }

    pub fn is_onto(&self) -> bool {
        self.source.carrier().image(&self.assignment) == self.target.carrier()
    }

    pub fn check_p_morphism(&self) -> MorphismCheck {
        let f = &self.assignment;
        for w in 0..self.source.size() {
            let succ = self.source.successors(w);
            for w2 in succ.iter() {
                if !self.target.related(f[w], f[w2]) {
                    return MorphismCheck::Forth { w, w2 };
                }
            }
            let img = succ.image(f);
            if let Some(v) = self.target.successors(f[w]).minus(img).first() {
                return MorphismCheck::Back { w, v };
            }
        }
        MorphismCheck::Pass
    }
}

pub fn check_p_morphism(m: &FrameMap) -> MorphismCheck {
    m.check_p_morphism()
}

pub fn disjoint_union(frames: &[FiniteFrame]) -> Result<(FiniteFrame, Vec<FrameMap>), FrameError> {
    let total: usize = frames.iter().map(FiniteFrame::size).sum();
    if total > MAX_CARRIER {
        return Err(FrameError::TooLarge(total));
    }
    let mut rows = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut offsets = Vec::new();
    for (k, f) in frames.iter().enumerate() {
        let off = rows.len();
        offsets.push(off);
        rows.extend(f.rows.iter().map(|r| Subset(r.0 << off)));
        labels.extend((0..f.size()).map(|w| format!("{}:{}", k, f.label(w))));
    }
    let union = FiniteFrame { rows, labels: Some(labels) };
    let inj = frames
        .iter()
        .zip(offsets)
        .map(|(f, off)| FrameMap::new(f.clone(), union.clone(), (0..f.size()).map(|w| w + off).collect()))
        .collect::<Result<_, _>>()?;
    Ok((union, inj))
}

/// Quotient by a partition (classes ordered by least member); the relation is
/// the image relation.
pub fn quotient(frame: &FiniteFrame, classes: &[Subset]) -> Result<(FiniteFrame, FrameMap), FrameError> {
    let n = frame.size();
    let mut seen = Subset::EMPTY;
    for c in classes {
        if c.is_empty() {
            return Err(FrameError::BadPartition("empty class".into()));
        }
        if c.meets(seen) || !c.is_subset(frame.carrier()) {
            return Err(FrameError::BadPartition(format!("class {c} overlaps or leaves the carrier")));
        }
        seen = seen | *c;
    }
    if seen != frame.carrier() {
        return Err(FrameError::BadPartition("classes do not cover the carrier".into()));
    }
    let mut sorted = classes.to_vec();
    sorted.sort_by_key(|c| c.first());
    let mut assign = vec![0; n];
    for (k, c) in sorted.iter().enumerate() {
        for w in c.iter() {
            assign[w] = k;
        }
    }
    let mut rows = vec![Subset::EMPTY; sorted.len()];
    for (a, b) in frame.pairs() {
        rows[assign[a]] = rows[assign[a]].with(assign[b]);
    }
    let mut q = FiniteFrame { rows, labels: None };
    if frame.labels.is_some() {
        q.labels = Some(
            sorted
                .iter()
                .map(|c| c.iter().map(|w| frame.label(w)).collect::<Vec<_>>().join("~"))
                .collect(),
        );
    }
    let proj = FrameMap::new(frame.clone(), q.clone(), assign)?;
    Ok((q, proj))
}

/// `C_n`: the total relation on `n` worlds.
pub fn make_cluster(n: usize) -> Result<FiniteFrame, FrameError> {
    if n == 0 {
        return Err(FrameError::ZeroSize);
    }
    if n > MAX_CARRIER {
        return Err(FrameError::TooLarge(n));
    }
    Ok(FiniteFrame { rows: vec![Subset::full(n); n], labels: Some((0..n).map(|i| format!("w{i}")).collect()) })
}

/// `F_n`: worlds `r = 0`, `m = 1`, and the cluster `w_i = i + 2`.
pub fn make_fork(n: usize) -> Result<FiniteFrame, FrameError> {
    if n == 0 {
        return Err(FrameError::ZeroSize);
    }
    if n + 2 > MAX_CARRIER {
        return Err(FrameError::TooLarge(n + 2));
    }
    let cluster = Subset(Subset::full(n).0 << 2);
    let mut rows = vec![Subset::full(n + 2), Subset::singleton(1)];
    rows.extend(std::iter::repeat(cluster).take(n));
    let mut labels = vec!["r".to_string(), "m".to_string()];
    labels.extend((0..n).map(|i| format!("w{i}")));
    Ok(FiniteFrame { rows, labels: Some(labels) })
}

/// The `n`-element chain `0 ≤ 1 ≤ … ≤ n−1`.
pub fn make_chain(n: usize) -> Result<FiniteFrame, FrameError> {
    if n > MAX_CARRIER {
        return Err(FrameError::TooLarge(n));
    }
    FiniteFrame::from_rows((0..n).map(|i| Subset::full(n).minus(Subset::full(i))).collect())
}

/// The discrete (identity) order on `n` worlds.
pub fn make_discrete(n: usize) -> Result<FiniteFrame, FrameError> {
    if n > MAX_CARRIER {
        return Err(FrameError::TooLarge(n));
    }
    FiniteFrame::from_rows((0..n).map(Subset::singleton).collect())
}

/// Nodes of `T_b` up to depth `d`, in breadth-first order. Depth-`d` nodes
/// may be flagged as proxies for the limit points of `L_b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedTree {
    branching: usize,
    depth: usize,
    with_limits: bool,
    nodes: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl TruncatedTree {
    pub fn new(branching: usize, depth: usize, with_limits: bool) -> Result<Self, FrameError> {
        if branching == 0 {
            return Err(FrameError::ZeroSize);
        }
        assert!(branching <= 255, "branching bound above 255");
        let mut nodes: Vec<Vec<u8>> = vec![vec![]];
        let mut start = 0;
        for _ in 0..depth {
            let end = nodes.len();
            for i in start..end {
                for c in 0..branching {
                    let mut s = nodes[i].clone();
                    s.push(c as u8);
                    nodes.push(s);
                }
            }
            start = end;
        }
        let index = nodes.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(TruncatedTree { branching, depth, with_limits, nodes, index })
    }

    pub fn branching(&self) -> usize {
        self.branching
    }
    pub fn depth(&self) -> usize {
        self.depth
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn node(&self, i: usize) -> &[u8] {
        &self.nodes[i]
    }
    pub fn nodes(&self) -> &[Vec<u8>] {
        &self.nodes
    }
    pub fn index_of(&self, seq: &[u8]) -> Option<usize> {
        self.index.get(seq).copied()
    }
    pub fn parent(&self, i: usize) -> Option<usize> {
        let s = &self.nodes[i];
        (!s.is_empty()).then(|| self.index[&s[..s.len() - 1]])
    }
    pub fn children(&self, i: usize) -> Vec<usize> {
        if self.nodes[i].len() == self.depth {
            return vec![];
        }
        (0..self.branching)
            .map(|c| {
                let mut s = self.nodes[i].clone();
                s.push(c as u8);
                self.index[&s]
            })
            .collect()
    }
    pub fn is_limit(&self, i: usize) -> bool {
        self.with_limits && self.depth > 0 && self.nodes[i].len() == self.depth
    }
    pub fn has_limits(&self) -> bool {
        self.with_limits
    }

    /// `a ≤ b` in the extension order.
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.nodes[b].starts_with(&self.nodes[a])
    }

    /// Comb root `a_n = 0ⁿ1`, if within the truncation.
    pub fn comb_root(&self, n: usize) -> Option<usize> {
        let mut s = vec![0u8; n];
        s.push(1);
        self.index_of(&s)
    }

    /// `↑a` as node indices.
    pub fn upset(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&b| self.le(a, b)).collect()
    }

    pub fn node_name(seq: &[u8]) -> String {
        if seq.is_empty() {
            "ε".into()
        } else {
            seq.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(if seq.iter().any(|&c| c > 9) { "." } else { "" })
        }
    }

    /// The extension order as a frame (at most 64 nodes).
    pub fn to_frame(&self) -> Result<FiniteFrame, FrameError> {
        if self.len() > MAX_CARRIER {
            return Err(FrameError::TooLarge(self.len()));
        }
        let rows = (0..self.len()).map(|a| Subset::from_iter(self.upset(a))).collect();
        let labels = self.nodes.iter().map(|s| TruncatedTree::node_name(s)).collect();
        Ok(FiniteFrame { rows, labels: Some(labels) })
    }
}

/// Truncated tree as an S4 frame (convenience wrapper).
pub fn truncated_tree(branching: usize, depth: usize, with_limits: bool) -> Result<TruncatedTree, FrameError> {
    TruncatedTree::new(branching, depth, with_limits)
}
