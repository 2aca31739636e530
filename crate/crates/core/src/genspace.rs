//! Finite topological spaces and general spaces.
//!
//! Every finite topology is Alexandroff, so a [`FiniteTopology`] is stored by
//! its minimal neighborhoods `N(x)`; these are exactly the rows of the
//! specialization order.

use crate::algebra::{field_generate, AlgebraError, Closure, SetField};
use crate::frames::{FiniteFrame, FrameError};
use crate::subset::{Subset, MAX_CARRIER};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("opens {0}")]
    NotATopology(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("not tight: {0}")]
    NotTight(TightnessWitness),
    #[error("invalid map: {0}")]
    BadMap(String),
    #[error("embedding {part}: image {image} is not open")]
    EmbeddingNotOpen { part: usize, image: Subset },
    #[error("embedding {part} is not a homeomorphism onto its image at point {point}")]
    NotHomeomorphism { part: usize, point: usize },
    #[error("embedding {part}: traced field does not match the shared field")]
    FieldMismatch { part: usize },
    #[error("embedding {part} identifies points of one part with each other")]
    SelfGluing { part: usize },
    #[error("gluing spec has {embeddings} embeddings for {parts} parts")]
    Arity { parts: usize, embeddings: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteTopology {
    nbhd: Vec<Subset>,
}

impl std::fmt::Debug for FiniteTopology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteTopology(N = {:?})", self.nbhd)
    }
}

impl FiniteTopology {
    /// From an explicit list of opens, checked for ∅, X, ∪ and ∩.
    pub fn new(n: usize, opens: &[Subset]) -> Result<Self, SpaceError> {
        if n > MAX_CARRIER {
            return Err(SpaceError::Frame(FrameError::TooLarge(n)));
        }
        let full = Subset::full(n);
        let set: HashSet<Subset> = opens.iter().copied().collect();
        if !set.contains(&Subset::EMPTY) || !set.contains(&full) {
            return Err(SpaceError::NotATopology("must contain ∅ and the carrier".into()));
        }
        for &a in &set {
            if !a.is_subset(full) {
                return Err(SpaceError::NotATopology(format!("{a} leaves the carrier")));
            }
            for &b in &set {
                if !set.contains(&(a | b)) {
                    return Err(SpaceError::NotATopology(format!("not closed under union: {a} ∪ {b}")));
                }
                if !set.contains(&(a & b)) {
                    return Err(SpaceError::NotATopology(format!("not closed under intersection: {a} ∩ {b}")));
                }
            }
        }
        Ok(Self::from_subbasis(n, opens))
    }

    /// Topology generated by an arbitrary family (as a subbasis), with the
    /// carrier always open.
    pub fn from_subbasis(n: usize, family: &[Subset]) -> Self {
        let full = Subset::full(n);
        let nbhd = (0..n).map(|x| family.iter().filter(|b| b.contains(x)).fold(full, |acc, &b| acc & b)).collect();
        FiniteTopology { nbhd }
    }

    /// From minimal neighborhoods; they must form a preorder.
    pub fn from_neighborhoods(nbhd: Vec<Subset>) -> Result<Self, SpaceError> {
        let frame = FiniteFrame::from_rows(nbhd.clone())?;
        if let crate::frames::S4Check::Fail { missing } = frame.check_s4() {
            return Err(SpaceError::NotATopology(format!("neighborhoods are not a preorder: {missing:?}")));
        }
        Ok(FiniteTopology { nbhd })
    }

    pub fn size(&self) -> usize {
        self.nbhd.len()
    }
    pub fn carrier(&self) -> Subset {
        Subset::full(self.size())
    }
    pub fn neighborhood(&self, x: usize) -> Subset {
        self.nbhd[x]
    }
    pub fn neighborhoods(&self) -> &[Subset] {
        &self.nbhd
    }

    pub fn is_open(&self, a: Subset) -> bool {
        a.iter().all(|x| self.nbhd[x].is_subset(a))
    }

    /// Smallest open superset.
    pub fn open_hull(&self, a: Subset) -> Subset {
        a.iter().fold(Subset::EMPTY, |acc, x| acc | self.nbhd[x])
    }

    pub fn closure_op(&self) -> Closure {
        Closure::Rows(self.nbhd.clone())
    }

    pub fn closure(&self, a: Subset) -> Subset {
        self.closure_op().apply(a)
    }

    pub fn interior(&self, a: Subset) -> Subset {
        Subset::from_iter(a.iter().filter(|&x| self.nbhd[x].is_subset(a)))
    }

    /// All opens, in increasing mask order (n ≤ 24).
    pub fn opens(&self) -> Vec<Subset> {
        assert!(self.size() <= 24, "open enumeration over {} points", self.size());
        let mut seen: HashSet<Subset> = HashSet::from([Subset::EMPTY]);
        let mut frontier = vec![Subset::EMPTY];
        while let Some(a) = frontier.pop() {
            for &b in &self.nbhd {
                let u = a | b;
                if seen.insert(u) {
                    frontier.push(u);
                }
            }
        }
        let mut v: Vec<Subset> = seen.into_iter().collect();
        v.sort();
        v
    }

    pub fn specialization_order(&self) -> FiniteFrame {
        FiniteFrame::from_rows(self.nbhd.clone()).expect("neighborhoods fit the carrier")
    }

    pub fn to_json(&self, field: Option<&SetField>) -> StructureJson {
        StructureJson::Space {
            carrier: self.size(),
            opens: self.opens().into_iter().map(|a| a.0).collect(),
            field: field.map(|f| f.members().iter().map(|m| m.0).collect()),
        }
    }
}

pub fn specialization_order(x: &FiniteTopology) -> FiniteFrame {
    x.specialization_order()
}

/// Opens are the `R`-upsets.
pub fn alexandroff_topology(f: &FiniteFrame) -> Result<FiniteTopology, SpaceError> {
    if let crate::frames::S4Check::Fail { missing } = f.check_s4() {
        return Err(FrameError::NotS4(missing.0, missing.1).into());
    }
    Ok(FiniteTopology { nbhd: f.rows().to_vec() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Base {
    Frame(FiniteFrame),
    Space(FiniteTopology),
}

/// A frame or space together with a field closed under its closure.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralStructure {
    base: Base,
    field: SetField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TightnessWitness {
    /// `w` does not see `v`, yet every member containing `v` meets `R(w)`.
    Frame { w: usize, v: usize },
    /// No member open set yields the minimal neighborhood of `x`.
    Space { x: usize },
}

impl std::fmt::Display for TightnessWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TightnessWitness::Frame { w, v } => write!(f, "{w} does not see {v} but no member separates them"),
            TightnessWitness::Space { x } => write!(f, "field opens do not cut out the neighborhood of {x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptiveReport {
    pub differentiated: bool,
    pub compact: bool,
    /// Compactness holds because the carrier is finite.
    pub vacuously_compact: bool,
    pub tight: bool,
    pub undifferentiated_pair: Option<(usize, usize)>,
    pub tightness_witness: Option<TightnessWitness>,
}

impl DescriptiveReport {
    pub fn is_descriptive(&self) -> bool {
        self.differentiated && self.compact && self.tight
    }
}

impl GeneralStructure {
    pub fn new(base: Base, members: Vec<Subset>) -> Result<Self, SpaceError> {
        let n = base_size(&base);
        let field = SetField::new(n, members, base_closure(&base))?;
        Ok(GeneralStructure { base, field })
    }

    /// The field generated by `generators` under the base closure.
    pub fn generated(base: Base, generators: &[Subset]) -> Result<Self, SpaceError> {
        let field = field_generate(base_size(&base), base_closure(&base), generators)?;
        Ok(GeneralStructure { base, field })
    }

    pub fn full(base: Base) -> Result<Self, SpaceError> {
        let field = SetField::powerset(base_size(&base), base_closure(&base))?;
        Ok(GeneralStructure { base, field })
    }

    pub fn full_frame(f: FiniteFrame) -> Result<Self, SpaceError> {
        Self::full(Base::Frame(f))
    }

    pub fn full_space(x: FiniteTopology) -> Result<Self, SpaceError> {
        Self::full(Base::Space(x))
    }

    pub fn base(&self) -> &Base {
        &self.base
    }
    pub fn field(&self) -> &SetField {
        &self.field
    }
    pub fn size(&self) -> usize {
        self.field.carrier_size()
    }
    pub fn is_frame(&self) -> bool {
        matches!(self.base, Base::Frame(_))
    }

    /// `R` for frames, `N(x)` for spaces.
    pub fn rows(&self) -> Vec<Subset> {
        match &self.base {
            Base::Frame(f) => f.rows().to_vec(),
            Base::Space(x) => x.neighborhoods().to_vec(),
        }
    }

    /// Space view (Alexandroff topology for frames).
    pub fn topology(&self) -> FiniteTopology {
        FiniteTopology { nbhd: self.rows() }
    }

    /// Frame view (specialization order for spaces).
    pub fn frame(&self) -> FiniteFrame {
        match &self.base {
            Base::Frame(f) => f.clone(),
            Base::Space(x) => x.specialization_order(),
        }
    }

    pub fn check_descriptive(&self) -> DescriptiveReport {
        let undifferentiated_pair = self.field.atoms().iter().find(|a| a.len() > 1).map(|a| {
            let mut it = a.iter();
            (it.next().unwrap(), it.next().unwrap())
        });
        // every ultrafilter of a finite field is principal on a nonempty atom
        let compact = self.field.atoms().iter().all(|a| !a.is_empty());
        let tightness_witness = self.tightness_witness();
        DescriptiveReport {
            differentiated: undifferentiated_pair.is_none(),
            compact,
            vacuously_compact: true,
            tight: tightness_witness.is_none(),
            undifferentiated_pair,
            tightness_witness,
        }
    }

    fn tightness_witness(&self) -> Option<TightnessWitness> {
        let n = self.size();
        match &self.base {
            Base::Frame(f) => {
                for w in 0..n {
                    for v in 0..n {
                        if f.related(w, v) {
                            continue;
                        }
                        let separated = self
                            .field
                            .members()
                            .iter()
                            .any(|&a| a.contains(v) && !f.predecessors(a).contains(w));
                        if !separated {
                            return Some(TightnessWitness::Frame { w, v });
                        }
                    }
                }
                None
            }
            Base::Space(x) => {
                let basis: Vec<Subset> = self.field.members().iter().copied().filter(|&a| x.is_open(a)).collect();
                (0..n)
                    .find(|&p| basis.iter().filter(|b| b.contains(p)).fold(x.carrier(), |acc, &b| acc & b) != x.neighborhood(p))
                    .map(|x| TightnessWitness::Space { x })
            }
        }
    }

    fn require_tight(&self) -> Result<(), SpaceError> {
        let r = self.check_descriptive();
        match r.tightness_witness {
            Some(w) if r.compact => Err(SpaceError::NotTight(w)),
            _ => Ok(()),
        }
    }

    /// General space → general frame: same field, specialization order.
    pub fn to_frame(&self) -> Result<GeneralStructure, SpaceError> {
        self.require_tight()?;
        let frame = match &self.base {
            Base::Frame(f) => f.clone(),
            Base::Space(x) => x.specialization_order(),
        };
        let field = self.field.with_closure(Closure::Rows(frame.rows().to_vec()))?;
        Ok(GeneralStructure { base: Base::Frame(frame), field })
    }

    /// General frame → general space: topology generated by the field's
    /// `R`-upsets.
    pub fn to_space(&self) -> Result<GeneralStructure, SpaceError> {
        self.require_tight()?;
        let top = match &self.base {
            Base::Space(x) => x.clone(),
            Base::Frame(f) => {
                let basis: Vec<Subset> = self.field.members().iter().copied().filter(|&a| f.is_upset(a)).collect();
                FiniteTopology::from_subbasis(f.size(), &basis)
            }
        };
        let field = self.field.with_closure(top.closure_op())?;
        Ok(GeneralStructure { base: Base::Space(top), field })
    }

    pub fn to_json(&self) -> StructureJson {
        let field = Some(self.field.members().iter().map(|m| m.0).collect());
        match &self.base {
            Base::Frame(f) => {
                let j = f.to_json();
                StructureJson::Frame { worlds: j.worlds, relation: j.relation, labels: j.labels, field }
            }
            Base::Space(x) => StructureJson::Space {
                carrier: x.size(),
                opens: x.opens().into_iter().map(|a| a.0).collect(),
                field,
            },
        }
    }

    pub fn from_json(j: &StructureJson) -> Result<Self, SpaceError> {
        let (base, field) = match j {
            StructureJson::Frame { worlds, relation, labels, field } => {
                let f = FiniteFrame::from_json(&crate::frames::FrameJson {
                    worlds: *worlds,
                    relation: relation.clone(),
                    labels: labels.clone(),
                })?;
                (Base::Frame(f), field)
            }
            StructureJson::Space { carrier, opens, field } => {
                let opens: Vec<Subset> = opens.iter().map(|&m| Subset(m)).collect();
                (Base::Space(FiniteTopology::new(*carrier, &opens)?), field)
            }
        };
        match field {
            Some(ms) => Self::new(base, ms.iter().map(|&m| Subset(m)).collect()),
            None => Self::full(base),
        }
    }

    /// DOT rendering of the frame view.
    pub fn to_dot(&self, name: &str) -> String {
        self.frame().to_dot(name)
    }
}

fn base_size(b: &Base) -> usize {
    match b {
        Base::Frame(f) => f.size(),
        Base::Space(x) => x.size(),
    }
}

fn base_closure(b: &Base) -> Closure {
    match b {
        Base::Frame(f) => Closure::Rows(f.rows().to_vec()),
        Base::Space(x) => x.closure_op(),
    }
}

/// JSON form of a general frame or general space; a missing field means the
/// full powerset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StructureJson {
    Frame {
        worlds: usize,
        relation: Vec<[usize; 2]>,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        labels: BTreeMap<String, String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<Vec<u64>>,
    },
    Space {
        carrier: usize,
        opens: Vec<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<Vec<u64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum InteriorCheck {
    Pass,
    NotContinuous { open: Subset, preimage: Subset },
    NotOpen { open: Subset, image: Subset },
    FieldPullback { member: Subset, preimage: Subset },
    BadMap { reason: String },
}

fn check_map_topologies(f: &[usize], x: &FiniteTopology, y: &FiniteTopology) -> InteriorCheck {
    if f.len() != x.size() {
        return InteriorCheck::BadMap { reason: format!("{} values for {} points", f.len(), x.size()) };
    }
    if let Some(&v) = f.iter().find(|&&v| v >= y.size()) {
        return InteriorCheck::BadMap { reason: format!("value {v} outside the target") };
    }
    for q in 0..y.size() {
        let open = y.neighborhood(q);
        let preimage = open.preimage(f);
        if !x.is_open(preimage) {
            return InteriorCheck::NotContinuous { open, preimage };
        }
    }
    for p in 0..x.size() {
        let open = x.neighborhood(p);
        let image = open.image(f);
        if !y.is_open(image) {
            return InteriorCheck::NotOpen { open, image };
        }
    }
    InteriorCheck::Pass
}

/// Continuity and openness between finite spaces.
pub fn check_interior_map_spaces(f: &[usize], x: &FiniteTopology, y: &FiniteTopology) -> InteriorCheck {
    check_map_topologies(f, x, y)
}

/// Continuity, openness, and pullback of field members.
pub fn check_interior_map(f: &[usize], x: &GeneralStructure, y: &GeneralStructure) -> InteriorCheck {
    let r = check_map_topologies(f, &x.topology(), &y.topology());
    if r != InteriorCheck::Pass {
        return r;
    }
    for &member in y.field.atoms() {
        let preimage = member.preimage(f);
        if !x.field.contains(preimage) {
            return InteriorCheck::FieldPullback { member, preimage };
        }
    }
    InteriorCheck::Pass
}

fn shift(a: Subset, off: usize) -> Subset {
    if off >= 64 {
        Subset::EMPTY
    } else {
        Subset(a.0 << off)
    }
}

/// Topological sum; frames stay frames when every part is a frame.
pub fn sum(parts: &[GeneralStructure]) -> Result<(GeneralStructure, Vec<usize>), SpaceError> {
    let n: usize = parts.iter().map(GeneralStructure::size).sum();
    if n > MAX_CARRIER {
        return Err(FrameError::TooLarge(n).into());
    }
    let mut rows = Vec::with_capacity(n);
    let mut atoms = Vec::new();
    let mut offsets = Vec::new();
    for p in parts {
        let off = rows.len();
        offsets.push(off);
        rows.extend(p.rows().into_iter().map(|r| shift(r, off)));
        atoms.extend(p.field.atoms().iter().map(|&a| shift(a, off)));
    }
    let base = if parts.iter().all(GeneralStructure::is_frame) {
        let mut frame = FiniteFrame::from_rows(rows)?;
        let labels: Vec<String> = parts
            .iter()
            .enumerate()
            .flat_map(|(k, p)| {
                let f = p.frame();
                (0..p.size()).map(move |w| format!("{k}:{}", f.label(w)))
            })
            .collect();
        frame = frame.with_labels(labels);
        Base::Frame(frame)
    } else {
        Base::Space(FiniteTopology { nbhd: rows })
    };
    Ok((GeneralStructure::generated(base, &atoms)?, offsets))
}

/// Parts glued along open copies of a shared structure.
#[derive(Debug, Clone, PartialEq)]
pub struct GluingSpec {
    pub parts: Vec<GeneralStructure>,
    pub shared: GeneralStructure,
    /// `embeddings[i][y]` is the image of shared point `y` in part `i`.
    pub embeddings: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingSpecJson {
    pub parts: Vec<StructureJson>,
    pub shared: StructureJson,
    pub embeddings: Vec<Vec<usize>>,
}

impl GluingSpec {
    pub fn from_json(j: &GluingSpecJson) -> Result<Self, SpaceError> {
        Ok(GluingSpec {
            parts: j.parts.iter().map(GeneralStructure::from_json).collect::<Result<_, _>>()?,
            shared: GeneralStructure::from_json(&j.shared)?,
            embeddings: j.embeddings.clone(),
        })
    }

    pub fn to_json(&self) -> GluingSpecJson {
        GluingSpecJson {
            parts: self.parts.iter().map(GeneralStructure::to_json).collect(),
            shared: self.shared.to_json(),
            embeddings: self.embeddings.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), SpaceError> {
        if self.parts.len() != self.embeddings.len() {
            return Err(SpaceError::Arity { parts: self.parts.len(), embeddings: self.embeddings.len() });
        }
        let ys = self.shared.topology();
        for (i, (part, e)) in self.parts.iter().zip(&self.embeddings).enumerate() {
            if e.len() != ys.size() || e.iter().any(|&v| v >= part.size()) {
                return Err(SpaceError::BadMap(format!("embedding {i} is not a map from the shared carrier")));
            }
            let image = Subset::from_iter(e.iter().copied());
            if image.len() != e.len() {
                return Err(SpaceError::SelfGluing { part: i });
            }
            let xs = part.topology();
            if !xs.is_open(image) {
                return Err(SpaceError::EmbeddingNotOpen { part: i, image });
            }
            for y in 0..ys.size() {
                if ys.neighborhood(y).image(e) != xs.neighborhood(e[y]) {
                    return Err(SpaceError::NotHomeomorphism { part: i, point: y });
                }
            }
            let mut traced: Vec<Subset> = part
                .field
                .atoms()
                .iter()
                .map(|&a| (a & image).preimage(e))
                .filter(|t| !t.is_empty())
                .collect();
            traced.sort_by_key(|t| t.first());
            if traced != self.shared.field.atoms() {
                return Err(SpaceError::FieldMismatch { part: i });
            }
        }
        Ok(())
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        parent[hi] = lo;
    }
}

/// Quotient of a structure by a partition of its carrier, given as the class
/// index of each point (classes numbered by least member). Returns the
/// quotient topology and the saturated field.
pub fn quotient_structure(s: &GeneralStructure, rho: &[usize], as_frame: bool) -> Result<GeneralStructure, SpaceError> {
    let m = rho.iter().map(|&c| c + 1).max().unwrap_or(0);
    let rows = s.rows();
    let mut qrows = vec![Subset::EMPTY; m];
    for (x, row) in rows.iter().enumerate() {
        qrows[rho[x]] = qrows[rho[x]] | row.image(rho);
    }
    let qframe = FiniteFrame::from_rows(qrows)?.reflexive_transitive_closure();
    // atoms linked by identified points form the saturated atoms
    let atoms = s.field.atoms();
    let mut owner = vec![0usize; s.size()];
    for (k, a) in atoms.iter().enumerate() {
        for x in a.iter() {
            owner[x] = k;
        }
    }
    let mut parent: Vec<usize> = (0..atoms.len()).collect();
    let mut first_in_class: Vec<Option<usize>> = vec![None; m];
    for x in 0..s.size() {
        match first_in_class[rho[x]] {
            Some(y) => union(&mut parent, owner[x], owner[y]),
            None => first_in_class[rho[x]] = Some(x),
        }
    }
    let mut merged: BTreeMap<usize, Subset> = BTreeMap::new();
    for k in 0..atoms.len() {
        let r = find(&mut parent, k);
        let e = merged.entry(r).or_default();
        *e = *e | atoms[k].image(rho);
    }
    let qatoms: Vec<Subset> = merged.into_values().collect();
    let base = if as_frame {
        Base::Frame(qframe)
    } else {
        Base::Space(FiniteTopology { nbhd: qframe.rows().to_vec() })
    };
    let members = all_unions(&qatoms)?;
    GeneralStructure::new(base, members)
}

fn all_unions(atoms: &[Subset]) -> Result<Vec<Subset>, SpaceError> {
    if atoms.len() > crate::algebra::MAX_ATOMS {
        return Err(AlgebraError::TooManyAtoms(atoms.len()).into());
    }
    Ok((0..1u64 << atoms.len())
        .map(|bits| (0..atoms.len()).filter(|&i| bits >> i & 1 == 1).fold(Subset::EMPTY, |acc, i| acc | atoms[i]))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gluing {
    pub structure: GeneralStructure,
    /// Quotient map from the sum of the parts.
    pub rho: Vec<usize>,
    pub sum: GeneralStructure,
    pub offsets: Vec<usize>,
}

/// Glues the parts along the shared structure: `f_i(y) ~ f_j(y)`.
pub fn glue(spec: &GluingSpec) -> Result<Gluing, SpaceError> {
    spec.validate()?;
    let (total, offsets) = sum(&spec.parts)?;
    let n = total.size();
    let mut parent: Vec<usize> = (0..n).collect();
    for y in 0..spec.shared.size() {
        let first = offsets[0] + spec.embeddings[0][y];
        for (i, e) in spec.embeddings.iter().enumerate().skip(1) {
            union(&mut parent, first, offsets[i] + e[y]);
        }
    }
    let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rho = vec![0; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        let next = class_of_root.len();
        rho[x] = *class_of_root.entry(r).or_insert(next);
    }
    let as_frame = total.is_frame() && spec.shared.is_frame();
    let mut structure = quotient_structure(&total, &rho, as_frame)?;
    if let Base::Frame(f) = &mut structure.base {
        let src = total.frame();
        let mut labels = vec![String::new(); rho.iter().map(|&c| c + 1).max().unwrap_or(0)];
        for x in 0..n {
            if labels[rho[x]].is_empty() {
                labels[rho[x]] = src.label(x);
            } else {
                labels[rho[x]] = format!("{}={}", labels[rho[x]], src.label(x));
            }
        }
        *f = f.clone().with_labels(labels);
    }
    Ok(Gluing { structure, rho, sum: total, offsets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{make_chain, make_cluster, make_discrete, make_fork};

    fn s(xs: &[usize]) -> Subset {
        Subset::from_iter(xs.iter().copied())
    }

    fn sierpinski() -> FiniteTopology {
        FiniteTopology::new(2, &[s(&[]), s(&[1]), s(&[0, 1])]).unwrap()
    }

    #[test]
    fn topology_validation() {
        assert!(FiniteTopology::new(2, &[s(&[]), s(&[0]), s(&[1])]).is_err());
        assert!(FiniteTopology::new(3, &[s(&[]), s(&[0]), s(&[1]), s(&[0, 1, 2])]).is_err());
        assert_eq!(sierpinski().opens(), vec![s(&[]), s(&[1]), s(&[0, 1])]);
        assert_eq!(sierpinski().closure(s(&[1])), s(&[0, 1]));
        assert_eq!(sierpinski().closure(s(&[0])), s(&[0]));
    }

    #[test]
    fn specialization_examples() {
        assert_eq!(sierpinski().specialization_order().pairs(), vec![(0, 0), (0, 1), (1, 1)]);
        let disc = FiniteTopology::new(2, &Subset::all(2).collect::<Vec<_>>()).unwrap();
        assert_eq!(disc.specialization_order().pairs(), vec![(0, 0), (1, 1)]);
        let ind = FiniteTopology::new(2, &[s(&[]), s(&[0, 1])]).unwrap();
        assert_eq!(ind.specialization_order().pair_count(), 4);
    }

    #[test]
    fn alexandroff_examples() {
        assert_eq!(alexandroff_topology(&make_cluster(2).unwrap()).unwrap().opens(), vec![s(&[]), s(&[0, 1])]);
        assert_eq!(alexandroff_topology(&make_chain(2).unwrap()).unwrap().opens(), sierpinski().opens());
        assert_eq!(alexandroff_topology(&make_discrete(3).unwrap()).unwrap().opens().len(), 8);
        assert!(alexandroff_topology(&FiniteFrame::new(1, &[]).unwrap()).is_err());
    }

    #[test]
    fn descriptive_examples() {
        let r = GeneralStructure::full_space(sierpinski()).unwrap().check_descriptive();
        assert!(r.differentiated && r.compact && r.tight && r.vacuously_compact);
        let disc = FiniteTopology::new(2, &Subset::all(2).collect::<Vec<_>>()).unwrap();
        let r = GeneralStructure::new(Base::Space(disc), vec![s(&[]), s(&[0, 1])]).unwrap().check_descriptive();
        assert!(!r.differentiated);
        assert_eq!(r.undifferentiated_pair, Some((0, 1)));
        let c2 = GeneralStructure::new(Base::Frame(make_cluster(2).unwrap()), vec![s(&[]), s(&[0, 1])]).unwrap();
        let r = c2.check_descriptive();
        assert!(r.tight && !r.differentiated);
        // discrete frame with trivial field: 0 does not see 1 and nothing separates
        let d = GeneralStructure::new(Base::Frame(make_discrete(2).unwrap()), vec![s(&[]), s(&[0, 1])]).unwrap();
        assert_eq!(d.check_descriptive().tightness_witness, Some(TightnessWitness::Frame { w: 0, v: 1 }));
        assert!(matches!(d.to_space(), Err(SpaceError::NotTight(_))));
    }

    #[test]
    fn conversions() {
        let sp = GeneralStructure::full_space(sierpinski()).unwrap();
        let fr = sp.to_frame().unwrap();
        assert_eq!(fr.frame().pairs(), vec![(0, 0), (0, 1), (1, 1)]);
        assert_eq!(fr.to_space().unwrap().topology(), sp.topology());
        let c1 = GeneralStructure::full_frame(make_cluster(1).unwrap()).unwrap();
        assert_eq!(c1.to_space().unwrap().topology().opens(), vec![s(&[]), s(&[0])]);
    }

    #[test]
    fn interior_map_examples() {
        let sier = GeneralStructure::full_space(sierpinski()).unwrap();
        assert_eq!(check_interior_map(&[0, 1], &sier, &sier), InteriorCheck::Pass);
        let ind = GeneralStructure::full_space(FiniteTopology::new(2, &[s(&[]), s(&[0, 1])]).unwrap()).unwrap();
        let pt = GeneralStructure::full_space(FiniteTopology::new(1, &[s(&[]), s(&[0])]).unwrap()).unwrap();
        assert_eq!(check_interior_map(&[0, 0], &ind, &pt), InteriorCheck::Pass);
        let disc = GeneralStructure::full_space(FiniteTopology::new(2, &Subset::all(2).collect::<Vec<_>>()).unwrap()).unwrap();
        assert_eq!(
            check_interior_map(&[0, 1], &sier, &disc),
            InteriorCheck::NotContinuous { open: s(&[0]), preimage: s(&[0]) }
        );
    }

    #[test]
    fn sum_examples() {
        let sier = GeneralStructure::full_space(sierpinski()).unwrap();
        let (two, offs) = sum(&[sier.clone(), sier.clone()]).unwrap();
        assert_eq!((two.size(), two.topology().opens().len()), (4, 9));
        assert_eq!(offs, vec![0, 2]);
        assert_eq!(sum(&[]).unwrap().0.size(), 0);
        assert_eq!(sum(&[sier.clone()]).unwrap().0.topology(), sier.topology());
    }

    fn fork_glue() -> GluingSpec {
        let f1 = GeneralStructure::full_frame(make_fork(1).unwrap()).unwrap();
        let pt = GeneralStructure::full_frame(make_cluster(1).unwrap()).unwrap();
        GluingSpec { parts: vec![f1.clone(), f1], shared: pt, embeddings: vec![vec![1], vec![1]] }
    }

    #[test]
    fn glue_forks_at_maxima() {
        let g = glue(&fork_glue()).unwrap();
        let f = g.structure.frame();
        assert_eq!(f.size(), 5);
        assert_eq!(g.rho, vec![0, 1, 2, 3, 1, 4]);
        assert!(f.is_path_connected() && f.roots().is_empty());
        assert_eq!(f.clusters().unwrap().maximal_clusters().len(), 3);
        assert_eq!(check_interior_map(&g.rho, &g.sum, &g.structure), InteriorCheck::Pass);
    }

    #[test]
    fn glue_single_part_is_copy() {
        let c2 = GeneralStructure::full_frame(make_cluster(2).unwrap()).unwrap();
        let spec = GluingSpec { parts: vec![c2.clone()], shared: c2.clone(), embeddings: vec![vec![0, 1]] };
        let g = glue(&spec).unwrap();
        assert_eq!(g.structure.frame().pairs(), c2.frame().pairs());
        assert_eq!(g.rho, vec![0, 1]);
    }

    #[test]
    fn glue_rejections() {
        let mut spec = fork_glue();
        spec.embeddings[1] = vec![0];
        assert!(matches!(glue(&spec), Err(SpaceError::EmbeddingNotOpen { part: 1, .. })));
        let c2 = GeneralStructure::full_frame(make_cluster(2).unwrap()).unwrap();
        let d2 = GeneralStructure::full_frame(make_discrete(2).unwrap()).unwrap();
        let spec = GluingSpec { parts: vec![c2.clone()], shared: d2.clone(), embeddings: vec![vec![0, 1]] };
        assert!(matches!(glue(&spec), Err(SpaceError::NotHomeomorphism { .. })));
        let spec = GluingSpec { parts: vec![c2.clone()], shared: c2.clone(), embeddings: vec![vec![0, 0]] };
        assert!(matches!(glue(&spec), Err(SpaceError::SelfGluing { part: 0 })));
        let coarse = GeneralStructure::new(Base::Frame(make_cluster(2).unwrap()), vec![s(&[]), s(&[0, 1])]).unwrap();
        let spec = GluingSpec { parts: vec![c2], shared: coarse, embeddings: vec![vec![0, 1]] };
        assert!(matches!(glue(&spec), Err(SpaceError::FieldMismatch { part: 0 })));
    }

    #[test]
    fn coarse_field_hides_two_maximal_clusters() {
        let v = FiniteFrame::new(3, &[(0, 0), (1, 1), (2, 2), (0, 1), (0, 2)]).unwrap();
        let g = GeneralStructure::new(Base::Frame(v.clone()), vec![s(&[]), s(&[0, 1, 2])]).unwrap();
        assert!(g.field().is_connected());
        assert!(crate::algebra::validates(g.field(), &crate::parse("<>[]p -> []<>p").unwrap(), 4).unwrap().is_valid());
        assert_eq!(v.clusters().unwrap().maximal_clusters().len(), 2);
        assert!(!g.check_descriptive().is_descriptive());
    }

    #[test]
    fn json_round_trip() {
        let g = GeneralStructure::new(Base::Space(sierpinski()), vec![s(&[]), s(&[0]), s(&[1]), s(&[0, 1])]).unwrap();
        let j = serde_json::to_string(&g.to_json()).unwrap();
        let back = GeneralStructure::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, g);
        let spec = fork_glue();
        let j = serde_json::to_string(&spec.to_json()).unwrap();
        assert_eq!(GluingSpec::from_json(&serde_json::from_str(&j).unwrap()).unwrap(), spec);
    }
}
