//! Finite closure algebras represented as fields of sets.

use crate::formula::Formula;
use crate::subset::{Subset, MAX_CARRIER};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Fields with more atoms than this are not materialized.
pub const MAX_ATOMS: usize = 20;

/// Largest carrier for which closures are tabulated over the powerset.
pub const MAX_TABLE: usize = 16;

/// Default bound on the number of letters in a validity search.
pub const DEFAULT_LETTER_CAP: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("closure axiom `{axiom}` fails at {witness}")]
    ClosureAxiom { axiom: &'static str, witness: Subset },
    #[error("carrier of {0} points is too large")]
    TooLarge(usize),
    #[error("field has {0} atoms, above the materialization limit of {MAX_ATOMS}")]
    TooManyAtoms(usize),
    #[error("family is not a field: {0}")]
    NotAField(String),
    #[error("family not closed under closure: c({set}) = {image}")]
    NotClosed { set: Subset, image: Subset },
    #[error("letter `{0}` has no value")]
    Unassigned(String),
    #[error("value {value} of `{letter}` is not a member of the algebra")]
    NotMember { letter: String, value: Subset },
    #[error("{letters} letters exceed the cap of {cap}")]
    CapExceeded { letters: usize, cap: usize },
    #[error("residuation fails for a={a}, b={b}, x={x}")]
    Residuation { a: Subset, b: Subset, x: Subset },
    #[error("modal operator in intuitionistic formula {0}")]
    ModalFormula(String),
}

/// A closure operator on the powerset of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Closure {
    /// `c(A)` for every mask `A`, indexed by `A.0`.
    Table(Vec<Subset>),
    /// `x ∈ c(A)` iff `rows[x]` meets `A` (closure as `R⁻¹`).
    Rows(Vec<Subset>),
}

impl Closure {
    pub fn from_fn(n: usize, f: impl Fn(Subset) -> Subset) -> Result<Closure, AlgebraError> {
        if n > MAX_TABLE {
            return Err(AlgebraError::TooLarge(n));
        }
        Ok(Closure::Table(Subset::all(n).map(f).collect()))
    }

    /// The discrete closure `c(A) = A`.
    pub fn discrete(n: usize) -> Closure {
        Closure::Rows((0..n).map(Subset::singleton).collect())
    }

    pub fn apply(&self, a: Subset) -> Subset {
        match self {
            Closure::Table(t) => t[a.0 as usize],
            Closure::Rows(rows) => {
                let mut out = 0u64;
                for (x, r) in rows.iter().enumerate() {
                    if r.meets(a) {
                        out |= 1 << x;
                    }
                }
                Subset(out)
            }
        }
    }

    /// Checks `c∅=∅`, `A⊆cA`, `c(A∪B)=cA∪cB`, `ccA=cA` on a carrier of size `n`.
    pub fn check_axioms(&self, n: usize) -> Result<(), AlgebraError> {
        match self {
            Closure::Rows(rows) => {
                if rows.len() != n {
                    return Err(AlgebraError::NotAField("closure rows do not match the carrier".into()));
                }
                for x in 0..n {
                    if !rows[x].contains(x) {
                        return Err(AlgebraError::ClosureAxiom { axiom: "A ⊆ cA", witness: Subset::singleton(x) });
                    }
                }
                for x in 0..n {
                    for y in rows[x].iter() {
                        if let Some(z) = rows[y].minus(rows[x]).first() {
                            return Err(AlgebraError::ClosureAxiom { axiom: "ccA = cA", witness: Subset::singleton(z) });
                        }
                    }
                }
                Ok(())
            }
            Closure::Table(t) => {
                if t.len() != 1usize << n {
                    return Err(AlgebraError::NotAField("closure table does not match the carrier".into()));
                }
                if !t[0].is_empty() {
                    return Err(AlgebraError::ClosureAxiom { axiom: "c∅ = ∅", witness: Subset::EMPTY });
                }
                for a in Subset::all(n) {
                    let c = t[a.0 as usize];
                    if !a.is_subset(c) || !c.is_subset(Subset::full(n)) {
                        return Err(AlgebraError::ClosureAxiom { axiom: "A ⊆ cA", witness: a });
                    }
                    let joined = a.iter().fold(Subset::EMPTY, |acc, x| acc | t[1 << x]);
                    if joined != c {
                        return Err(AlgebraError::ClosureAxiom { axiom: "c(A∪B) = cA ∪ cB", witness: a });
                    }
                    if t[c.0 as usize] != c {
                        return Err(AlgebraError::ClosureAxiom { axiom: "ccA = cA", witness: a });
                    }
                }
                Ok(())
            }
        }
    }

    /// Tabulated form over the whole powerset (n ≤ 16).
    pub fn tabulate(&self, n: usize) -> Result<Closure, AlgebraError> {
        Closure::from_fn(n, |a| self.apply(a))
    }
}

/// A field of subsets of `0..n` closed under a closure operator.
#[derive(Debug, Clone)]
pub struct SetField {
    n: usize,
    members: Vec<Subset>,
    atoms: Vec<Subset>,
    closure: Closure,
}

impl PartialEq for SetField {
    /// Extensional: same carrier and members, closures agreeing on members.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.members == other.members
            && self.members.iter().all(|&a| self.closure.apply(a) == other.closure.apply(a))
    }
}

fn refine(atoms: &mut Vec<Subset>, by: Subset) -> bool {
    let before = atoms.len();
    let mut out = Vec::with_capacity(before + 4);
    for &a in atoms.iter() {
        let (i, o) = (a & by, a.minus(by));
        if !i.is_empty() {
            out.push(i);
        }
        if !o.is_empty() {
            out.push(o);
        }
    }
    *atoms = out;
    atoms.len() != before
}

fn unions_of(atoms: &[Subset]) -> Result<Vec<Subset>, AlgebraError> {
    if atoms.len() > MAX_ATOMS {
        return Err(AlgebraError::TooManyAtoms(atoms.len()));
    }
    let mut members: Vec<Subset> = (0..1u64 << atoms.len())
        .map(|bits| Subset::from_iter((0..atoms.len()).filter(|&i| bits >> i & 1 == 1)).iter().fold(Subset::EMPTY, |acc, i| acc | atoms[i]))
        .collect();
    members.sort();
    Ok(members)
}

fn sorted_atoms(mut atoms: Vec<Subset>) -> Vec<Subset> {
    atoms.sort_by_key(|a| a.first());
    atoms
}

impl SetField {
    /// Validates an explicit family.
    pub fn new(n: usize, members: Vec<Subset>, closure: Closure) -> Result<SetField, AlgebraError> {
        if n > MAX_CARRIER {
            return Err(AlgebraError::TooLarge(n));
        }
        closure.check_axioms(n)?;
        let full = Subset::full(n);
        let mut members = members;
        members.sort();
        members.dedup();
        if let Some(m) = members.iter().find(|m| !m.is_subset(full)) {
            return Err(AlgebraError::NotAField(format!("{m} leaves the carrier")));
        }
        if members.binary_search(&Subset::EMPTY).is_err() || members.binary_search(&full).is_err() {
            return Err(AlgebraError::NotAField("∅ or the carrier is missing".into()));
        }
        let mut atoms = if n == 0 { vec![] } else { vec![full] };
        for &m in &members {
            refine(&mut atoms, m);
        }
        if atoms.len() > MAX_ATOMS || members.len() != 1usize << atoms.len() {
            return Err(AlgebraError::NotAField("not closed under complement and intersection".into()));
        }
        let f = SetField { n, members, atoms: sorted_atoms(atoms), closure };
        for &a in &f.atoms {
            let c = f.closure.apply(a);
            if !f.contains(c) {
                return Err(AlgebraError::NotClosed { set: a, image: c });
            }
        }
        Ok(f)
    }

    /// All subsets of the carrier.
    pub fn powerset(n: usize, closure: Closure) -> Result<SetField, AlgebraError> {
        closure.check_axioms(n)?;
        let atoms: Vec<Subset> = (0..n).map(Subset::singleton).collect();
        let members = unions_of(&atoms)?;
        Ok(SetField { n, members, atoms, closure })
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }
    pub fn carrier(&self) -> Subset {
        Subset::full(self.n)
    }
    pub fn members(&self) -> &[Subset] {
        &self.members
    }
    pub fn atoms(&self) -> &[Subset] {
        &self.atoms
    }
    pub fn closure(&self) -> &Closure {
        &self.closure
    }
    pub fn contains(&self, a: Subset) -> bool {
        self.members.binary_search(&a).is_ok()
    }
    pub fn is_powerset(&self) -> bool {
        self.atoms.len() == self.n
    }

    pub fn close(&self, a: Subset) -> Subset {
        self.closure.apply(a)
    }

    pub fn interior(&self, a: Subset) -> Subset {
        self.closure.apply(a.complement(self.n)).complement(self.n)
    }

    pub fn is_open(&self, a: Subset) -> bool {
        self.interior(a) == a
    }

    pub fn is_closed(&self, a: Subset) -> bool {
        self.close(a) == a
    }

    /// Same members under a different (agreeing) closure operator.
    pub fn with_closure(&self, closure: Closure) -> Result<SetField, AlgebraError> {
        SetField::new(self.n, self.members.clone(), closure)
    }

    pub fn clopens(&self) -> Vec<Subset> {
        self.members.iter().copied().filter(|&a| self.is_closed(a) && self.is_open(a)).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.clopens().iter().all(|&a| a.is_empty() || a == self.carrier())
    }

    /// `◊a ∧ ◊b = 0` forces `a = 0` or `b = 0`; enough to test atoms.
    pub fn is_well_connected(&self) -> bool {
        let cs: Vec<Subset> = self.atoms.iter().map(|&a| self.close(a)).collect();
        cs.iter().all(|&x| cs.iter().all(|&y| x.meets(y)))
    }

    pub fn to_json(&self) -> FieldJson {
        FieldJson {
            carrier: self.n,
            members: self.members.iter().map(|m| m.0).collect(),
            closure: self.members.iter().map(|&m| [m.0, self.close(m).0]).collect(),
        }
    }

    /// Rebuilds a field from a dump; off the members the closure is extended
    /// by `c(A) = ⋂{c(M) : A ⊆ M member}`.
    pub fn from_json(j: &FieldJson) -> Result<SetField, AlgebraError> {
        let map: BTreeMap<u64, u64> = j.closure.iter().map(|p| (p[0], p[1])).collect();
        let members: Vec<Subset> = j.members.iter().map(|&m| Subset(m)).collect();
        for m in &members {
            if !map.contains_key(&m.0) {
                return Err(AlgebraError::NotAField(format!("no closure value for {m}")));
            }
        }
        let full = Subset::full(j.carrier);
        let c = Closure::from_fn(j.carrier, |a| {
            members
                .iter()
                .filter(|m| a.is_subset(**m))
                .fold(full, |acc, m| acc & Subset(map[&m.0]))
        })?;
        SetField::new(j.carrier, members, c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub carrier: usize,
    pub members: Vec<u64>,
    pub closure: Vec<[u64; 2]>,
}

/// Smallest field over `0..n` containing `generators` and closed under `closure`.
pub fn field_generate(n: usize, closure: Closure, generators: &[Subset]) -> Result<SetField, AlgebraError> {
    if n > MAX_CARRIER {
        return Err(AlgebraError::TooLarge(n));
    }
    closure.check_axioms(n)?;
    let full = Subset::full(n);
    let mut atoms = if n == 0 { vec![] } else { vec![full] };
    for &g in generators {
        refine(&mut atoms, g & full);
    }
    loop {
        let mut changed = false;
        for a in atoms.clone() {
            changed |= refine(&mut atoms, closure.apply(a));
        }
        if !changed {
            break;
        }
        if atoms.len() > MAX_ATOMS {
            return Err(AlgebraError::TooManyAtoms(atoms.len()));
        }
    }
    let atoms = sorted_atoms(atoms);
    let members = unions_of(&atoms)?;
    Ok(SetField { n, members, atoms, closure })
}

/// Letter assignment into a field.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation {
    pub assignment: BTreeMap<String, Subset>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, letter: &str, value: Subset) -> Self {
        self.assignment.insert(letter.to_string(), value);
        self
    }

    pub fn get(&self, letter: &str) -> Option<Subset> {
        self.assignment.get(letter).copied()
    }

    pub fn check_in(&self, field: &SetField) -> Result<(), AlgebraError> {
        for (p, &v) in &self.assignment {
            if !field.contains(v) {
                return Err(AlgebraError::NotMember { letter: p.clone(), value: v });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Var(usize),
    Top,
    Bot,
    Not,
    And,
    Or,
    Imp,
    Iff,
    Dia,
    Box,
}

/// A formula flattened to postfix over letter slots, for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Program {
    ops: Vec<Op>,
    letters: Vec<String>,
}

/// How implication and negation are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    /// Boolean connectives; `◊` as closure, `□` as interior.
    Modal,
    /// `a → b = interior(−a ∪ b)` over open elements.
    Heyting,
}

impl Program {
    pub fn compile(phi: &Formula) -> Program {
        let letters = phi.letters();
        let mut ops = Vec::with_capacity(phi.size());
        fn go(f: &Formula, letters: &[String], ops: &mut Vec<Op>) {
            for c in f.children() {
                go(c, letters, ops);
            }
            ops.push(match f {
                Formula::Letter(p) => Op::Var(letters.iter().position(|q| q == p).unwrap()),
                Formula::Top => Op::Top,
                Formula::Bottom => Op::Bot,
                Formula::Not(_) => Op::Not,
                Formula::And(..) => Op::And,
                Formula::Or(..) => Op::Or,
                Formula::Implies(..) => Op::Imp,
                Formula::Iff(..) => Op::Iff,
                Formula::Diamond(_) => Op::Dia,
                Formula::Box(_) => Op::Box,
            });
        }
        go(phi, &letters, &mut ops);
        Program { ops, letters }
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn run(&self, vals: &[Subset], n: usize, closure: &Closure, sem: Semantics, stack: &mut Vec<Subset>) -> Subset {
        let full = Subset::full(n);
        let interior = |a: Subset| closure.apply(a.complement(n)).complement(n);
        let imp = |a: Subset, b: Subset| match sem {
            Semantics::Modal => a.complement(n) | b,
            Semantics::Heyting => interior(a.complement(n) | b),
        };
        stack.clear();
        for op in &self.ops {
            let v = match *op {
                Op::Var(i) => vals[i],
                Op::Top => full,
                Op::Bot => Subset::EMPTY,
                Op::Not => {
                    let a = stack.pop().unwrap();
                    imp(a, Subset::EMPTY)
                }
                Op::Dia => closure.apply(stack.pop().unwrap()),
                Op::Box => interior(stack.pop().unwrap()),
                _ => {
                    let b = stack.pop().unwrap();
                    let a = stack.pop().unwrap();
                    match *op {
                        Op::And => a & b,
                        Op::Or => a | b,
                        Op::Imp => imp(a, b),
                        _ => imp(a, b) & imp(b, a),
                    }
                }
            };
            stack.push(v);
        }
        stack.pop().unwrap()
    }

    fn slots(&self, val: &Valuation) -> Result<Vec<Subset>, AlgebraError> {
        self.letters.iter().map(|p| val.get(p).ok_or_else(|| AlgebraError::Unassigned(p.clone()))).collect()
    }
}

/// Value of `phi` in the closure algebra of `field` under `val`.
pub fn evaluate(phi: &Formula, val: &Valuation, field: &SetField) -> Result<Subset, AlgebraError> {
    let prog = Program::compile(phi);
    let slots = prog.slots(val)?;
    Ok(prog.run(&slots, field.n, &field.closure, Semantics::Modal, &mut Vec::new()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Validity {
    Valid,
    Refuted { valuation: Valuation, world: usize },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

fn search(prog: &Program, domain: &[Subset], n: usize, closure: &Closure, sem: Semantics) -> Validity {
    let k = prog.letters.len();
    let full = Subset::full(n);
    let mut idx = vec![0usize; k];
    let mut vals = vec![Subset::EMPTY; k];
    let mut stack = Vec::with_capacity(prog.ops.len());
    loop {
        for i in 0..k {
            vals[i] = domain[idx[i]];
        }
        let v = prog.run(&vals, n, closure, sem, &mut stack);
        if v != full {
            let valuation = Valuation {
                assignment: prog.letters.iter().cloned().zip(vals.iter().copied()).collect(),
            };
            return Validity::Refuted { valuation, world: full.minus(v).first().unwrap() };
        }
        // odometer, last letter fastest
        let mut i = k;
        loop {
            if i == 0 {
                return Validity::Valid;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < domain.len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Exhaustive validity over all member tuples for the letters of `phi`.
pub fn validates(field: &SetField, phi: &Formula, cap: usize) -> Result<Validity, AlgebraError> {
    let prog = Program::compile(phi);
    if prog.letters.len() > cap {
        return Err(AlgebraError::CapExceeded { letters: prog.letters.len(), cap });
    }
    Ok(search(&prog, &field.members, field.n, &field.closure, Semantics::Modal))
}

/// Open elements of a closure algebra with relative pseudo-complement.
#[derive(Debug, Clone)]
pub struct HeytingAlgebra {
    n: usize,
    opens: Vec<Subset>,
    closure: Closure,
}

impl HeytingAlgebra {
    pub fn elements(&self) -> &[Subset] {
        &self.opens
    }
    pub fn top(&self) -> Subset {
        Subset::full(self.n)
    }
    pub fn implies(&self, a: Subset, b: Subset) -> Subset {
        self.closure.apply(a.minus(b)).complement(self.n)
    }
    /// Elements with a complement in the algebra.
    pub fn complemented(&self) -> Vec<Subset> {
        self.opens.iter().copied().filter(|&a| self.opens.contains(&a.complement(self.n))).collect()
    }
}

/// `H(A) = {a : a = □a}`; residuation is checked over all triples.
pub fn open_elements(field: &SetField) -> Result<HeytingAlgebra, AlgebraError> {
    let opens: Vec<Subset> = field.members.iter().copied().filter(|&a| field.is_open(a)).collect();
    let h = HeytingAlgebra { n: field.n, opens, closure: field.closure.clone() };
    for &a in &h.opens {
        for &b in &h.opens {
            let ab = h.implies(a, b);
            if h.opens.binary_search(&ab).is_err() || h.opens.binary_search(&(a & b)).is_err() || h.opens.binary_search(&(a | b)).is_err() {
                return Err(AlgebraError::NotClosed { set: a | b, image: ab });
            }
            for &x in &h.opens {
                if (a & x).is_subset(b) != x.is_subset(ab) {
                    return Err(AlgebraError::Residuation { a, b, x });
                }
            }
        }
    }
    Ok(h)
}

/// Validity of an intuitionistic formula over tuples of open elements.
pub fn heyting_validates(h: &HeytingAlgebra, phi: &Formula, cap: usize) -> Result<Validity, AlgebraError> {
    if phi.is_modal() {
        return Err(AlgebraError::ModalFormula(phi.to_string()));
    }
    let prog = Program::compile(phi);
    if prog.letters.len() > cap {
        return Err(AlgebraError::CapExceeded { letters: prog.letters.len(), cap });
    }
    Ok(search(&prog, &h.opens, h.n, &h.closure, Semantics::Heyting))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::frames::{make_chain, make_cluster, make_fork, FiniteFrame};

    fn s(xs: &[usize]) -> Subset {
        Subset::from_iter(xs.iter().copied())
    }

    fn sierpinski() -> Closure {
        // opens ∅, {1}, X: c{1} = X, c{0} = {0}
        Closure::Rows(vec![s(&[0, 1]), s(&[1])])
    }

    fn frame_field(f: &FiniteFrame) -> SetField {
        SetField::powerset(f.size(), Closure::Rows(f.rows().to_vec())).unwrap()
    }

    #[test]
    fn generation_examples() {
        let f = field_generate(3, Closure::discrete(3), &[]).unwrap();
        assert_eq!(f.members(), &[Subset::EMPTY, Subset::full(3)]);
        let f = field_generate(2, Closure::discrete(2), &[s(&[0])]).unwrap();
        assert_eq!(f.members().len(), 4);
        let f = field_generate(2, sierpinski(), &[s(&[1])]).unwrap();
        assert_eq!(f.members(), &[s(&[]), s(&[0]), s(&[1]), s(&[0, 1])]);
        let bad = Closure::Table(vec![s(&[]), s(&[0]), s(&[1]), s(&[1])]);
        assert!(matches!(field_generate(2, bad, &[]), Err(AlgebraError::ClosureAxiom { .. })));
        let nontrans = Closure::Rows(vec![s(&[0, 1]), s(&[1, 2]), s(&[2])]);
        assert!(matches!(nontrans.check_axioms(3), Err(AlgebraError::ClosureAxiom { axiom: "ccA = cA", .. })));
    }

    #[test]
    fn explicit_field_validation() {
        assert!(SetField::new(2, vec![s(&[]), s(&[0]), s(&[0, 1])], Closure::discrete(2)).is_err());
        let e = SetField::new(2, vec![s(&[]), s(&[1]), s(&[0]), s(&[0, 1])], sierpinski());
        assert!(e.is_ok());
        // {1} only with its complement is not closed under Sierpiński closure? c{1} = X: fine.
        let tbl = sierpinski().tabulate(2).unwrap();
        assert_eq!(tbl.apply(s(&[1])), s(&[0, 1]));
    }

    #[test]
    fn evaluation_examples() {
        let f = frame_field(&make_fork(1).unwrap());
        for &a in f.members() {
            let v = Valuation::new().with("p", a);
            assert_eq!(evaluate(&parse("[]p -> p").unwrap(), &v, &f).unwrap(), f.carrier());
        }
        assert_eq!(evaluate(&parse("<>F").unwrap(), &Valuation::new(), &f).unwrap(), Subset::EMPTY);
        let v = Valuation::new().with("p", s(&[1]));
        let s42 = parse("<>[]p -> []<>p").unwrap();
        assert_eq!(evaluate(&s42, &v, &f).unwrap(), s(&[1, 2]));
        let sier = SetField::powerset(2, sierpinski()).unwrap();
        assert_eq!(evaluate(&s42, &v, &sier).unwrap(), sier.carrier());
        assert_eq!(evaluate(&s42, &Valuation::new(), &f), Err(AlgebraError::Unassigned("p".into())));
    }

    #[test]
    fn validity_examples() {
        let sier = SetField::powerset(2, sierpinski()).unwrap();
        assert!(validates(&sier, &parse("<><>p -> <>p").unwrap(), 4).unwrap().is_valid());
        let f = frame_field(&make_fork(1).unwrap());
        match validates(&f, &parse("<>[]p -> []<>p").unwrap(), 4).unwrap() {
            Validity::Refuted { valuation, world } => {
                assert_eq!(valuation.get("p"), Some(s(&[1])));
                assert_eq!(world, 0);
            }
            v => panic!("{v:?}"),
        }
        let c2 = frame_field(&make_cluster(2).unwrap());
        assert!(!validates(&c2, &parse("[]([](p -> []p) -> p) -> p").unwrap(), 4).unwrap().is_valid());
        let five = parse("p & q & r & s & t").unwrap();
        assert_eq!(validates(&c2, &five, 4), Err(AlgebraError::CapExceeded { letters: 5, cap: 4 }));
    }

    #[test]
    fn connectedness_examples() {
        let f = frame_field(&make_fork(1).unwrap());
        assert!(f.is_well_connected() && f.is_connected());
        // two roots 0,1 below a shared top cluster {2}
        let v = FiniteFrame::new(3, &[(0, 0), (1, 1), (2, 2), (0, 2), (1, 2)]).unwrap();
        let vf = frame_field(&v);
        assert!(vf.is_connected() && !vf.is_well_connected());
        let d = SetField::powerset(2, Closure::discrete(2)).unwrap();
        assert!(!d.is_connected());
    }

    #[test]
    fn heyting_examples() {
        // 2-fork poset: root 0 below maximal 1, 2
        let p = FiniteFrame::new(3, &[(0, 0), (1, 1), (2, 2), (0, 1), (0, 2)]).unwrap();
        let h = open_elements(&frame_field(&p)).unwrap();
        let lem = parse("~p | ~~p").unwrap();
        match heyting_validates(&h, &lem, 4).unwrap() {
            Validity::Refuted { valuation, .. } => assert!(valuation.get("p") == Some(s(&[1])) || valuation.get("p") == Some(s(&[2]))),
            v => panic!("{v:?}"),
        }
        let v = Valuation::new().with("p", s(&[1]));
        let prog = Program::compile(&parse("~p").unwrap());
        let np = prog.run(&[v.get("p").unwrap()], 3, &Closure::Rows(p.rows().to_vec()), Semantics::Heyting, &mut vec![]);
        assert_eq!(np, s(&[2]));
        assert!(heyting_validates(&h, &parse("p -> p").unwrap(), 4).unwrap().is_valid());
        let ch = open_elements(&frame_field(&make_chain(3).unwrap())).unwrap();
        assert_eq!(ch.elements().len(), 4);
        assert!(heyting_validates(&ch, &lem, 4).unwrap().is_valid());
        assert_eq!(ch.complemented(), vec![Subset::EMPTY, Subset::full(3)]);
        assert!(heyting_validates(&ch, &parse("<>p").unwrap(), 4).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = frame_field(&make_chain(3).unwrap());
        let g = SetField::from_json(&f.to_json()).unwrap();
        assert_eq!(f, g);
    }
}
