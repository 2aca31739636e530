//! Modal and intuitionistic propositional formulas.
//!
//! Concrete syntax, lowest to highest precedence: `<->`, `->` (right
//! associative), `|`, `&`, then the prefix operators `~`, `[]`, `<>`.
//! Atoms are letters `[a-z][a-z0-9_]*`, `T`, `F`, and parenthesised formulas.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Letter(String),
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Diamond(Box<Formula>),
    Box(Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: found {found}, expected one of {}", expected.join(" "))]
pub struct ParseError {
    pub offset: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("modal operator in intuitionistic input: {0}")]
    ModalInput(String),
}

impl Formula {
    pub fn letter(name: &str) -> Formula {
        Formula::Letter(name.to_string())
    }
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }
    pub fn diamond(a: Formula) -> Formula {
        Formula::Diamond(Box::new(a))
    }
    pub fn boxed(a: Formula) -> Formula {
        Formula::Box(Box::new(a))
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Letter(_) | Formula::Top | Formula::Bottom => vec![],
            Formula::Not(a) | Formula::Diamond(a) | Formula::Box(a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                vec![a, b]
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Letters in order of first occurrence (left to right).
    pub fn letters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut Vec<String>) {
        if let Formula::Letter(p) = self {
            if !out.contains(p) {
                out.push(p.clone());
            }
        }
        for c in self.children() {
            c.collect_letters(out);
        }
    }

    pub fn is_modal(&self) -> bool {
        matches!(self, Formula::Diamond(_) | Formula::Box(_)) || self.children().iter().any(|c| c.is_modal())
    }

    /// Rewrites `~a` as `a -> F` and `a <-> b` as `(a -> b) & (b -> a)`.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Letter(_) | Formula::Top | Formula::Bottom => self.clone(),
            Formula::Not(a) => Formula::implies(a.desugar(), Formula::Bottom),
            Formula::Iff(a, b) => {
                let (a, b) = (a.desugar(), b.desugar());
                Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
            }
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Or(a, b) => Formula::or(a.desugar(), b.desugar()),
            Formula::Implies(a, b) => Formula::implies(a.desugar(), b.desugar()),
            Formula::Diamond(a) => Formula::diamond(a.desugar()),
            Formula::Box(a) => Formula::boxed(a.desugar()),
        }
    }

    fn map_children(&self, f: &mut impl FnMut(&Formula) -> Formula) -> Formula {
        match self {
            Formula::Letter(_) | Formula::Top | Formula::Bottom => self.clone(),
            Formula::Not(a) => Formula::not(f(a)),
            Formula::Diamond(a) => Formula::diamond(f(a)),
            Formula::Box(a) => Formula::boxed(f(a)),
            Formula::And(a, b) => Formula::and(f(a), f(b)),
            Formula::Or(a, b) => Formula::or(f(a), f(b)),
            Formula::Implies(a, b) => Formula::implies(f(a), f(b)),
            Formula::Iff(a, b) => Formula::iff(f(a), f(b)),
        }
    }
}

/// All subformulas including `phi`, deduplicated, in post-order.
pub fn subformulas(phi: &Formula) -> Vec<Formula> {
    fn go(f: &Formula, seen: &mut HashSet<Formula>, out: &mut Vec<Formula>) {
        for c in f.children() {
            go(c, seen, out);
        }
        if seen.insert(f.clone()) {
            out.push(f.clone());
        }
    }
    let mut out = Vec::new();
    go(phi, &mut HashSet::new(), &mut out);
    out
}

/// Simultaneous substitution of letters.
pub fn substitute(phi: &Formula, map: &BTreeMap<String, Formula>) -> Formula {
    match phi {
        Formula::Letter(p) => map.get(p).cloned().unwrap_or_else(|| phi.clone()),
        _ => phi.map_children(&mut |c| substitute(c, map)),
    }
}

/// Records the renaming `(letter, formula index) ↦ fresh letter`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LetterMap {
    pub entries: BTreeMap<(String, usize), String>,
}

impl LetterMap {
    /// Substitution taking the `index`-th renamed formula back to its source.
    pub fn inverse(&self, index: usize) -> BTreeMap<String, Formula> {
        self.entries
            .iter()
            .filter(|((_, i), _)| *i == index)
            .map(|((p, _), x)| (x.clone(), Formula::Letter(p.clone())))
            .collect()
    }
}

/// Renames letters so distinct output formulas share none; fresh names are
/// `x0, x1, …`, skipping any name already used by the inputs.
pub fn revariablize(formulas: &[Formula]) -> (Vec<Formula>, LetterMap) {
    let used: BTreeSet<String> = formulas.iter().flat_map(|f| f.letters()).collect();
    let mut counter = 0usize;
    let mut fresh = || loop {
        let name = format!("x{counter}");
        counter += 1;
        if !used.contains(&name) {
            return name;
        }
    };
    let mut map = LetterMap::default();
    let mut out = Vec::with_capacity(formulas.len());
    for (i, f) in formulas.iter().enumerate() {
        let mut sub = BTreeMap::new();
        for p in f.letters() {
            let x = fresh();
            map.entries.insert((p.clone(), i), x.clone());
            sub.insert(p, Formula::Letter(x));
        }
        out.push(substitute(f, &sub));
    }
    (out, map)
}

/// Gödel translation: desugar, then prefix `[]` to every subformula.
pub fn godel_translate(phi: &Formula) -> Result<Formula, FormulaError> {
    if phi.is_modal() {
        return Err(FormulaError::ModalInput(phi.to_string()));
    }
    fn go(f: &Formula) -> Formula {
        Formula::boxed(f.map_children(&mut go))
    }
    Ok(go(&phi.desugar()))
}

// ---------------------------------------------------------------- parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Letter(String),
    Top,
    Bottom,
    LParen,
    RParen,
    Not,
    BoxOp,
    DiamondOp,
    And,
    Or,
    Implies,
    Iff,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Letter(p) => format!("letter '{p}'"),
            Tok::Top => "'T'".into(),
            Tok::Bottom => "'F'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Not => "'~'".into(),
            Tok::BoxOp => "'[]'".into(),
            Tok::DiamondOp => "'<>'".into(),
            Tok::And => "'&'".into(),
            Tok::Or => "'|'".into(),
            Tok::Implies => "'->'".into(),
            Tok::Iff => "'<->'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

const OPERAND: &[&str] = &["letter", "T", "F", "(", "~", "[]", "<>"];
const AFTER_OPERAND: &[&str] = &["&", "|", "->", "<->", ")", "end of input"];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = text.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let err = |i: usize, expected: Vec<&'static str>| ParseError {
        offset: i,
        found: text[i..].chars().next().map_or("end of input".into(), |c| format!("'{c}'")),
        expected,
    };
    while i < b.len() {
        let c = b[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'a'..=b'z' => {
                while i < b.len() && matches!(b[i], b'a'..=b'z' | b'0'..=b'9' | b'_') {
                    i += 1;
                }
                out.push((start, Tok::Letter(text[start..i].to_string())));
                continue;
            }
            b'T' => Tok::Top,
            b'F' => Tok::Bottom,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'~' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'[' if b.get(i + 1) == Some(&b']') => {
                i += 1;
                Tok::BoxOp
            }
            b'<' if b.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::DiamondOp
            }
            b'<' if b.get(i + 1) == Some(&b'-') && b.get(i + 2) == Some(&b'>') => {
                i += 2;
                Tok::Iff
            }
            b'-' if b.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            b'[' => return Err(err(i + 1, vec!["]"])),
            b'-' => return Err(err(i + 1, vec![">"])),
            b'<' => return Err(err(i + 1, vec![">", "->"])),
            _ => {
                let mut exp = OPERAND.to_vec();
                exp.extend_from_slice(AFTER_OPERAND);
                return Err(err(i, exp));
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

fn infix(t: &Tok) -> Option<(u8, bool)> {
    // (precedence, right associative)
    match t {
        Tok::Iff => Some((1, false)),
        Tok::Implies => Some((2, true)),
        Tok::Or => Some((3, false)),
        Tok::And => Some((4, false)),
        _ => None,
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn fail(&self, expected: &[&'static str]) -> ParseError {
        let (offset, tok) = &self.toks[self.pos];
        ParseError { offset: *offset, found: tok.describe(), expected: expected.to_vec() }
    }

    fn expr(&mut self, min_prec: u8) -> Result<Formula, ParseError> {
        let mut lhs = self.prefix()?;
        while let Some((prec, right)) = infix(self.peek()) {
            if prec < min_prec {
                break;
            }
            let op = self.peek().clone();
            self.pos += 1;
            let rhs = self.expr(if right { prec } else { prec + 1 })?;
            lhs = match op {
                Tok::Iff => Formula::iff(lhs, rhs),
                Tok::Implies => Formula::implies(lhs, rhs),
                Tok::Or => Formula::or(lhs, rhs),
                _ => Formula::and(lhs, rhs),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Formula, ParseError> {
        let tok = self.peek().clone();
        match tok {
            Tok::Not | Tok::BoxOp | Tok::DiamondOp => {
                self.pos += 1;
                let a = self.prefix()?;
                Ok(match tok {
                    Tok::Not => Formula::not(a),
                    Tok::BoxOp => Formula::boxed(a),
                    _ => Formula::diamond(a),
                })
            }
            Tok::Letter(p) => {
                self.pos += 1;
                Ok(Formula::Letter(p))
            }
            Tok::Top => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Tok::Bottom => {
                self.pos += 1;
                Ok(Formula::Bottom)
            }
            Tok::LParen => {
                self.pos += 1;
                let a = self.expr(0)?;
                if *self.peek() != Tok::RParen {
                    return Err(self.fail(&["&", "|", "->", "<->", ")"]));
                }
                self.pos += 1;
                Ok(a)
            }
            _ => Err(self.fail(OPERAND)),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.expr(0)?;
    if *p.peek() != Tok::End {
        return Err(p.fail(AFTER_OPERAND));
    }
    Ok(f)
}

impl FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// ---------------------------------------------------------------- printing

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        _ => 5,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, a: &Formula, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({a})")
    } else {
        write!(f, "{a}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Letter(p) => write!(f, "{p}"),
            Formula::Top => write!(f, "T"),
            Formula::Bottom => write!(f, "F"),
            Formula::Not(a) | Formula::Diamond(a) | Formula::Box(a) => {
                let op = match self {
                    Formula::Not(_) => "~",
                    Formula::Diamond(_) => "<>",
                    _ => "[]",
                };
                write!(f, "{op}")?;
                write_operand(f, a, prec(a) < 5)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                let p = prec(self);
                let right_assoc = matches!(self, Formula::Implies(..));
                let op = match self {
                    Formula::And(..) => "&",
                    Formula::Or(..) => "|",
                    Formula::Implies(..) => "->",
                    _ => "<->",
                };
                write_operand(f, a, prec(a) < p || (prec(a) == p && right_assoc))?;
                write!(f, " {op} ")?;
                write_operand(f, b, prec(b) < p || (prec(b) == p && !right_assoc))
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn parses_grammar_examples() {
        let p = Formula::letter("p");
        assert_eq!(f("[]p -> p"), Formula::implies(Formula::boxed(p.clone()), p.clone()));
        let q = Formula::letter("q");
        let k = Formula::iff(
            Formula::diamond(Formula::or(p.clone(), q.clone())),
            Formula::or(Formula::diamond(p.clone()), Formula::diamond(q.clone())),
        );
        assert_eq!(f("<> (p | q) <-> (<>p | <>q)"), k);
    }

    #[test]
    fn syntax_error_position() {
        let e = parse("p ->").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(e.expected.contains(&"letter"));
        assert_eq!(parse("p q").unwrap_err().offset, 2);
        assert_eq!(parse("(p").unwrap_err().offset, 2);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(f("p -> q -> r"), f("p -> (q -> r)"));
        assert_eq!(f("p | q & r"), f("p | (q & r)"));
        assert_eq!(f("p & q | r <-> s"), f("((p & q) | r) <-> s"));
        assert_eq!(f("~[]<>p"), Formula::not(Formula::boxed(Formula::diamond(Formula::letter("p")))));
        assert_eq!(f("(p -> q) -> r").to_string(), "(p -> q) -> r");
        assert_eq!(f("p | (q | r)").to_string(), "p | (q | r)");
        assert_eq!(f("[](p & T)").to_string(), "[](p & T)");
    }

    #[test]
    fn subformula_examples() {
        assert_eq!(subformulas(&f("[]p")), vec![f("p"), f("[]p")]);
        assert_eq!(subformulas(&f("p -> p")), vec![f("p"), f("p -> p")]);
        let s = subformulas(&f("<>[]p -> []<>p"));
        assert_eq!(s, vec![f("p"), f("[]p"), f("<>[]p"), f("<>p"), f("[]<>p"), f("<>[]p -> []<>p")]);
    }

    #[test]
    fn substitution_examples() {
        let m: BTreeMap<_, _> = [("p".to_string(), f("q & r"))].into();
        assert_eq!(substitute(&f("[]p -> p"), &m), f("[](q & r) -> q & r"));
        assert_eq!(substitute(&f("p"), &BTreeMap::new()), f("p"));
        let swap: BTreeMap<_, _> = [("p".to_string(), f("q")), ("q".to_string(), f("p"))].into();
        assert_eq!(substitute(&f("p | q"), &swap), f("q | p"));
    }

    #[test]
    fn revariablize_examples() {
        let (out, map) = revariablize(&[f("p"), f("p")]);
        assert_eq!(out, vec![f("x0"), f("x1")]);
        assert_eq!(map.entries[&("p".to_string(), 0)], "x0");
        assert_eq!(map.entries[&("p".to_string(), 1)], "x1");
        assert_eq!(revariablize(&[f("p & q")]).0, vec![f("x0 & x1")]);
        let src = [f("[]p -> p"), f("<>p")];
        let (out, map) = revariablize(&src);
        assert!(out[0].letters().iter().all(|x| !out[1].letters().contains(x)));
        for i in 0..2 {
            assert_eq!(substitute(&out[i], &map.inverse(i)), src[i]);
        }
        // collisions with existing names are skipped
        assert_eq!(revariablize(&[f("x0 & x2")]).0, vec![f("x1 & x3")]);
    }

    #[test]
    fn godel_examples() {
        assert_eq!(godel_translate(&f("p")).unwrap(), f("[]p"));
        assert_eq!(godel_translate(&f("p -> q")).unwrap(), f("[]([]p -> []q)"));
        assert_eq!(
            godel_translate(&f("~p | ~~p")).unwrap(),
            f("[]([]([]p -> []F) | []([]([]p -> []F) -> []F))")
        );
        assert!(godel_translate(&f("[]p")).is_err());
    }
}
