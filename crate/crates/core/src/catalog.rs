//! Seeded random structures and exhaustive small catalogs.

use crate::algebra::{SetField, Valuation};
use crate::formula::Formula;
use crate::frames::FiniteFrame;
use crate::genspace::{alexandroff_topology, Base, FiniteTopology, GeneralStructure, GluingSpec};
use crate::subset::Subset;
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub type CatalogRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CatalogRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random preorder: each off-diagonal pair with probability `density`, then
/// closed under reflexivity and transitivity.
pub fn random_preorder(rng: &mut CatalogRng, n: usize, density: f64) -> FiniteFrame {
    let rows = (0..n)
        .map(|i| Subset::from_iter((0..n).filter(|&j| i == j || rng.gen_bool(density))))
        .collect();
    FiniteFrame::from_rows(rows).expect("carrier within bounds").reflexive_transitive_closure()
}

/// Every finite topology is the Alexandroff topology of its specialization.
pub fn random_topology(rng: &mut CatalogRng, n: usize) -> FiniteTopology {
    let density = rng.gen_range(0.1..0.6);
    alexandroff_topology(&random_preorder(rng, n, density)).expect("preorders are S4")
}

/// A general space whose field contains every least neighborhood, separates
/// points, and carries a random extra generator.
pub fn random_tight_reduced_space(rng: &mut CatalogRng, n: usize) -> GeneralStructure {
    let x = random_topology(rng, n);
    let mut gens: Vec<Subset> = x.neighborhoods().to_vec();
    for p in 0..n {
        for q in p + 1..n {
            if x.neighborhood(p) == x.neighborhood(q) {
                gens.push(Subset::singleton(p));
            }
        }
    }
    gens.push(Subset::from_iter((0..n).filter(|_| rng.gen_bool(0.5))));
    let s = GeneralStructure::generated(Base::Space(x.clone()), &gens).expect("small carrier");
    if s.check_descriptive().is_descriptive() {
        s
    } else {
        GeneralStructure::full_space(x).expect("small carrier")
    }
}

/// Parts that each contain the shared frame as an upset at random positions.
pub fn random_gluing_spec(rng: &mut CatalogRng, max_part: usize) -> GluingSpec {
    let ny = rng.gen_range(1..=max_part.clamp(1, 3));
    let y = random_preorder(rng, ny, 0.4);
    let nparts = rng.gen_range(2..=3);
    let mut parts = Vec::new();
    let mut embeddings = Vec::new();
    for _ in 0..nparts {
        let extra = rng.gen_range(0..=max_part - ny);
        let n = ny + extra;
        let mut slots: Vec<usize> = (0..n).collect();
        slots.shuffle(rng);
        let (ypos, ppos) = slots.split_at(ny);
        let mut rows = vec![Subset::EMPTY; n];
        for (i, &a) in ypos.iter().enumerate() {
            rows[a] = Subset::from_iter(y.successors(i).iter().map(|j| ypos[j]));
        }
        for &a in ppos {
            rows[a] = Subset::from_iter(slots.iter().copied().filter(|&b| a == b || rng.gen_bool(0.3)));
        }
        let f = FiniteFrame::from_rows(rows).expect("bounded").reflexive_transitive_closure();
        parts.push(GeneralStructure::full_frame(f).expect("bounded"));
        embeddings.push(ypos.to_vec());
    }
    GluingSpec { parts, shared: GeneralStructure::full_frame(y).expect("bounded"), embeddings }
}

/// Random modal formula with about `size` nodes over `letters`.
pub fn random_formula(rng: &mut CatalogRng, size: usize, letters: &[&str], modal: bool) -> Formula {
    if size <= 1 {
        return match rng.gen_range(0..letters.len() + 2) {
            k if k < letters.len() => Formula::letter(letters[k]),
            k if k == letters.len() => Formula::Bottom,
            _ => Formula::Top,
        };
    }
    let unary = if modal { 3 } else { 1 };
    let choice = rng.gen_range(0..unary + 4);
    if choice < unary || size == 2 {
        let a = random_formula(rng, size - 1, letters, modal);
        return match choice.min(unary - 1) {
            0 => Formula::not(a),
            1 => Formula::boxed(a),
            _ => Formula::diamond(a),
        };
    }
    let left = rng.gen_range(1..size - 1);
    let a = random_formula(rng, left, letters, modal);
    let b = random_formula(rng, size - 1 - left, letters, modal);
    match choice - unary {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::implies(a, b),
        _ => Formula::iff(a, b),
    }
}

pub fn random_valuation(rng: &mut CatalogRng, field: &SetField, letters: &[String]) -> Valuation {
    letters.iter().fold(Valuation::new(), |v, p| v.with(p, *field.members().choose(rng).expect("fields are nonempty")))
}

/// All intuitionistic formulas of exactly `size` nodes over `letters` and `F`,
/// built from `~ & | ->`.
pub fn intuitionistic_formulas(size: usize, letters: &[&str]) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![vec![]];
    for s in 1..=size {
        let mut out = Vec::new();
        if s == 1 {
            out.extend(letters.iter().map(|p| Formula::letter(p)));
            out.push(Formula::Bottom);
        } else {
            out.extend(by_size[s - 1].iter().cloned().map(Formula::not));
            for l in 1..s - 1 {
                for a in &by_size[l] {
                    for b in &by_size[s - 1 - l] {
                        out.push(Formula::and(a.clone(), b.clone()));
                        out.push(Formula::or(a.clone(), b.clone()));
                        out.push(Formula::implies(a.clone(), b.clone()));
                    }
                }
            }
        }
        by_size.push(out);
    }
    by_size.swap_remove(size)
}

fn encode(f: &FiniteFrame, perm: &[usize]) -> u64 {
    let n = f.size();
    let mut code = 0u64;
    for i in 0..n {
        for j in 0..n {
            if f.related(perm[i], perm[j]) {
                code |= 1 << (i * n + j);
            }
        }
    }
    code
}

/// Least relation code over all relabelings (`n ≤ 8`).
pub fn canonical_code(f: &FiniteFrame) -> u64 {
    (0..f.size()).permutations(f.size()).map(|p| encode(f, &p)).min().unwrap_or(0)
}

/// All preorders on `0..n` (`n ≤ 5`).
pub fn labeled_preorders(n: usize) -> Vec<FiniteFrame> {
    let off: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for bits in 0u64..1 << off.len() {
        let mut rows: Vec<Subset> = (0..n).map(Subset::singleton).collect();
        for (k, &(i, j)) in off.iter().enumerate() {
            if bits >> k & 1 == 1 {
                rows[i] = rows[i].with(j);
            }
        }
        let f = FiniteFrame::from_rows(rows).expect("bounded");
        if f.is_s4() {
            out.push(f);
        }
    }
    out
}

/// One representative per isomorphism class.
pub fn up_to_iso(frames: Vec<FiniteFrame>) -> Vec<FiniteFrame> {
    let mut seen = BTreeSet::new();
    frames.into_iter().filter(|f| seen.insert((f.size(), canonical_code(f)))).collect()
}

/// Preorders with `1 ≤ |W| ≤ max`, filtered by `keep`.
pub fn preorder_catalog(max: usize, keep: impl Fn(&FiniteFrame) -> bool) -> Vec<FiniteFrame> {
    (1..=max).flat_map(labeled_preorders).filter(|f| keep(f)).collect()
}

pub fn rooted_frames(max: usize) -> Vec<FiniteFrame> {
    preorder_catalog(max, FiniteFrame::is_rooted)
}

pub fn is_antisymmetric(f: &FiniteFrame) -> bool {
    (0..f.size()).all(|i| (0..f.size()).all(|j| i == j || !(f.related(i, j) && f.related(j, i))))
}

/// Partial orders up to isomorphism.
pub fn posets(max: usize) -> Vec<FiniteFrame> {
    up_to_iso(preorder_catalog(max, is_antisymmetric))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_counts() {
        let counts: Vec<usize> = (1..=4).map(|n| labeled_preorders(n).len()).collect();
        assert_eq!(counts, vec![1, 4, 29, 355]);
        assert_eq!(rooted_frames(4).len(), 165);
        assert_eq!(up_to_iso(rooted_frames(4)).len(), 22);
        assert_eq!(posets(4).len(), 1 + 2 + 5 + 16);
    }

    #[test]
    fn formula_counts() {
        let sizes: Vec<usize> = (1..=5).map(|s| intuitionistic_formulas(s, &["p", "q"]).len()).collect();
        assert_eq!(sizes, vec![3, 3, 30, 84, 651]);
    }

    #[test]
    fn gluing_specs_validate() {
        let mut r = rng(7);
        for _ in 0..20 {
            random_gluing_spec(&mut r, 5).validate().unwrap();
        }
    }

    #[test]
    fn generated_spaces_are_descriptive() {
        let mut r = rng(1);
        for n in 1..=6 {
            assert!(random_tight_reduced_space(&mut r, n).check_descriptive().is_descriptive());
        }
    }
}
