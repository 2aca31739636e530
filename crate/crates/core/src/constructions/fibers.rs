//! Collapsing the fibers of a tree labeling over a maximal cluster.
//!
//! The source is the truncated tree with its Scott-style topology: a tree
//! node's least neighborhood is its upset, and a limit proxy's is the upset of
//! its parent (it is not finitely reachable). Limit proxies take the label of
//! their parent.

use super::tcomb::LabeledMap;
use super::ConstructionError;
use crate::genspace::{check_interior_map, quotient_structure, Base, FiniteTopology, GeneralStructure, InteriorCheck};
use crate::subset::Subset;

#[derive(Debug, Clone, PartialEq)]
pub struct FiberQuotient {
    pub source: GeneralStructure,
    pub structure: GeneralStructure,
    pub rho: Vec<usize>,
    /// Label used for each node (limit proxies inherit their parent's).
    pub fiber_labels: Vec<usize>,
    pub interior: InteriorCheck,
    /// Every pulled-back upset of the target is a union of `ρ`-classes.
    pub saturated: bool,
    /// Pulled-back upsets land in the quotient field, injectively.
    pub embeds: bool,
}

/// Scott-style neighborhoods of a truncated tree (at most 64 nodes).
pub fn scott_topology(m: &LabeledMap) -> Result<FiniteTopology, ConstructionError> {
    let t = &m.tree;
    if t.len() > crate::subset::MAX_CARRIER {
        return Err(crate::frames::FrameError::TooLarge(t.len()).into());
    }
    let nbhd = (0..t.len())
        .map(|a| {
            let base = if t.is_limit(a) { t.parent(a).unwrap_or(a) } else { a };
            Subset::from_iter(t.upset(base))
        })
        .collect();
    Ok(FiniteTopology::from_neighborhoods(nbhd)?)
}

pub fn quotient_by_cluster_fibers(m: &LabeledMap, c: Subset) -> Result<FiberQuotient, ConstructionError> {
    let f = &m.target;
    let parts = f.clusters()?;
    let is_max = parts.clusters.iter().zip(&parts.maximal).any(|(k, &mx)| *k == c && mx);
    if !is_max {
        return Err(ConstructionError::NotMaximalCluster(c));
    }
    let t = &m.tree;
    let x = scott_topology(m)?;
    let fiber_labels: Vec<usize> =
        (0..t.len()).map(|a| if t.is_limit(a) { m.labels[t.parent(a).unwrap_or(a)] } else { m.labels[a] }).collect();
    let fibers: Vec<Subset> =
        (0..f.size()).map(|w| Subset::from_iter((0..t.len()).filter(|&a| fiber_labels[a] == w))).collect();
    let source = GeneralStructure::generated(Base::Space(x), &fibers)?;
    // classes in order of least member
    let mut rho = vec![usize::MAX; t.len()];
    let mut next = 0;
    for a in 0..t.len() {
        if rho[a] != usize::MAX {
            continue;
        }
        let class = if c.contains(fiber_labels[a]) { fibers[fiber_labels[a]] } else { Subset::singleton(a) };
        for b in class.iter() {
            rho[b] = next;
        }
        next += 1;
    }
    let structure = quotient_structure(&source, &rho, false)?;
    let interior = check_interior_map(&rho, &source, &structure);
    let mut saturated = true;
    let mut images = Vec::new();
    let mut embeds = true;
    for u in Subset::all(f.size().min(16)).filter(|&u| f.is_upset(u)) {
        let pulled = u.preimage(&fiber_labels);
        let image = pulled.image(&rho);
        saturated &= image.preimage(&rho) == pulled;
        embeds &= structure.field().contains(image);
        images.push(image);
    }
    let distinct = images.len();
    images.sort();
    images.dedup();
    embeds &= images.len() == distinct;
    Ok(FiberQuotient { source, structure, rho, fiber_labels, interior, saturated, embeds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::tcomb::{tcomb_labeling, EnumerationFamily};
    use crate::frames::{make_chain, make_cluster, make_fork, FiniteFrame};

    fn comb(f: &FiniteFrame, d: usize) -> LabeledMap {
        tcomb_labeling(f, &EnumerationFamily::cyclic(f), d).unwrap()
    }

    #[test]
    fn single_point_target() {
        let c1 = make_cluster(1).unwrap();
        let q = quotient_by_cluster_fibers(&comb(&c1, 4), Subset::singleton(0)).unwrap();
        assert_eq!(q.structure.size(), 1);
        assert_eq!(q.interior, InteriorCheck::Pass);
    }

    #[test]
    fn fork_fiber_over_m() {
        let f = make_fork(1).unwrap();
        let m = comb(&f, 5);
        let q = quotient_by_cluster_fibers(&m, Subset::singleton(1)).unwrap();
        assert_eq!(q.interior, InteriorCheck::Pass);
        let fiber = Subset::from_iter((0..m.tree.len()).filter(|&a| q.fiber_labels[a] == 1));
        assert_eq!(q.structure.size(), m.tree.len() - fiber.len() + 1);
        assert!(q.saturated && q.embeds);
    }

    #[test]
    fn chain_upsets_saturate() {
        let ch = make_chain(2).unwrap();
        let q = quotient_by_cluster_fibers(&comb(&ch, 5), Subset::singleton(1)).unwrap();
        assert!(q.saturated && q.embeds);
        assert_eq!(q.interior, InteriorCheck::Pass);
    }

    #[test]
    fn larger_cluster_fails_at_the_frontier() {
        let c2 = make_cluster(2).unwrap();
        let q = quotient_by_cluster_fibers(&comb(&c2, 4), Subset::full(2)).unwrap();
        assert!(q.saturated);
        assert!(matches!(q.interior, InteriorCheck::NotOpen { .. }));
    }

    #[test]
    fn rejects_non_maximal() {
        let ch = make_chain(2).unwrap();
        let e = quotient_by_cluster_fibers(&comb(&ch, 3), Subset::singleton(0)).unwrap_err();
        assert_eq!(e, ConstructionError::NotMaximalCluster(Subset::singleton(0)));
    }
}
