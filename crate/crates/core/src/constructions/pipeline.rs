//! Gluing refutation frames into one path-connected structure.
//!
//! Each `G_n` is glued to the fork `F_α` along its designated maximal cluster
//! (giving `H_n`), and the `H_n` are then glued at their fork-maximal points.

use super::cgfp::value;
use super::ConstructionError;
use crate::algebra::{Closure, Valuation};
use crate::formula::Formula;
use crate::frames::{make_cluster, make_fork, FiniteFrame};
use crate::genspace::{check_interior_map, glue, GeneralStructure, Gluing, GluingSpec, InteriorCheck};
use crate::subset::Subset;

/// A rooted frame refuting `formula` at `world`, with a maximal cluster of
/// size `alpha` to glue along.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelinePart {
    pub frame: FiniteFrame,
    pub cluster: Subset,
    pub alpha: usize,
    pub formula: Formula,
    pub valuation: Valuation,
    pub world: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub structure: GeneralStructure,
    /// The gluings `H_n = G_n + F_α`.
    pub stages: Vec<Gluing>,
    pub final_gluing: Gluing,
    /// Index of each `G_n` world in the glued whole.
    pub embeddings: Vec<Vec<usize>>,
    /// Each designated formula is still refuted at the image of its world.
    pub refuted: Vec<bool>,
    /// Each `G_n` lands on an upset of the whole.
    pub generated: Vec<bool>,
    pub interior: Vec<InteriorCheck>,
    pub path_connected: bool,
}

fn compose(first: &[usize], then: &[usize]) -> Vec<usize> {
    first.iter().map(|&x| then[x]).collect()
}

pub fn pipeline_not_s42(parts: &[PipelinePart]) -> Result<PipelineResult, ConstructionError> {
    if parts.is_empty() {
        return Err(ConstructionError::Parameter("no refutation frames".into()));
    }
    let mut stages = Vec::new();
    let mut into_h = Vec::new();
    let mut interior = Vec::new();
    for p in parts {
        let g = &p.frame;
        let cl = g.clusters()?;
        if !cl.clusters.iter().zip(&cl.maximal).any(|(c, &m)| *c == p.cluster && m) {
            return Err(ConstructionError::NotMaximalCluster(p.cluster));
        }
        if p.cluster.len() != p.alpha {
            return Err(ConstructionError::Parameter(format!(
                "cluster {} has {} worlds, fork expects {}",
                p.cluster,
                p.cluster.len(),
                p.alpha
            )));
        }
        g.root().map_err(|_| ConstructionError::NotRooted)?;
        let closure = Closure::Rows(g.rows().to_vec());
        if value(&p.formula, &p.valuation, g.size(), &closure)?.contains(p.world) {
            return Err(ConstructionError::NotRefuted(p.world));
        }
        let spec = GluingSpec {
            parts: vec![GeneralStructure::full_frame(g.clone())?, GeneralStructure::full_frame(make_fork(p.alpha)?)?],
            shared: GeneralStructure::full_frame(make_cluster(p.alpha)?)?,
            embeddings: vec![p.cluster.iter().collect(), (2..2 + p.alpha).collect()],
        };
        let h = glue(&spec)?;
        interior.push(check_interior_map(&h.rho, &h.sum, &h.structure));
        into_h.push(h.rho[..g.size()].to_vec());
        stages.push(h);
    }
    let shared = GeneralStructure::full_frame(make_cluster(1)?)?;
    let spec = GluingSpec {
        parts: stages.iter().map(|h| h.structure.clone()).collect(),
        shared,
        embeddings: stages.iter().map(|h| vec![h.rho[h.offsets[1] + 1]]).collect(),
    };
    let whole = glue(&spec)?;
    interior.push(check_interior_map(&whole.rho, &whole.sum, &whole.structure));
    let frame = whole.structure.frame();
    let n = frame.size();
    let closure = Closure::Rows(frame.rows().to_vec());
    let mut embeddings = Vec::new();
    let mut refuted = Vec::new();
    let mut generated = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        let shift: Vec<usize> = (0..stages[i].structure.size()).map(|x| whole.rho[whole.offsets[i] + x]).collect();
        let e = compose(&into_h[i], &shift);
        let mut moved = Valuation::new();
        for (letter, &a) in &p.valuation.assignment {
            moved = moved.with(letter, a.image(&e));
        }
        refuted.push(!value(&p.formula, &moved, n, &closure)?.contains(e[p.world]));
        generated.push(frame.is_upset(Subset::from_iter(e.iter().copied())));
        embeddings.push(e);
    }
    Ok(PipelineResult {
        path_connected: frame.is_path_connected(),
        structure: whole.structure.clone(),
        stages,
        final_gluing: whole,
        embeddings,
        refuted,
        generated,
        interior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn fork_part() -> PipelinePart {
        PipelinePart {
            frame: make_fork(1).unwrap(),
            cluster: Subset::singleton(2),
            alpha: 1,
            formula: parse("<>[]p -> []<>p").unwrap(),
            valuation: Valuation::new().with("p", Subset::singleton(1)),
            world: 0,
        }
    }

    #[test]
    fn single_point_part() {
        let part = PipelinePart {
            frame: make_cluster(1).unwrap(),
            cluster: Subset::singleton(0),
            alpha: 1,
            formula: parse("p").unwrap(),
            valuation: Valuation::new().with("p", Subset::EMPTY),
            world: 0,
        };
        let r = pipeline_not_s42(&[part]).unwrap();
        assert_eq!(r.structure.size(), 3);
        assert!(r.path_connected && r.refuted[0]);
    }

    #[test]
    fn two_forks_share_a_maximum() {
        let r = pipeline_not_s42(&[fork_part(), fork_part()]).unwrap();
        let f = r.structure.frame();
        assert_eq!(f.roots(), Subset::EMPTY);
        assert!(r.path_connected);
        assert_eq!(r.refuted, vec![true, true]);
        assert_eq!(r.generated, vec![true, true]);
        assert!(r.interior.iter().all(|c| *c == InteriorCheck::Pass));
        // H_n has 5 worlds; two share one point
        assert_eq!(f.size(), 9);
    }

    #[test]
    fn alpha_mismatch() {
        let mut p = fork_part();
        p.alpha = 2;
        assert!(matches!(pipeline_not_s42(&[p]), Err(ConstructionError::Parameter(_))));
    }
}
