//! Labeling constructions at finite truncation, with their verifiers.

pub mod cantor;
pub mod cgfp;
pub mod collapse;
pub mod fibers;
pub mod interval;
pub mod pipeline;
pub mod qstage;
pub mod tcomb;

use crate::algebra::AlgebraError;
use crate::frames::FrameError;
use crate::genspace::SpaceError;
use thiserror::Error;

pub use cantor::{cantor_to_lalpha, CantorLabeling, CantorReport};
pub use cgfp::{cgfp_select, SelectionResult};
pub use collapse::{cluster_collapse, CollapseResult};
pub use fibers::{quotient_by_cluster_fibers, FiberQuotient};
pub use interval::{interval_construction, label_of_point, verify_interval_lemmas, IntervalReport, PointChain};
pub use pipeline::{pipeline_not_s42, PipelinePart, PipelineResult};
pub use qstage::{q_stage, QStageReport};
pub use tcomb::{tcomb_labeling, verify_comb_pmorphism, CombReport, EnumerationFamily, LabeledMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("frame is not rooted")]
    NotRooted,
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("enumeration for world {world} is not a permutation of its successors")]
    BadEnumeration { world: usize },
    #[error("formula is not refuted at world {0} under the valuation")]
    NotRefuted(usize),
    #[error("frame is not a single cluster")]
    NotACluster,
    #[error("{0} is not a maximal cluster")]
    NotMaximalCluster(crate::subset::Subset),
}
