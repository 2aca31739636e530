//! Finite-scale topological semantics for the modal logic S4.
//!
//! Kripke frames, closure algebras, general frames and spaces, and the
//! labeling constructions that map trees, Cantor sets and intervals onto
//! finite frames, each paired with a checker for its defining property.

pub mod algebra;
pub mod catalog;
pub mod constructions;
pub mod formula;
pub mod frames;
pub mod genspace;
pub mod scalar;
pub mod subset;

pub use formula::{parse, Formula};
pub use subset::Subset;

/// Exact rationals used by default for interval endpoints.
pub type Rational = num_rational::BigRational;
pub type IntervalConstruction = constructions::interval::IntervalConstruction<Rational>;
pub type QStage = constructions::qstage::QStage<Rational>;
