//! Lie algebras with integrable complex structure, given by structure
//! constants on a (1,0)-coframe, together with invariant Hermitian metrics.

pub mod catalog;
pub mod frame;
pub mod real;
pub mod structure;

pub use frame::{frame_change, transform_metric, unitary_reduction, HermitianStructure};
pub use real::{complexify, realify, RealLieData};
pub use structure::{StructureConstants, ValidationCheck, ValidationReport, VALIDATION_TOL};
