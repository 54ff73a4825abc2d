//! Numerical laboratory for left-invariant Hermitian geometry.
//!
//! Given a Lie algebra with complex structure (structure constants on a
//! (1,0)-coframe) and an invariant Hermitian metric, this crate computes the
//! Chern connection and torsion with all derived tensors, evaluates the
//! torsion functional `F = V^{(1-n)/n} ∫ |T|² dv` and the Gauduchon
//! functional `G = V^{(1-n)/n} ∫ |η|² dv` together with their
//! Euler–Lagrange residuals, classifies special metrics, and searches the cone
//! of invariant metrics for critical points.

pub mod classifiers;
pub mod error;
pub mod functionals;
pub mod lie_hermitian;
pub mod optimizer;
pub mod sampling;
pub mod tensor_algebra;
pub mod torsion;

pub use error::{GeometryError, Result};
pub use lie_hermitian::{catalog, HermitianStructure, StructureConstants};
pub use tensor_algebra::{CMat, CTensor3, CTensor4, HermMat, InvariantForm};
pub use torsion::{analyze, TorsionPackage};

/// Largest complex dimension handled by the pipeline.
pub const MAX_DIM: usize = 10;
