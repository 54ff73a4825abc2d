//! Dense complex linear algebra and the invariant exterior algebra shared by
//! every other module.

pub mod forms;
pub mod matrix;
pub mod tensor;

pub use forms::InvariantForm;
pub use matrix::{cholesky, CMat, HermMat};
pub use tensor::{CTensor3, CTensor4};
