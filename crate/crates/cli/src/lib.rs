//! Command-line front end for the Hermitian torsion laboratory.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 the
//! computation finished with a negative answer (not critical, not converged,
//! variation check failed).

pub mod args;
pub mod commands;
pub mod error;
pub mod input;
pub mod report;
pub mod text;

pub use args::{run, Cli};
pub use error::{CliError, EXIT_INVALID, EXIT_NEGATIVE, EXIT_NUMERICAL, EXIT_OK};
