use hermitian_torsion::GeometryError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
/// The computation succeeded but the answer is negative: not critical, not converged.
pub const EXIT_NEGATIVE: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: String) -> Self {
        Self {
            code: EXIT_INVALID,
            message,
        }
    }

    pub fn numerical(message: String) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Errors raised after the input was accepted are numerical failures.
impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        Self::numerical(e.to_string())
    }
}
