use thiserror::Error;

/// Errors raised by planning, partitioning and applying the transforms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FfiaError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("kernel evaluated at its singularity (wrapped argument {0:e})")]
    SingularKernel(f64),

    #[error("argument {value} outside the convergence domain |t| <= {limit}")]
    Domain { value: f64, limit: f64 },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("prescribed error {eps:e} needs q = {q}, above the supported maximum {max}")]
    PrecisionBelowMachine { eps: f64, q: usize, max: usize },

    #[error(
        "translation displacement {displacement:e} is not well separated (minimum {minimum:e})"
    )]
    NotWellSeparated { displacement: f64, minimum: f64 },
}

pub type Result<T> = std::result::Result<T, FfiaError>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(FfiaError::LengthMismatch {
            what,
            expected,
            got,
        })
    }
}
