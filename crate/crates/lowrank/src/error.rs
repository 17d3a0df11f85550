//! Crate-wide error type.

use std::fmt;

#[derive(Debug)]
pub enum Error {
    /// Shape mismatch between operands; carries both shapes.
    Dimension {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    /// Non-finite entries or otherwise unusable numeric input.
    InvalidInput(String),
    /// Out-of-range configuration value (rank, oversampling, sparsity, ...).
    Parameter(String),
    /// A triangular solve hit a diagonal entry under the conditioning guard.
    IllConditionedTriangular {
        index: usize,
        value: f64,
        threshold: f64,
        hint: Option<&'static str>,
    },
    /// A factorization failed to converge; carries iteration diagnostics.
    Factorization(String),
    /// Input required to be symmetric is not.
    Symmetry(String),
    /// Degenerate input such as a zero-norm matrix.
    DegenerateInput(String),
    /// Argument outside a formula's domain.
    Domain(String),
    /// File parse failure with 1-based line number.
    Parse {
        line: usize,
        message: String,
    },
    /// Too few trials for a statistical verdict.
    InsufficientSample {
        needed: usize,
        got: usize,
    },
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension { op, left, right } => write!(
                f,
                "dimension mismatch in {op}: {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Parameter(m) => write!(f, "invalid parameter: {m}"),
            Error::IllConditionedTriangular {
                index,
                value,
                threshold,
                hint,
            } => {
                write!(
                    f,
                    "ill-conditioned triangular factor: |R[{index},{index}]| = {value:.3e} \
                     below guard {threshold:.3e}"
                )?;
                if let Some(h) = hint {
                    write!(f, " ({h})")?;
                }
                Ok(())
            }
            Error::Factorization(m) => write!(f, "factorization failed: {m}"),
            Error::Symmetry(m) => write!(f, "symmetry violation: {m}"),
            Error::DegenerateInput(m) => write!(f, "degenerate input: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::InsufficientSample { needed, got } => {
                write!(f, "insufficient sample: need {needed} trials, got {got}")
            }
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
