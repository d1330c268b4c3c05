use thiserror::Error;

use crate::qmat::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("invalid subsystem index {index} for a {count}-partite state")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "G - alpha^2 E is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})"
    )]
    GCondition { min_eigenvalue: f64 },

    #[error("matrix dimension {requested} exceeds the configured cap {cap}")]
    DimensionCap { requested: usize, cap: usize },

    #[error("not a valid density matrix: {}", format_violations(.0))]
    InvalidDensity(Vec<Violation>),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
