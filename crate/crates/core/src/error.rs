use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("numerical consistency violated: {0}")]
    Numerical(String),
    #[error("value is not in the spectrum: {0}")]
    Spectrum(String),
    #[error("no normal-form case matches: {0}")]
    UnknownCase(String),
    #[error("normal-form decomposition unsupported: {0}")]
    DecompositionUnsupported(String),
    #[error("splitting number not tabled: {0}")]
    UnsupportedPoint(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("symmetry violated: {0}")]
    Symmetry(String),
    #[error("concatenation endpoints disagree: {0}")]
    Concatenation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("theorem bound violated: {0}")]
    TheoremViolation(String),
    #[error("oracles disagree: {0}")]
    CrossOracle(String),
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
