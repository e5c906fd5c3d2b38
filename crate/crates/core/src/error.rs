use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("the identity element has no conjugacy-class period")]
    EmptyClass,

    #[error("numeric overflow: {0}")]
    NumericOverflow(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("element is not proximal at level {level}: gap {gap:.3e} <= tolerance {tolerance:.3e}")]
    NotProximal { level: usize, gap: f64, tolerance: f64 },

    #[error("pair is not transverse: |theta(v)| / (|theta| |v|) = {0:.3e}")]
    Transversality(f64),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("non-positive periods for functional `{functional}` in classes {classes:?}")]
    DualConeViolation { functional: String, classes: Vec<String> },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate observable: {0}")]
    Degenerate(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
