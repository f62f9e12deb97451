use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which standing assumption on a substitution failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubstitutionCondition {
    /// The seed image must begin with the seed letter.
    SeedPrefix = 1,
    /// Every letter's iterated image must grow without bound.
    Growth = 2,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet is empty")]
    EmptyAlphabet,

    #[error("substitution condition {} violated for letter '{letter}'", *.condition as u8)]
    ConditionViolated {
        condition: SubstitutionCondition,
        letter: char,
    },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("factor set of length {length} not saturated after generating {generated} letters")]
    SaturationFailure { length: usize, generated: usize },

    #[error("generated window '{window}' is not admissible")]
    AdmissibilityViolation { window: String },

    #[error("table is incomplete: {0}")]
    IncompleteTable(String),

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("subshift mismatch: {0}")]
    SpecMismatch(String),

    #[error("resource limit exceeded: {what} (cap {cap})")]
    ResourceLimit { what: String, cap: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("periodic point: offsets {first} and {second} have identical windows")]
    PeriodicCollision { first: i64, second: i64 },

    #[error("internal invariant failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceLimit { .. } => 3,
            Error::AdmissibilityViolation { .. } | Error::Internal(_) => 4,
            _ => 2,
        }
    }
}
