use thiserror::Error;

/// Well-formedness violations found while building a [`crate::Memdp`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("environment {env}: row ({state}, {action}) sums to {sum}, expected 1")]
    NonStochasticRow {
        env: usize,
        state: String,
        action: String,
        sum: f64,
    },
    #[error("initial distribution sums to {0}, expected 1")]
    NonStochasticInitial(f64),
    #[error("invalid probability {value} in {context}")]
    InvalidProbability { context: String, value: f64 },
    #[error("unknown state `{0}`")]
    UnknownStateRef(String),
    #[error("unknown action `{0}`")]
    UnknownActionRef(String),
    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("model has no environments")]
    EmptyEnvironmentList,
    #[error("model has no states")]
    NoStates,
    #[error("model has no actions")]
    NoActions,
    #[error("environment {env}: missing row ({state}, {action})")]
    MissingRow {
        env: usize,
        state: String,
        action: String,
    },
    #[error("restriction to an empty environment set")]
    EmptyRestriction,
    #[error("environment index {index} out of range (model has {count})")]
    EnvOutOfRange { index: usize, count: usize },
}

/// Explicit constructions and brute-force oracles that refuse oversized inputs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{what} exceeds the size cap of {cap}")]
pub struct SizeCapExceeded {
    pub what: &'static str,
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("malformed formula: {0}")]
    MalformedFormula(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("model has no target states")]
    NoTargets,
    #[error("resource limit reached: {0}")]
    ResourceLimit(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("initial observation ({state}, {belief}) is not in the winning region")]
    NotWinning { state: String, belief: String },
    #[error("inconsistent controller: {0}")]
    InconsistentFsc(String),
}

/// Parse failures for model and policy files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid policy: {0}")]
    Policy(String),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
