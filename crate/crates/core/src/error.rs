use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("measure `{measure}` is undefined at (EZA={za}, EA={a}, EZ={z}): {reason}")]
    Domain {
        measure: String,
        za: f64,
        a: f64,
        z: f64,
        reason: &'static str,
    },

    #[error("invalid moment triple (EZA={za}, EA={a}, EZ={z}): {reason}")]
    InvalidMoments {
        za: f64,
        a: f64,
        z: f64,
        reason: &'static str,
    },

    #[error("measure id `{0}` is already registered")]
    DuplicateId(String),

    #[error("unknown measure id `{0}`")]
    UnknownMeasure(String),

    #[error("invalid measure parameters for `{id}`: {reason}")]
    InvalidMeasureParams { id: String, reason: String },

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("non-binary value `{value}` at row {row}, column `{column}`")]
    NonBinaryValue {
        row: usize,
        column: String,
        value: String,
    },

    #[error("length mismatch: {what} has {found} values, expected {expected}")]
    LengthMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("too few rows: {0} (at least 2 required)")]
    TooFewRows(usize),

    #[error("duplicate rule id `{0}`")]
    DuplicateRuleId(String),

    #[error("missing ground-truth column `z`")]
    MissingTruthColumn,

    #[error("dataset has no rule columns")]
    NoRules,

    #[error("csv error: {0}")]
    Csv(String),

    #[error("estimated variance of target {0} is zero; use the corrected estimate (Choice II)")]
    SingularVariance(usize),

    #[error("gradient of target {0} is identically zero, so its variance cannot be corrected")]
    ZeroGradient(usize),

    #[error("correlation matrix is not positive semidefinite (jitter up to 1e-6 failed)")]
    NotPositiveSemidefinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid correlation matrix: {0}")]
    InvalidCorrelation(String),

    #[error("probability {0} is outside (0, 1)")]
    OutOfRange(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("every requested target failed")]
    AllTargetsFailed(Vec<(usize, Error)>),
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}
