use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a forecast needs at least two categories, got {0}")]
    TooFewCategories(usize),
    #[error("probability {value} at position {index} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, which is not within 1e-6 of 1")]
    NotNormalized { sum: f64 },
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("outcome {index} is out of range for {categories} categories")]
    OutcomeOutOfRange { index: usize, categories: usize },
    #[error("dimension mismatch: expected {expected} categories, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("forecast probability {0} violates Cromwell's rule")]
    CromwellViolation(f64),
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
    #[error("the {rule} score is binary-only; got {categories} categories")]
    BinaryOnly { rule: String, categories: usize },
    #[error("{rule} entropy is not defined at {value}")]
    OutsideDomain { rule: String, value: f64 },
    #[error("record is empty")]
    EmptyRecord,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("direction vector has squared norm {0}, expected 1")]
    NonUnitDirection(f64),
    #[error("baseline score must be negative, got {0}")]
    NonNegativeBaseline(f64),
    #[error("stake fraction must lie in [0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("invalid binning: {0}")]
    InvalidBinning(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown scoring rule `{0}`")]
    UnknownRule(String),
    #[error("no resolved events to score")]
    NoResolvedEvents,
    #[error("no submissions")]
    NoSubmissions,
    #[error("forecasters `{a}` and `{b}` share no scored events")]
    NoCommonEvents { a: String, b: String },
    #[error("header mismatch in {file}: expected `{expected}`, found `{found}`")]
    HeaderMismatch {
        file: String,
        expected: String,
        found: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub(crate) fn check_probability(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::InvalidProbability(p))
    }
}
