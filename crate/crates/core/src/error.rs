use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants map onto the CLI exit codes: precondition and parse failures
/// exit with 2, precision failures with 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at {position}: {message}")]
    Parse { position: String, message: String },

    #[error("irregular singular point at {0}")]
    IrregularSingularPoint(String),

    #[error("T too small: truncation order {given} is below the exponent gap {required}")]
    TruncationTooSmall { given: usize, required: usize },

    #[error("increase T: truncation order {0} cannot decide the resonance obstructions")]
    IncreaseTruncation(usize),

    #[error("irrational exponent at {0}: only rational exponents are supported here")]
    IrrationalExponent(String),

    #[error("precision unreachable at this point: {0}")]
    PrecisionUnreachable(String),

    #[error("sample too close to a singular point: {0}")]
    TooCloseToSingularity(String),

    #[error("disks of convergence do not overlap, use path_connect: {0}")]
    NoOverlap(String),

    #[error("path passes too close to a singular point, reroute: {0}")]
    Reroute(String),

    #[error("step too large: {0}")]
    StepTooLarge(String),

    #[error("ill-conditioned matching system: {0}")]
    IllConditioned(String),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("need more terms: {0}")]
    NeedMoreTerms(String),

    #[error("branch ambiguity on the cut: {0}")]
    OnBranchCut(String),

    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
