use thiserror::Error;

/// Errors raised by the integrators and their analysis tooling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    /// The rational form of β has a pole at (or numerically at) this `c`.
    #[error("singular denominator in beta(ell = {ell}, c = {c:e})")]
    SingularDenominator { ell: u32, c: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite angular velocity at step {step} (t = {t})")]
    NonFiniteRate { step: usize, t: f64 },

    #[error("trajectory streams are misaligned: {ns} numerical vs {reference} reference samples")]
    Alignment { ns: usize, reference: usize },

    #[error("need at least {needed} usable samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("unknown algorithm id `{0}`")]
    UnknownAlgorithm(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
