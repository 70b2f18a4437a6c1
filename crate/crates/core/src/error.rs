use thiserror::Error;

use crate::types::{ConstantPolicy, DistanceKind};

/// Errors raised by the library. Each variant maps to a stable numeric code
/// (see [`Error::code`]) that the C ABI reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("risk profile has no entries")]
    EmptyProfile,
    #[error("risk value out of [0, 1] at entry {index}")]
    RiskOutOfRange { index: usize },
    #[error("sample size must be a positive integer")]
    BadSampleSize,
    #[error("duplicate classifier id {0}")]
    DuplicateId(i64),
    #[error("weight list is empty")]
    EmptyWeights,
    #[error("negative weight at position {index}")]
    NegativeWeight { index: usize },
    #[error("non-finite weight at position {index}")]
    NonFiniteWeight { index: usize },
    #[error("all weights are zero")]
    AllZero,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("k = {k} is outside [0, {m}]")]
    KOutOfRange { m: u64, k: u64 },
    #[error("operation does not support distance kind {0}")]
    UnsupportedKind(DistanceKind),
    #[error("constant policy {policy} is not valid for distance kind {kind}")]
    BadPolicyForKind {
        kind: DistanceKind,
        policy: ConstantPolicy,
    },
    #[error("binary kl is undefined at ({lhat}, {l})")]
    KlUndefined { lhat: f64, l: f64 },
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
    #[error("invalid kl root request: {0}")]
    InvalidRootRequest(String),
    #[error("posterior puts mass on entry {index} where the prior is zero")]
    NotAbsContinuous { index: usize },
    #[error("r_CH requires R >= 0, got {0}")]
    NegativeR(f64),
    #[error("confidence delta must lie strictly inside (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("prior must be strictly positive")]
    PriorNotPositive,
    #[error("distribution must be strictly positive")]
    NotStrictlyPositive,
    #[error("kl fixed-point map is degenerate at Gibbs risk {0}")]
    KlDegenerate(f64),
    #[error("prefix search requires a uniform prior")]
    NonUniformPrior,
    #[error("grid oracle supports at most 4 classifiers, got {0}")]
    TooManyClassifiers(usize),
    #[error("invalid grid step {0}")]
    InvalidStep(f64),
    #[error("profile is missing test errors")]
    MissingTestErrors,
    #[error("invalid fixed-point configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid generator spec: {0}")]
    InvalidGenerator(String),
}

impl Error {
    /// Stable numeric code, used across the C ABI. Zero is reserved for success.
    pub fn code(&self) -> i32 {
        match self {
            Error::EmptyProfile => 10,
            Error::RiskOutOfRange { .. } => 11,
            Error::BadSampleSize => 12,
            Error::DuplicateId(_) => 13,
            Error::EmptyWeights => 20,
            Error::NegativeWeight { .. } => 21,
            Error::NonFiniteWeight { .. } => 22,
            Error::AllZero => 23,
            Error::LengthMismatch { .. } => 24,
            Error::KOutOfRange { .. } => 30,
            Error::UnsupportedKind(_) => 31,
            Error::BadPolicyForKind { .. } => 32,
            Error::KlUndefined { .. } => 40,
            Error::InvalidRootRequest(_) => 41,
            Error::OutOfDomain(_) => 42,
            Error::NotAbsContinuous { .. } => 50,
            Error::NegativeR(_) => 51,
            Error::InvalidDelta(_) => 52,
            Error::PriorNotPositive => 60,
            Error::NotStrictlyPositive => 61,
            Error::KlDegenerate(_) => 62,
            Error::NonUniformPrior => 63,
            Error::TooManyClassifiers(_) => 64,
            Error::InvalidStep(_) => 65,
            Error::InvalidConfig(_) => 66,
            Error::MissingTestErrors => 70,
            Error::InvalidGenerator(_) => 71,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
