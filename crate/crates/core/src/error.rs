use thiserror::Error;

use crate::poly::VarId;
use crate::verify::VerificationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("assignment has no value for variable {0}")]
    MissingVariable(VarId),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("polynomials belong to different variable registries")]
    RegistryMismatch,
    #[error("unknown variable {0}")]
    UnknownVariable(VarId),
    #[error("polynomial has degree {0}, expected at most 2")]
    NotQuadratic(usize),
    #[error("gadget {gadget} does not accept a coefficient of this sign")]
    WrongSign { gadget: &'static str },
    #[error("gadget {gadget} does not accept degree {degree}")]
    WrongDegree { gadget: &'static str, degree: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown gadget `{0}`")]
    UnknownGadget(String),
    #[error("verification failed ({})", .0.summary())]
    VerificationFailed(Box<VerificationReport>),
    #[error("no term of degree >= 3 contains the pair ({0}, {1})")]
    PairAbsent(VarId, VarId),
    #[error("penalty must be positive")]
    NonPositivePenalty,
    #[error("common sub-monomial must have at least 2 variables, got {0}")]
    CommonTooSmall(usize),
    #[error("term group mixes coefficient signs or has the wrong sign")]
    MixedSigns,
    #[error("invalid split position {split_at} for a monomial of degree {degree}")]
    InvalidSplit { split_at: usize, degree: usize },
    #[error("variant {variant} requires {requirement}")]
    VariantRangeViolation { variant: u8, requirement: String },
    #[error("state space of {states} exceeds the enumeration cap of {cap}")]
    EnumerationCapExceeded { states: u128, cap: u128 },
    #[error("deduction is not oracle-proven; pass the override flag to use it")]
    DeductionUnproven,
    #[error("excludable local configuration is not oracle-proven; pass the override flag to use it")]
    ElcUnproven,
    #[error("variable mismatch: {0}")]
    VariableMismatch(String),
    #[error("no applicable gadget for term {0}")]
    NoApplicableGadget(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
}
