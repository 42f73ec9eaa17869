//! Exact quadratization of pseudo-Boolean polynomials.
//!
//! Polynomials over Boolean (`b`), spin (`z`) and ternary (`t`) variables
//! with exact rational coefficients are rewritten into quadratic ones by
//! catalogued gadgets, and every rewrite can be checked by exhaustive
//! enumeration.

pub mod error;
pub mod gadgets;
pub mod io;
pub mod multi_term;
pub mod pipeline;
pub mod poly;
pub mod rational;
pub mod structured;
pub mod verify;
pub mod zero_aux;

pub use error::{Error, Result};
pub use gadgets::{GadgetResult, Guarantee};
pub use pipeline::{compare_strategies, quadratize, QuadratizationResult, Strategy};
pub use poly::{Assignment, Domain, Monomial, Polynomial, Var, VarId, VariableRegistry};
pub use rational::Rational;
pub use verify::{CostReport, Mode, VerificationReport, Verifier};

/// Penalty weight for rewrites that need one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Penalty {
    /// The smallest weight the rewrite can certify.
    #[default]
    Auto,
    Value(Rational),
}
