//! Polynomials over Boolean, spin and ternary variables.

mod assignment;
mod domain;
mod monomial;
mod polynomial;
mod registry;

pub use assignment::Assignment;
pub use domain::Domain;
pub use monomial::Monomial;
pub use polynomial::{FlipMask, Polynomial, SubmodularityReport};
pub(crate) use registry::grammatical_index;
pub use registry::{SpaceId, Var, VarId, VarInfo, VarKind, VariableRegistry};
