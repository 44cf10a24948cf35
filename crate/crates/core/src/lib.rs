//! Symbolic–numeric toolkit for the inverse problem of the calculus of
//! variations for autonomous second-order ODE systems.
//!
//! Given a source form `ε_i(x, x', x'') ω^i ∧ dt` the crate decides local
//! variationality through the Helmholtz conditions, builds the Vainberg–Tonti
//! Lagrangian and its first-order reduction, the Lepage 2-form `α_ε`, and the
//! homotopy decomposition `α_ε = ω + d(μ₀ + κ)`. When the obstruction `ω`
//! vanishes (in particular for systems homogeneous of degree `c ∉ {0, 1}`) the
//! horizontal part `h(μ₀ + κ)` is a Lagrangian defined on the whole chart
//! domain, independent of its star-shapedness.
//!
//! Every construction is checked by exact canonical-form identities
//! ([`symbolic`]) and by independent numerics ([`numeric`]).

pub mod catalog;
pub mod forms;
pub mod globalization;
pub mod homogeneity;
pub mod jet;
pub mod numeric;
pub mod symbolic;
pub mod system;
pub mod variational;

pub use forms::{Basis, BasisMode, DiffForm};
pub use jet::JetSpace;
pub use symbolic::{Expr, Func, Rational, VarId, ZeroVerdict};
pub use variational::{Lagrangian, SourceForm};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown identifier `{name}` at column {column}")]
    UnknownIdentifier { name: String, column: usize },
    #[error("prime order exceeds jet order: `{name}` needs order {order}, space allows {max}")]
    PrimeOrderExceeded { name: String, order: usize, max: u8 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("exponent does not fit in a machine integer")]
    ExponentTooLarge,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not reach the requested accuracy (estimate {estimate:e})")]
    AccuracyNotReached { estimate: f64 },
    #[error("jet order overflow: result needs order {needed}, limit is {limit}")]
    OrderOverflow { needed: u8, limit: u8 },
    #[error("integrand is not polynomial in the integration variable: {0}")]
    NonPolynomialIntegrand(String),
    #[error("integration bounds contain the integration variable")]
    DummyInBounds,
    #[error("source form is not affine in accelerations: d²ε_{i}/dx''^{j}dx''^{k} = {residual}")]
    NotAffine { i: usize, j: usize, k: usize, residual: String },
    #[error("source form depends explicitly on time")]
    TimeDependent,
    #[error("Helmholtz conditions are violated")]
    HelmholtzViolated,
    #[error("form degree {0} exceeds the supported maximum of 3")]
    DegreeOverflow(usize),
    #[error("form degrees differ: {0} and {1}")]
    DegreeMismatch(usize, usize),
    #[error("coordinate map and its inverse do not compose to the identity")]
    NonInvertiblePair,
    #[error("obstruction 2-form ω is nonzero: {omega}")]
    ObstructionNonzero { omega: String },
    #[error("homogeneity degree {0} is degenerate (must not be 0 or 1)")]
    DegenerateDegree(Rational),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid jet space: {0}")]
    InvalidSpace(String),
    #[error("invalid input: {0}")]
    Validation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
