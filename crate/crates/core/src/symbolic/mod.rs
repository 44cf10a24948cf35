//! Exact expression arithmetic over jet coordinates.

mod canon;
mod eval;
mod expr;
mod integrate;
mod parse;
mod poly;
mod print;
mod zero;

pub use canon::{
    canonicalize, canonicalize_with_side_conditions, diff, is_polynomial_in, numer_denom, polynomial_coefficients,
    substitute, try_canonicalize,
};
pub use eval::{eval, Point};
pub use expr::{fresh_dummy, int, rat, Expr, Func, Integral, Node, Rational, Role, VarId, BOUND_DUMMY_BASE};
pub use integrate::{integrate_scaled, IntegrationMode};
pub use parse::parse;
pub use print::{print, DefaultNames, VarNames};
pub use zero::{is_zero, is_zero_with, ZeroVerdict};
