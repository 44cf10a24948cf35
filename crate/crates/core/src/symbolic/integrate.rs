//! Definite integration in one variable over the polynomial fragment.

use num::BigInt;

use super::canon::{canonicalize, polynomial_coefficients};
use super::expr::{Expr, Rational, VarId};
use super::print::DefaultNames;
use crate::{Error, Result};

/// What to do with integrands that are not polynomial in the dummy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IntegrationMode {
    #[default]
    Exact,
    /// Keep an opaque integral node that `eval` resolves by quadrature.
    NumericFallback,
}

/// `∫_lower^upper e d(dummy)`, canonical.
///
/// Polynomial integrands are integrated term by term with the power rule.
pub fn integrate_scaled(e: &Expr, dummy: VarId, lower: &Expr, upper: &Expr, mode: IntegrationMode) -> Result<Expr> {
    if lower.depends_on(dummy) || upper.depends_on(dummy) {
        return Err(Error::DummyInBounds);
    }
    let body = canonicalize(e);
    match polynomial_coefficients(&body, dummy) {
        Some(coeffs) => {
            let terms = coeffs.iter().enumerate().filter(|(_, c)| !c.is_literal_zero()).map(|(k, c)| {
                let n = k as i64 + 1;
                let scale = Expr::num(Rational::new(BigInt::from(1), BigInt::from(n)));
                c * scale * (upper.powi(n) - lower.powi(n))
            });
            Ok(canonicalize(&Expr::sum(terms.collect::<Vec<_>>())))
        }
        None => match mode {
            IntegrationMode::Exact => Err(Error::NonPolynomialIntegrand(super::print::print(&body, &DefaultNames))),
            IntegrationMode::NumericFallback => Ok(canonicalize(&Expr::integral(body, dummy, lower.clone(), upper.clone()))),
        },
    }
}
