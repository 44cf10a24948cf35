//! Tri-state zero decisions.

use serde::Serialize;

use super::canon::try_canonicalize;
use super::expr::{Expr, VarId};
use crate::numeric::{numeric_zero, SamplePlan};

/// Outcome of deciding whether an expression vanishes identically.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum ZeroVerdict {
    /// The canonical form is the literal 0.
    ProvenZero,
    /// The canonical form lies in the rational fragment and is not 0.
    ProvenNonZero,
    NumericZero { trials: usize, max_residual: f64 },
    NumericNonZero { witness: Vec<(VarId, f64)>, residual: f64 },
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::ProvenZero | ZeroVerdict::NumericZero { .. })
    }

    pub fn is_proven(&self) -> bool {
        matches!(self, ZeroVerdict::ProvenZero | ZeroVerdict::ProvenNonZero)
    }

    pub fn label(&self) -> &'static str {
        match self {
            ZeroVerdict::ProvenZero => "ProvenZero",
            ZeroVerdict::ProvenNonZero => "ProvenNonZero",
            ZeroVerdict::NumericZero { .. } => "NumericZero",
            ZeroVerdict::NumericNonZero { .. } => "NumericNonZero",
        }
    }

    /// Combine verdicts of a family: the first nonzero one wins, otherwise
    /// numeric zeros dominate proven ones.
    pub fn worst<'a, I: IntoIterator<Item = &'a ZeroVerdict>>(items: I) -> ZeroVerdict {
        let mut out = ZeroVerdict::ProvenZero;
        for v in items {
            match v {
                ZeroVerdict::ProvenNonZero | ZeroVerdict::NumericNonZero { .. } => return v.clone(),
                ZeroVerdict::NumericZero { trials, max_residual } => {
                    out = match out {
                        ZeroVerdict::NumericZero { trials: t, max_residual: r } => {
                            ZeroVerdict::NumericZero { trials: t.max(*trials), max_residual: r.max(*max_residual) }
                        }
                        _ => v.clone(),
                    }
                }
                ZeroVerdict::ProvenZero => {}
            }
        }
        out
    }
}

/// Decide `e == 0` with the default sampling plan.
pub fn is_zero(e: &Expr) -> ZeroVerdict {
    is_zero_with(e, &SamplePlan::default())
}

/// Decide `e == 0`: structurally in the rational fragment, by sampling
/// outside it.
pub fn is_zero_with(e: &Expr, plan: &SamplePlan) -> ZeroVerdict {
    match try_canonicalize(e) {
        Ok(c) if c.is_literal_zero() => ZeroVerdict::ProvenZero,
        Ok(c) if !c.is_transcendental() => ZeroVerdict::ProvenNonZero,
        Ok(c) => numeric_zero(&c, plan),
        Err(_) => numeric_zero(e, plan),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetSpace;

    #[test]
    fn examples() {
        let s = JetSpace::new(vec!["x"], 2).unwrap();
        let z = |t: &str| is_zero(&s.parse(t).unwrap());
        assert_eq!(z("(x + x')^2 - x^2 - 2*x*x' - x'^2"), ZeroVerdict::ProvenZero);
        assert_eq!(z("x'' + x' - x''"), ZeroVerdict::ProvenNonZero);
        match z("sin(x)^2 + cos(x)^2 - 1") {
            ZeroVerdict::NumericZero { trials, max_residual } => {
                assert_eq!(trials, 32);
                assert!(max_residual < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(z("sin(x)^2 + cos(x)^2 - 1 + x'/1000"), ZeroVerdict::NumericNonZero { .. }));
    }

    #[test]
    fn worst_prefers_failures() {
        let n = ZeroVerdict::NumericZero { trials: 32, max_residual: 1e-14 };
        assert_eq!(ZeroVerdict::worst([&ZeroVerdict::ProvenZero, &n]), n);
        assert_eq!(
            ZeroVerdict::worst([&n, &ZeroVerdict::ProvenNonZero, &ZeroVerdict::ProvenZero]),
            ZeroVerdict::ProvenNonZero
        );
        assert_eq!(ZeroVerdict::worst([]), ZeroVerdict::ProvenZero);
    }
}
