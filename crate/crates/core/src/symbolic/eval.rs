//! Floating-point evaluation at a point.

use std::collections::BTreeMap;

use num::ToPrimitive;

use super::expr::{Expr, Func, Node, VarId};
use crate::numeric::gauss_kronrod;
use crate::{Error, Result};

/// Assignment of real values to variables.
pub type Point = BTreeMap<VarId, f64>;

fn domain(what: &str, e: &Expr) -> Error {
    Error::Domain(format!("{what} in `{e}`"))
}

/// Evaluate `e` in IEEE double precision.
///
/// Integral nodes are resolved by adaptive Gauss–Kronrod quadrature.
pub fn eval(e: &Expr, point: &Point) -> Result<f64> {
    let mut point = point.clone();
    eval_in(e, &mut point)
}

fn eval_in(e: &Expr, point: &mut Point) -> Result<f64> {
    let out = match e.node() {
        Node::Num(q) => q.to_f64().unwrap_or(f64::NAN),
        Node::Var(v) => *point.get(v).ok_or_else(|| Error::Domain(format!("no value for variable `{v}`")))?,
        Node::Pi => std::f64::consts::PI,
        Node::Add(xs) => {
            let mut s = 0.0;
            for x in xs {
                s += eval_in(x, point)?;
            }
            s
        }
        Node::Mul(xs) => {
            let mut p = 1.0;
            for x in xs {
                p *= eval_in(x, point)?;
            }
            p
        }
        Node::Pow(b, q) => {
            let base = eval_in(b, point)?;
            if q.is_integer() {
                let n = q.to_integer().to_i32().ok_or(Error::ExponentTooLarge)?;
                if n < 0 && base == 0.0 {
                    return Err(domain("division by zero", e));
                }
                base.powi(n)
            } else {
                let d = q.denom().to_u64().ok_or(Error::ExponentTooLarge)?;
                let x = q.to_f64().unwrap_or(f64::NAN);
                if base < 0.0 {
                    if d % 2 == 0 {
                        return Err(domain("even root of a negative value", e));
                    }
                    let odd_numer = q.numer().to_i64().map_or(false, |n| n % 2 != 0);
                    let mag = (-base).powf(x);
                    if odd_numer {
                        -mag
                    } else {
                        mag
                    }
                } else {
                    if base == 0.0 && x < 0.0 {
                        return Err(domain("division by zero", e));
                    }
                    base.powf(x)
                }
            }
        }
        Node::Div(a, b) => {
            let den = eval_in(b, point)?;
            if den == 0.0 {
                return Err(domain("division by zero", e));
            }
            eval_in(a, point)? / den
        }
        Node::Func(f, a) => {
            let x = eval_in(a, point)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
                Func::Ln if x <= 0.0 => return Err(domain("logarithm of a non-positive value", e)),
                Func::Ln => x.ln(),
                Func::Sqrt if x < 0.0 => return Err(domain("square root of a negative value", e)),
                Func::Sqrt => x.sqrt(),
            }
        }
        Node::Integral(i) => {
            let lo = eval_in(&i.lower, point)?;
            let hi = eval_in(&i.upper, point)?;
            let saved = point.get(&i.dummy).copied();
            let mut err = None;
            let value = gauss_kronrod(
                |s| {
                    point.insert(i.dummy, s);
                    match eval_in(&i.body, point) {
                        Ok(v) => v,
                        Err(e) => {
                            err.get_or_insert(e);
                            f64::NAN
                        }
                    }
                },
                lo,
                hi,
                1e-12,
            );
            match saved {
                Some(s) => point.insert(i.dummy, s),
                None => point.remove(&i.dummy),
            };
            if let Some(e) = err {
                return Err(e);
            }
            value?.value
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetSpace;

    #[test]
    fn examples() {
        let s = JetSpace::new(vec!["x"], 2).unwrap();
        let p = Point::from([(VarId::pos(0), 2.0), (VarId::vel(0), 1.0)]);
        assert_eq!(eval(&s.parse("x^2 + x'").unwrap(), &p).unwrap(), 5.0);
        assert!(eval(&s.parse("sin(pi)").unwrap(), &Point::new()).unwrap().abs() < 1e-15);
        let z = Point::from([(VarId::pos(0), 0.0)]);
        assert!(matches!(eval(&s.parse("1/x").unwrap(), &z), Err(Error::Domain(_))));
        assert!(matches!(eval(&s.parse("ln(x)").unwrap(), &z), Err(Error::Domain(_))));
    }

    #[test]
    fn odd_roots_of_negatives_are_real() {
        let s = JetSpace::new(vec!["x"], 1).unwrap();
        let p = Point::from([(VarId::pos(0), -8.0)]);
        assert!((eval(&s.parse("x^(1/3)").unwrap(), &p).unwrap() + 2.0).abs() < 1e-12);
        assert!(eval(&s.parse("x^(1/2)").unwrap(), &p).is_err());
    }

    #[test]
    fn integral_nodes_use_quadrature() {
        let s = JetSpace::new(vec!["x"], 2).unwrap();
        let e = s.parse("integrate(exp(_s0), _s0, 0, x')").unwrap();
        let p = Point::from([(VarId::vel(0), 1.0)]);
        assert!((eval(&e, &p).unwrap() - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }
}
