//! Precedence-aware printer producing text the parser reads back.

use std::fmt;

use num::{One, Signed, Zero};

use super::expr::{Expr, Node, Rational, VarId};

/// Source of display names for variables.
pub trait VarNames {
    fn var_name(&self, v: VarId) -> String;
}

/// Context-free names (`q1`, `q1'`, `_s0`, ...).
pub struct DefaultNames;

impl VarNames for DefaultNames {
    fn var_name(&self, v: VarId) -> String {
        v.to_string()
    }
}

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 5;

/// Printed fragment: `neg` marks a leading minus kept outside `body`.
struct Piece {
    neg: bool,
    body: String,
    prec: u8,
}

impl Piece {
    fn atom(body: String) -> Piece {
        Piece { neg: false, body, prec: ATOM }
    }

    /// Render with parentheses if weaker than `min`.
    fn at_least(self, min: u8) -> String {
        let prec = if self.neg { self.prec.min(UNARY) } else { self.prec };
        let text = if self.neg { format!("-{}", self.body) } else { self.body };
        if prec < min {
            format!("({text})")
        } else {
            text
        }
    }
}

fn rational(q: &Rational) -> Piece {
    let a = q.abs();
    let (body, prec) = if a.is_integer() { (a.to_string(), ATOM) } else { (format!("{}/{}", a.numer(), a.denom()), PRODUCT) };
    Piece { neg: q.is_negative(), body, prec }
}

fn exponent(q: &Rational) -> String {
    if q.is_integer() && !q.is_negative() {
        q.to_string()
    } else {
        format!("({q})")
    }
}

fn piece(e: &Expr, names: &dyn VarNames) -> Piece {
    match e.node() {
        Node::Num(q) => rational(q),
        Node::Var(v) => Piece::atom(names.var_name(*v)),
        Node::Pi => Piece::atom("pi".into()),
        Node::Add(xs) => {
            let mut out = String::new();
            for (k, x) in xs.iter().enumerate() {
                let p = piece(x, names);
                let neg = p.neg;
                let body = Piece { neg: false, ..p }.at_least(SUM + 1);
                match (k, neg) {
                    (0, false) => out.push_str(&body),
                    (0, true) => {
                        out.push('-');
                        out.push_str(&body);
                    }
                    (_, false) => {
                        out.push_str(" + ");
                        out.push_str(&body);
                    }
                    (_, true) => {
                        out.push_str(" - ");
                        out.push_str(&body);
                    }
                }
            }
            Piece { neg: false, body: out, prec: SUM }
        }
        Node::Mul(xs) => {
            let mut coeff = Rational::one();
            let mut factors = Vec::new();
            for x in xs {
                match x.node() {
                    Node::Num(q) => coeff *= q,
                    _ => factors.push(x),
                }
            }
            if coeff.is_zero() {
                return Piece::atom("0".into());
            }
            let neg = coeff.is_negative();
            let coeff = coeff.abs();
            if coeff.is_one() && factors.len() == 1 {
                let p = piece(factors[0], names);
                return Piece { neg: neg ^ p.neg, ..p };
            }
            let mut parts: Vec<String> = Vec::new();
            if !coeff.numer().is_one() || factors.is_empty() {
                parts.push(coeff.numer().to_string());
            }
            parts.extend(factors.iter().map(|f| piece(f, names).at_least(UNARY + 1)));
            let mut body = parts.join("*");
            if !coeff.denom().is_one() {
                body = format!("{body}/{}", coeff.denom());
            }
            Piece { neg, body, prec: PRODUCT }
        }
        Node::Pow(b, q) => {
            let base = piece(b, names).at_least(ATOM);
            Piece::atom(format!("{base}^{}", exponent(q)))
        }
        Node::Div(a, b) => {
            let num = piece(a, names);
            let neg = num.neg;
            let num = Piece { neg: false, ..num }.at_least(PRODUCT);
            let den = piece(b, names).at_least(UNARY + 1);
            Piece { neg, body: format!("{num}/{den}"), prec: PRODUCT }
        }
        Node::Func(f, a) => Piece::atom(format!("{}({})", f.name(), piece(a, names).at_least(0))),
        Node::Integral(i) => Piece::atom(format!(
            "integrate({}, {}, {}, {})",
            piece(&i.body, names).at_least(0),
            names.var_name(i.dummy),
            piece(&i.lower, names).at_least(0),
            piece(&i.upper, names).at_least(0)
        )),
    }
}

/// Render `e` with names from `names`; the output re-parses to an equal
/// expression in the corresponding jet space.
pub fn print(e: &Expr, names: &dyn VarNames) -> String {
    piece(e, names).at_least(0)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self, &DefaultNames))
    }
}
