//! Canonical forms.
//!
//! Every expression maps to a reduced rational function over atoms; rendering
//! that rational function back as a tree gives the canonical `Expr`. Two
//! expressions of the rational fragment are equal iff their canonical trees
//! are structurally identical.

use std::collections::BTreeMap;

use num::{BigInt, One, Signed, ToPrimitive, Zero};

use super::expr::{Expr, Func, Integral, Node, Rational, VarId, BOUND_DUMMY_BASE};
use super::poly::{Atom, Monomial, Poly, RatFun};
use crate::Error;

/// Canonical form of `e`.
///
/// Panics if `e` divides by an identically vanishing expression; use
/// [`try_canonicalize`] for unvalidated input.
pub fn canonicalize(e: &Expr) -> Expr {
    try_canonicalize(e).expect("division by an identically zero expression")
}

pub fn try_canonicalize(e: &Expr) -> Result<Expr, Error> {
    let mut side = Vec::new();
    Ok(render(&to_ratfun(e, &mut side)?))
}

/// Canonical form plus the non-constant factors cancelled on the way
/// (`x/x -> 1` records `x`), which are assumed nonvanishing.
pub fn canonicalize_with_side_conditions(e: &Expr) -> Result<(Expr, Vec<Expr>), Error> {
    let mut side = Vec::new();
    let rf = to_ratfun(e, &mut side)?;
    let mut conds: Vec<Expr> = side.iter().map(render_poly).collect();
    if !rf.den.is_one() {
        conds.push(render_poly(&rf.den));
    }
    conds.sort();
    conds.dedup();
    Ok((render(&rf), conds))
}

pub(crate) fn to_ratfun(e: &Expr, side: &mut Vec<Poly>) -> Result<RatFun, Error> {
    let rf = match e.node() {
        Node::Num(q) => RatFun::constant(q.clone()),
        Node::Var(v) => RatFun::atom(Atom::Var(*v)),
        Node::Pi => RatFun::atom(Atom::Pi),
        Node::Add(xs) => {
            let mut acc = RatFun::zero();
            for x in xs {
                acc = acc.add(&to_ratfun(x, side)?);
            }
            acc
        }
        Node::Mul(xs) => {
            let mut acc = RatFun::one();
            for x in xs {
                acc = acc.mul(&to_ratfun(x, side)?);
                if acc.is_zero() {
                    break;
                }
            }
            acc
        }
        Node::Pow(b, q) => power(to_ratfun(b, side)?, q, side)?,
        Node::Div(a, b) => {
            let num = to_ratfun(a, side)?;
            let den = to_ratfun(b, side)?;
            num.div(&den, side).ok_or(Error::DivisionByZero)?
        }
        Node::Func(f, a) => apply_func(*f, to_ratfun(a, side)?, side)?,
        Node::Integral(i) => integral_atom(i, side)?,
    };
    Ok(reduce_roots(rf, side))
}

fn power(base: RatFun, q: &Rational, side: &mut Vec<Poly>) -> Result<RatFun, Error> {
    if q.is_integer() {
        let n = q.to_integer().to_i64().ok_or(Error::ExponentTooLarge)?;
        if n < 0 && base.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return base.powi(n, side).ok_or(Error::DivisionByZero);
    }
    if base.is_zero() {
        if q.is_negative() {
            return Err(Error::DivisionByZero);
        }
        return Ok(RatFun::zero());
    }
    let d = q.denom().to_u32().ok_or(Error::ExponentTooLarge)?;
    let n = q.numer().to_i64().ok_or(Error::ExponentTooLarge)?;
    if let Some(c) = base.as_constant() {
        if c.is_one() {
            return Ok(RatFun::one());
        }
        if let Some(r) = exact_root(&c, d) {
            return RatFun::constant(r).powi(n, side).ok_or(Error::DivisionByZero);
        }
    }
    let root = RatFun::atom(Atom::Root(render(&base), d));
    Ok(reduce_roots(root.powi(n, side).ok_or(Error::DivisionByZero)?, side))
}

fn exact_root(c: &Rational, d: u32) -> Option<Rational> {
    if c.is_negative() && d % 2 == 0 {
        return None;
    }
    let root_int = |n: &BigInt| -> Option<BigInt> {
        let r = n.abs().nth_root(d);
        (num::pow::pow(r.clone(), d as usize) == n.abs()).then(|| if n.is_negative() { -r } else { r })
    };
    Some(Rational::new(root_int(c.numer())?, root_int(c.denom())?))
}

/// Rewrite `Root(b, d)^k` with `k >= d` as `b^(k/d) Root(b, d)^(k mod d)`.
fn reduce_roots(rf: RatFun, side: &mut Vec<Poly>) -> RatFun {
    let needs = |p: &Poly| {
        p.terms.keys().any(|m| m.0.iter().any(|(a, e)| matches!(a, Atom::Root(_, d) if *e >= *d)))
    };
    if !needs(&rf.num) && !needs(&rf.den) {
        return rf;
    }
    let expand = |p: &Poly, side: &mut Vec<Poly>| -> RatFun {
        let mut acc = RatFun::zero();
        for (m, c) in &p.terms {
            let mut term = RatFun::constant(c.clone());
            for (a, e) in &m.0 {
                let factor = match a {
                    Atom::Root(b, d) if *e >= *d => {
                        let base = to_ratfun(b, side).expect("canonical root base");
                        let whole = base.powi((*e / *d) as i64, side).expect("nonzero base");
                        whole.mul(&RatFun::poly(Poly::monomial(Monomial::atom(a.clone(), *e % *d), Rational::one())))
                    }
                    _ => RatFun::poly(Poly::monomial(Monomial::atom(a.clone(), *e), Rational::one())),
                };
                term = term.mul(&factor);
            }
            acc = acc.add(&term);
        }
        acc
    };
    let num = expand(&rf.num, side);
    let den = expand(&rf.den, side);
    num.div(&den, side).expect("nonzero denominator")
}

fn apply_func(f: Func, arg: RatFun, side: &mut Vec<Poly>) -> Result<RatFun, Error> {
    if let Some(c) = arg.as_constant() {
        if c.is_zero() {
            match f {
                Func::Sin | Func::Tan | Func::Sqrt => return Ok(RatFun::zero()),
                Func::Cos | Func::Exp => return Ok(RatFun::one()),
                Func::Ln => return Err(Error::Domain("ln(0)".into())),
            }
        }
        if c.is_one() && f == Func::Ln {
            return Ok(RatFun::zero());
        }
    }
    match f {
        Func::Sqrt => power(arg, &Rational::new(BigInt::one(), BigInt::from(2)), side),
        Func::Sin | Func::Tan if arg.leading_is_negative() => {
            Ok(RatFun::atom(Atom::Func(f, render(&arg.neg()))).neg())
        }
        Func::Cos if arg.leading_is_negative() => Ok(RatFun::atom(Atom::Func(f, render(&arg.neg())))),
        _ => Ok(RatFun::atom(Atom::Func(f, render(&arg)))),
    }
}

fn integral_atom(i: &Integral, side: &mut Vec<Poly>) -> Result<RatFun, Error> {
    let lower = to_ratfun(&i.lower, side)?;
    let upper = to_ratfun(&i.upper, side)?;
    if lower == upper {
        return Ok(RatFun::zero());
    }
    let body = to_ratfun(&i.body, side)?;
    if body.is_zero() {
        return Ok(RatFun::zero());
    }
    // Alpha-normalize the bound variable above every dummy used inside.
    let body_expr = render(&body);
    let inner_max = body_expr
        .max_dummy_index()
        .filter(|&k| k >= BOUND_DUMMY_BASE && k != i.dummy.index)
        .map_or(BOUND_DUMMY_BASE, |k| k + 1);
    let bound = VarId::dummy(inner_max);
    let body_expr = if bound == i.dummy {
        body_expr
    } else {
        let map = BTreeMap::from([(i.dummy, Expr::var(bound))]);
        render(&to_ratfun(&body_expr.substitute_raw(&map), side)?)
    };
    Ok(RatFun::atom(Atom::Integral(Integral {
        body: body_expr,
        dummy: bound,
        lower: render(&lower),
        upper: render(&upper),
    })))
}

pub(crate) fn atom_expr(a: &Atom) -> Expr {
    match a {
        Atom::Var(v) => Expr::var(*v),
        Atom::Pi => Expr::pi(),
        Atom::Func(f, arg) => Expr::func(*f, arg.clone()),
        Atom::Root(b, d) => Expr::from_node(Node::Pow(b.clone(), Rational::new(BigInt::one(), BigInt::from(*d)))),
        Atom::Integral(i) => Expr::from_node(Node::Integral(i.clone())),
    }
}

fn render_term(m: &Monomial, c: &Rational) -> Expr {
    let mut factors = Vec::with_capacity(m.0.len() + 1);
    if !c.is_one() || m.is_one() {
        factors.push(Expr::num(c.clone()));
    }
    for (a, e) in &m.0 {
        let base = atom_expr(a);
        factors.push(if *e == 1 { base } else { Expr::from_node(Node::Pow(base, Rational::from_integer(BigInt::from(*e)))) });
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::from_node(Node::Mul(factors))
    }
}

pub(crate) fn render_poly(p: &Poly) -> Expr {
    let mut terms: Vec<Expr> = p.terms.iter().rev().map(|(m, c)| render_term(m, c)).collect();
    match terms.len() {
        0 => Expr::zero(),
        1 => terms.pop().unwrap(),
        _ => Expr::from_node(Node::Add(terms)),
    }
}

pub(crate) fn render(rf: &RatFun) -> Expr {
    if rf.den.is_one() {
        render_poly(&rf.num)
    } else {
        Expr::from_node(Node::Div(render_poly(&rf.num), render_poly(&rf.den)))
    }
}

/// Exact partial derivative, canonical.
pub fn diff(e: &Expr, v: VarId) -> Expr {
    let mut side = Vec::new();
    let rf = to_ratfun(e, &mut side).expect("differentiating an expression with zero denominator");
    render(&diff_ratfun(&rf, v))
}

pub(crate) fn diff_ratfun(rf: &RatFun, v: VarId) -> RatFun {
    let dnum = diff_poly(&rf.num, v);
    if rf.den.is_one() {
        return dnum;
    }
    let dden = diff_poly(&rf.den, v);
    if dden.is_zero() {
        return dnum.mul(&RatFun { num: Poly::one(), den: rf.den.clone() });
    }
    // (n' d - n d') / d^2
    let n = RatFun::poly(rf.num.clone());
    let d = RatFun::poly(rf.den.clone());
    let top = dnum.mul(&d).sub(&n.mul(&dden));
    top.div(&d.mul(&d), &mut Vec::new()).expect("nonzero denominator")
}

fn diff_poly(p: &Poly, v: VarId) -> RatFun {
    let mut acc = RatFun::zero();
    for a in p.atoms() {
        if !a.depends_on(v) {
            continue;
        }
        let da = diff_atom(&a, v);
        if da.is_zero() {
            continue;
        }
        acc = acc.add(&RatFun::poly(p.partial_atom(&a)).mul(&da));
    }
    acc
}

fn diff_atom(a: &Atom, v: VarId) -> RatFun {
    let mut side = Vec::new();
    let mut rf_of = |e: &Expr| to_ratfun(e, &mut side).expect("canonical atom argument");
    match a {
        Atom::Var(w) => {
            if *w == v {
                RatFun::one()
            } else {
                RatFun::zero()
            }
        }
        Atom::Pi => RatFun::zero(),
        Atom::Func(f, arg) => {
            let u = rf_of(arg);
            let du = diff_ratfun(&u, v);
            if du.is_zero() {
                return du;
            }
            let outer = match f {
                Func::Sin => rf_of(&Expr::cos(arg.clone())),
                Func::Cos => rf_of(&Expr::sin(arg.clone())).neg(),
                Func::Tan => {
                    let t = RatFun::atom(a.clone());
                    RatFun::one().add(&t.mul(&t))
                }
                Func::Exp => RatFun::atom(a.clone()),
                Func::Ln => u.recip(&mut Vec::new()).expect("ln of zero"),
                Func::Sqrt => unreachable!("sqrt is canonicalized to a root"),
            };
            outer.mul(&du)
        }
        Atom::Root(b, d) => {
            // d/dv b^(1/d) = b^(1/d) b' / (d b)
            let base = rf_of(b);
            let db = diff_ratfun(&base, v);
            if db.is_zero() {
                return db;
            }
            let inv = base.recip(&mut Vec::new()).expect("nonzero root base");
            RatFun::atom(a.clone())
                .mul(&db)
                .mul(&inv)
                .scale(&Rational::new(BigInt::one(), BigInt::from(*d)))
        }
        Atom::Integral(i) => {
            // Leibniz rule.
            let body = rf_of(&i.body);
            let inner = render(&diff_ratfun(&body, v));
            let mut acc = rf_of(&Expr::integral(inner, i.dummy, i.lower.clone(), i.upper.clone()));
            for (bound, sign) in [(&i.upper, 1i64), (&i.lower, -1i64)] {
                let db = diff_ratfun(&rf_of(bound), v);
                if db.is_zero() {
                    continue;
                }
                let map = BTreeMap::from([(i.dummy, bound.clone())]);
                let at = rf_of(&i.body.substitute_raw(&map));
                acc = acc.add(&at.mul(&db).scale(&Rational::from_integer(BigInt::from(sign))));
            }
            acc
        }
    }
}

/// Simultaneous substitution followed by canonicalization.
pub fn substitute(e: &Expr, map: &BTreeMap<VarId, Expr>) -> Expr {
    canonicalize(&e.substitute_raw(map))
}

/// Numerator and denominator of the canonical form.
pub fn numer_denom(e: &Expr) -> (Expr, Expr) {
    let rf = to_ratfun(e, &mut Vec::new()).expect("nonzero denominator");
    (render_poly(&rf.num), render_poly(&rf.den))
}

/// Whether the canonical form is a polynomial in `v` whose coefficients do
/// not involve `v` through any opaque kernel.
pub fn is_polynomial_in(e: &Expr, v: VarId) -> bool {
    let rf = to_ratfun(e, &mut Vec::new()).expect("nonzero denominator");
    !rf.den.atoms().iter().any(|a| a.depends_on(v))
        && rf.num.atoms().iter().all(|a| matches!(a, Atom::Var(_)) || !a.depends_on(v))
}

/// Coefficients of `e` as a polynomial in `v` (index = power), if it is one.
pub fn polynomial_coefficients(e: &Expr, v: VarId) -> Option<Vec<Expr>> {
    let rf = to_ratfun(e, &mut Vec::new()).ok()?;
    if !is_polynomial_in(e, v) {
        return None;
    }
    let den = RatFun { num: Poly::one(), den: rf.den.clone() };
    Some(
        rf.num
            .univariate(&Atom::Var(v))
            .into_iter()
            .map(|c| render(&RatFun::poly(c).mul(&den)))
            .collect(),
    )
}
