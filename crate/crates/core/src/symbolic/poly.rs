//! Sparse multivariate polynomials and reduced rational functions over ℚ.
//!
//! Indeterminates are [`Atom`]s: jet variables, `pi`, and opaque kernels
//! (function applications, fractional roots, integral nodes) whose arguments
//! are themselves canonical. Monomials are ordered graded-lexicographically.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, Integer, One, Signed, Zero};

use super::expr::{Expr, Func, Integral, Rational, VarId};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    Var(VarId),
    Pi,
    Func(Func, Expr),
    /// `base^(1/d)` with `d >= 2`.
    Root(Expr, u32),
    Integral(Integral),
}

impl Atom {
    pub(crate) fn depends_on(&self, v: VarId) -> bool {
        match self {
            Atom::Var(w) => *w == v,
            Atom::Pi => false,
            Atom::Func(_, e) | Atom::Root(e, _) => e.depends_on(v),
            Atom::Integral(i) => Expr::from_node(super::expr::Node::Integral(i.clone())).depends_on(v),
        }
    }
}

/// Power product, atoms strictly increasing, exponents positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub(crate) struct Monomial(pub(crate) Vec<(Atom, u32)>);

impl Monomial {
    pub(crate) fn one() -> Self {
        Monomial(Vec::new())
    }

    pub(crate) fn atom(a: Atom, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(a, e)])
        }
    }

    pub(crate) fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn exponent(&self, a: &Atom) -> u32 {
        self.0.iter().find(|(b, _)| b == a).map_or(0, |(_, e)| *e)
    }

    pub(crate) fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub(crate) fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::new();
        let mut j = 0;
        for (a, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *a {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *a {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((a.clone(), e - f)),
                }
            } else {
                out.push((a.clone(), *e));
            }
        }
        (j == other.0.len()).then_some(Monomial(out))
    }

    /// Remove atom `a`, returning its exponent and the cofactor.
    pub(crate) fn split_off(&self, a: &Atom) -> (u32, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(b, f)| {
                if b == a {
                    e = *f;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (e, Monomial(rest))
    }
}

impl Ord for Monomial {
    /// Graded order; ties broken lexicographically with earlier atoms weighing more.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (mut i, mut j) = (0, 0);
            loop {
                match (self.0.get(i), other.0.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some((a, e)), Some((b, f))) => match a.cmp(b) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => match e.cmp(f) {
                            Ordering::Equal => {
                                i += 1;
                                j += 1;
                            }
                            o => return o,
                        },
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub(crate) struct Poly {
    pub(crate) terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly::default()
    }

    pub(crate) fn constant(q: Rational) -> Self {
        let mut p = Poly::zero();
        if !q.is_zero() {
            p.terms.insert(Monomial::one(), q);
        }
        p
    }

    pub(crate) fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub(crate) fn atom(a: Atom) -> Self {
        Poly::monomial(Monomial::atom(a, 1), Rational::one())
    }

    pub(crate) fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub(crate) fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub(crate) fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub(crate) fn atoms(&self) -> BTreeSet<Atom> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(a, _)| a.clone())).collect()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub(crate) fn scale(&self, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub(crate) fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        Poly { terms: self.terms.iter().map(|(n, d)| (n.mul(m), d * c)).collect() }
    }

    pub(crate) fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub(crate) fn degree_in(&self, a: &Atom) -> u32 {
        self.terms.keys().map(|m| m.exponent(a)).max().unwrap_or(0)
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `a`.
    pub(crate) fn univariate(&self, a: &Atom) -> Vec<Poly> {
        let deg = self.degree_in(a) as usize;
        let mut coeffs = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(a);
            coeffs[e as usize].add_term(rest, c.clone());
        }
        coeffs
    }

    /// Partial derivative with respect to an atom treated as independent.
    pub(crate) fn partial_atom(&self, a: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(a);
            if e > 0 {
                out.add_term(rest.mul(&Monomial::atom(a.clone(), e - 1)), c * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Exact quotient when `d` divides `self`.
    pub(crate) fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut q = Poly::zero();
        let mut r = self.clone();
        while let Some((rm, rc)) = r.leading() {
            let m = rm.div(&dm)?;
            let c = rc / &dc;
            r = r.sub(&d.mul_term(&m, &c));
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Scale so the leading coefficient is one.
    pub(crate) fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if !c.is_one() => {
                let inv = c.recip();
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }

    /// Scale to integer coefficients with unit content and positive leading coefficient.
    fn integer_primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(&(c.numer() * (&lcm / c.denom())));
        }
        let mut factor = Rational::new(lcm, g);
        if self.leading().unwrap().1.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    fn max_atom_with(&self, other: &Poly) -> Option<Atom> {
        let a = self.atoms().into_iter().next_back();
        let b = other.atoms().into_iter().next_back();
        a.max(b)
    }
}

/// Greatest common divisor, normalized monic (unique up to the monomial order).
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let v = a.max_atom_with(b).expect("non-constant polynomials have atoms");
    let da = a.degree_in(&v);
    let db = b.degree_in(&v);
    if da == 0 {
        return gcd(a, &content(b, &v));
    }
    if db == 0 {
        return gcd(&content(a, &v), b);
    }
    let ca = content(a, &v);
    let cb = content(b, &v);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    let gc = gcd(&ca, &cb);
    let (mut r0, mut r1) = if da >= db { (pa, pb) } else { (pb, pa) };
    loop {
        let r = pseudo_rem(&r0, &r1, &v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(&v) == 0 {
            return gc.monic();
        }
        r0 = r1;
        r1 = primitive(&r, &v);
    }
    gc.mul(&primitive(&r1, &v)).monic()
}

/// Content with respect to `v`: gcd of the coefficients in the remaining atoms.
fn content(p: &Poly, v: &Atom) -> Poly {
    let mut g = Poly::zero();
    for c in p.univariate(v).into_iter().filter(|c| !c.is_zero()) {
        g = gcd(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive(p: &Poly, v: &Atom) -> Poly {
    let c = content(p, v);
    p.exact_div(&c).expect("content divides").integer_primitive()
}

fn pseudo_rem(a: &Poly, b: &Poly, v: &Atom) -> Poly {
    let db = b.degree_in(v);
    let bc = b.univariate(v);
    let lb = bc[db as usize].clone();
    let mut r = a.clone();
    loop {
        let dr = r.degree_in(v);
        if r.is_zero() || dr < db {
            return r;
        }
        let lr = r.univariate(v)[dr as usize].clone();
        let shift = Poly::monomial(Monomial::atom(v.clone(), dr - db), Rational::one());
        r = lb.mul(&r).sub(&lr.mul(&shift).mul(b));
        r = r.integer_primitive();
    }
}

/// Reduced quotient of polynomials; `den` is monic and coprime to `num`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct RatFun {
    pub(crate) num: Poly,
    pub(crate) den: Poly,
}

impl RatFun {
    pub(crate) fn zero() -> Self {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }

    pub(crate) fn one() -> Self {
        RatFun::constant(Rational::one())
    }

    pub(crate) fn constant(q: Rational) -> Self {
        RatFun { num: Poly::constant(q), den: Poly::one() }
    }

    pub(crate) fn poly(p: Poly) -> Self {
        RatFun { num: p, den: Poly::one() }
    }

    pub(crate) fn atom(a: Atom) -> Self {
        RatFun::poly(Poly::atom(a))
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub(crate) fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Build a reduced quotient; records non-constant cancelled factors.
    pub(crate) fn new(num: Poly, den: Poly, cancelled: &mut Vec<Poly>) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(RatFun::zero());
        }
        if let Some(c) = den.as_constant() {
            return Some(RatFun { num: num.scale(&c.recip()), den: Poly::one() });
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            cancelled.push(g.clone());
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        let lc = den.leading().unwrap().1.clone();
        let inv = lc.recip();
        Some(RatFun { num: num.scale(&inv), den: den.scale(&inv) })
    }

    fn build(num: Poly, den: Poly) -> Self {
        RatFun::new(num, den, &mut Vec::new()).expect("nonzero denominator")
    }

    pub(crate) fn add(&self, other: &RatFun) -> RatFun {
        if self.den == other.den {
            if self.den.is_one() {
                return RatFun::poly(self.num.add(&other.num));
            }
            return RatFun::build(self.num.add(&other.num), self.den.clone());
        }
        RatFun::build(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub(crate) fn neg(&self) -> RatFun {
        RatFun { num: self.num.neg(), den: self.den.clone() }
    }

    pub(crate) fn sub(&self, other: &RatFun) -> RatFun {
        self.add(&other.neg())
    }

    pub(crate) fn mul(&self, other: &RatFun) -> RatFun {
        if self.den.is_one() && other.den.is_one() {
            return RatFun::poly(self.num.mul(&other.num));
        }
        RatFun::build(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub(crate) fn scale(&self, q: &Rational) -> RatFun {
        RatFun { num: self.num.scale(q), den: self.den.clone() }
    }

    pub(crate) fn recip(&self, cancelled: &mut Vec<Poly>) -> Option<RatFun> {
        RatFun::new(self.den.clone(), self.num.clone(), cancelled)
    }

    pub(crate) fn div(&self, other: &RatFun, cancelled: &mut Vec<Poly>) -> Option<RatFun> {
        if other.is_zero() {
            return None;
        }
        RatFun::new(self.num.mul(&other.den), self.den.mul(&other.num), cancelled)
    }

    pub(crate) fn powi(&self, e: i64, cancelled: &mut Vec<Poly>) -> Option<RatFun> {
        let base = if e < 0 { self.recip(cancelled)? } else { self.clone() };
        let n = e.unsigned_abs() as u32;
        Some(RatFun { num: base.num.pow(n), den: base.den.pow(n) })
    }

    /// Sign of the leading numerator coefficient (denominators are monic).
    pub(crate) fn leading_is_negative(&self) -> bool {
        self.num.leading().is_some_and(|(_, c)| c.is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::expr::int;

    fn x(i: usize) -> Poly {
        Poly::atom(Atom::Var(VarId::pos(i)))
    }

    fn c(n: i64) -> Poly {
        Poly::constant(int(n))
    }

    #[test]
    fn gcd_of_products_recovers_common_factor() {
        let f = x(0).add(&x(1)).add(&c(1));
        let g = x(0).mul(&x(0)).sub(&x(1));
        let h = x(1).mul(&x(1)).add(&c(3));
        let a = f.mul(&g);
        let b = f.mul(&h).scale(&int(6));
        assert_eq!(gcd(&a, &b), f.monic());
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let a = x(0).mul(&x(0)).add(&c(1));
        let b = x(0).add(&x(1));
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn exact_division_detects_non_divisor() {
        let a = x(0).mul(&x(1)).add(&c(1));
        assert!(a.exact_div(&x(0)).is_none());
        let b = x(0).mul(&x(1)).mul(&x(1));
        assert_eq!(b.exact_div(&x(1)).unwrap(), x(0).mul(&x(1)));
    }

    #[test]
    fn ratfun_cancels_and_records_side_condition() {
        let mut side = Vec::new();
        let r = RatFun::new(x(0).mul(&x(1)), x(0), &mut side).unwrap();
        assert_eq!(r, RatFun::poly(x(1)));
        assert_eq!(side, vec![x(0)]);
    }

    #[test]
    fn grlex_order_puts_higher_degree_last() {
        let a = Monomial(vec![(Atom::Var(VarId::pos(0)), 2)]);
        let b = Monomial(vec![(Atom::Var(VarId::pos(0)), 1), (Atom::Var(VarId::vel(0)), 2)]);
        let c = Monomial(vec![(Atom::Var(VarId::vel(0)), 2)]);
        assert!(a < b);
        assert!(c < a, "x^2 ranks above x'^2");
    }
}
