use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;

/// Arbitrary-precision rational used for every exact constant.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Kind of a symbol. The derived order is the global variable order:
/// `t < x < x' < x'' < x''' < ... < dummies < parameters`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Role {
    Time,
    /// Jet coordinate of the given derivative order (0 = position).
    Jet(u8),
    /// Integration variable; free dummies come from `fresh_dummy`, bound ones
    /// are renamed above [`BOUND_DUMMY_BASE`] during canonicalization.
    Dummy,
    Parameter,
}

/// Index offset reserved for dummies bound by integral nodes.
pub const BOUND_DUMMY_BASE: usize = 1 << 20;

/// A variable: role plus zero-based coordinate index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VarId {
    pub role: Role,
    pub index: usize,
}

impl VarId {
    pub const TIME: VarId = VarId { role: Role::Time, index: 0 };

    pub fn jet(order: u8, index: usize) -> Self {
        VarId { role: Role::Jet(order), index }
    }
    pub fn pos(index: usize) -> Self {
        Self::jet(0, index)
    }
    pub fn vel(index: usize) -> Self {
        Self::jet(1, index)
    }
    pub fn acc(index: usize) -> Self {
        Self::jet(2, index)
    }
    pub fn dummy(index: usize) -> Self {
        VarId { role: Role::Dummy, index }
    }
    pub fn param(index: usize) -> Self {
        VarId { role: Role::Parameter, index }
    }

    /// Jet order of the variable, `None` for time, dummies and parameters.
    pub fn jet_order(&self) -> Option<u8> {
        match self.role {
            Role::Jet(k) => Some(k),
            _ => None,
        }
    }

    /// The variable one derivative order higher (`x -> x'`).
    pub fn raised(&self) -> Option<VarId> {
        self.jet_order().map(|k| VarId::jet(k + 1, self.index))
    }

    pub fn is_coordinate(&self) -> bool {
        matches!(self.role, Role::Time | Role::Jet(_))
    }
}

impl fmt::Display for VarId {
    /// Context-free name used in diagnostics; `JetSpace` provides real names.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.role {
            Role::Time => write!(f, "t"),
            Role::Jet(k) => write!(f, "q{}{}", self.index + 1, "'".repeat(k as usize)),
            Role::Dummy => write!(f, "_s{}", self.index),
            Role::Parameter => write!(f, "p{}", self.index + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Definite integral kept as an opaque node (numeric fallback).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Integral {
    pub body: Expr,
    pub dummy: VarId,
    pub lower: Expr,
    pub upper: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(Rational),
    Var(VarId),
    Pi,
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Rational),
    Div(Expr, Expr),
    Func(Func, Expr),
    Integral(Integral),
}

/// Immutable, cheaply clonable symbolic expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn num(q: Rational) -> Expr {
        Expr::from_node(Node::Num(q))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(int(n))
    }

    pub fn rat(n: i64, d: i64) -> Expr {
        Expr::num(rat(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(v: VarId) -> Expr {
        Expr::from_node(Node::Var(v))
    }

    pub fn pi() -> Expr {
        Expr::from_node(Node::Pi)
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        Expr::from_node(Node::Func(f, arg))
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::func(Func::Sin, arg)
    }
    pub fn cos(arg: Expr) -> Expr {
        Expr::func(Func::Cos, arg)
    }
    pub fn exp(arg: Expr) -> Expr {
        Expr::func(Func::Exp, arg)
    }
    pub fn ln(arg: Expr) -> Expr {
        Expr::func(Func::Ln, arg)
    }
    pub fn sqrt(arg: Expr) -> Expr {
        Expr::func(Func::Sqrt, arg)
    }

    pub fn pow(&self, q: Rational) -> Expr {
        if q.is_one() {
            return self.clone();
        }
        Expr::from_node(Node::Pow(self.clone(), q))
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow(int(n))
    }

    pub fn integral(body: Expr, dummy: VarId, lower: Expr, upper: Expr) -> Expr {
        Expr::from_node(Node::Integral(Integral { body, dummy, lower, upper }))
    }

    /// Sum without any simplification beyond flattening and dropping literal zeros.
    pub fn sum<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut terms = Vec::new();
        for e in items {
            match e.node() {
                Node::Add(inner) => terms.extend(inner.iter().cloned()),
                Node::Num(q) if q.is_zero() => {}
                _ => terms.push(e),
            }
        }
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::from_node(Node::Add(terms)),
        }
    }

    /// Product with flattening; a literal zero factor collapses the product.
    pub fn product<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut factors = Vec::new();
        for e in items {
            match e.node() {
                Node::Mul(inner) => factors.extend(inner.iter().cloned()),
                Node::Num(q) if q.is_one() => {}
                Node::Num(q) if q.is_zero() => return Expr::zero(),
                _ => factors.push(e),
            }
        }
        match factors.len() {
            0 => Expr::one(),
            1 => factors.pop().unwrap(),
            _ => Expr::from_node(Node::Mul(factors)),
        }
    }

    /// Quotient node. Panics on a literal zero denominator; parsed input is
    /// validated before it reaches this point.
    pub fn quotient(num: Expr, den: Expr) -> Expr {
        assert!(!den.is_literal_zero(), "division by the literal zero constant");
        if den.is_literal_one() {
            return num;
        }
        Expr::from_node(Node::Div(num, den))
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self.node() {
            Node::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_literal_zero(&self) -> bool {
        self.as_num().is_some_and(|q| q.is_zero())
    }

    pub fn is_literal_one(&self) -> bool {
        self.as_num().is_some_and(|q| q.is_one())
    }

    pub fn as_var(&self) -> Option<VarId> {
        match self.node() {
            Node::Var(v) => Some(*v),
            _ => None,
        }
    }

    /// Free variables (dummies bound by integral nodes excluded).
    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<VarId>) {
        match self.node() {
            Node::Num(_) | Node::Pi => {}
            Node::Var(v) => {
                out.insert(*v);
            }
            Node::Add(xs) | Node::Mul(xs) => xs.iter().for_each(|x| x.collect_free(out)),
            Node::Pow(b, _) => b.collect_free(out),
            Node::Div(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Node::Func(_, a) => a.collect_free(out),
            Node::Integral(i) => {
                let mut inner = BTreeSet::new();
                i.body.collect_free(&mut inner);
                inner.remove(&i.dummy);
                out.extend(inner);
                i.lower.collect_free(out);
                i.upper.collect_free(out);
            }
        }
    }

    pub fn depends_on(&self, v: VarId) -> bool {
        self.free_vars().contains(&v)
    }

    /// True when the tree contains a function application, a non-integer
    /// power or an integral node, i.e. lies outside the rational fragment.
    pub fn is_transcendental(&self) -> bool {
        match self.node() {
            Node::Num(_) | Node::Var(_) | Node::Pi => false,
            Node::Add(xs) | Node::Mul(xs) => xs.iter().any(Expr::is_transcendental),
            Node::Pow(b, q) => !q.is_integer() || b.is_transcendental(),
            Node::Div(a, b) => a.is_transcendental() || b.is_transcendental(),
            Node::Func(..) | Node::Integral(_) => true,
        }
    }

    pub fn contains_integral(&self) -> bool {
        match self.node() {
            Node::Num(_) | Node::Var(_) | Node::Pi => false,
            Node::Add(xs) | Node::Mul(xs) => xs.iter().any(Expr::contains_integral),
            Node::Pow(b, _) => b.contains_integral(),
            Node::Div(a, b) => a.contains_integral() || b.contains_integral(),
            Node::Func(_, a) => a.contains_integral(),
            Node::Integral(_) => true,
        }
    }

    /// Largest dummy index occurring anywhere (free or bound), if any.
    pub(crate) fn max_dummy_index(&self) -> Option<usize> {
        match self.node() {
            Node::Num(_) | Node::Pi => None,
            Node::Var(v) => (v.role == Role::Dummy).then_some(v.index),
            Node::Add(xs) | Node::Mul(xs) => xs.iter().filter_map(Expr::max_dummy_index).max(),
            Node::Pow(b, _) => b.max_dummy_index(),
            Node::Div(a, b) => a.max_dummy_index().max(b.max_dummy_index()),
            Node::Func(_, a) => a.max_dummy_index(),
            Node::Integral(i) => [
                Some(i.dummy.index),
                i.body.max_dummy_index(),
                i.lower.max_dummy_index(),
                i.upper.max_dummy_index(),
            ]
            .into_iter()
            .flatten()
            .max(),
        }
    }

    /// Simultaneous substitution on the tree, without canonicalization.
    /// Bound dummies are renamed when a replacement would capture them.
    pub fn substitute_raw(&self, map: &BTreeMap<VarId, Expr>) -> Expr {
        if map.is_empty() {
            return self.clone();
        }
        match self.node() {
            Node::Num(_) | Node::Pi => self.clone(),
            Node::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Node::Add(xs) => Expr::sum(xs.iter().map(|x| x.substitute_raw(map))),
            Node::Mul(xs) => Expr::product(xs.iter().map(|x| x.substitute_raw(map))),
            Node::Pow(b, q) => b.substitute_raw(map).pow(q.clone()),
            Node::Div(a, b) => Expr::from_node(Node::Div(a.substitute_raw(map), b.substitute_raw(map))),
            Node::Func(f, a) => Expr::func(*f, a.substitute_raw(map)),
            Node::Integral(i) => {
                let lower = i.lower.substitute_raw(map);
                let upper = i.upper.substitute_raw(map);
                let mut inner: BTreeMap<VarId, Expr> =
                    map.iter().filter(|(k, _)| **k != i.dummy).map(|(k, v)| (*k, v.clone())).collect();
                let captures = inner.values().any(|e| e.depends_on(i.dummy));
                let (dummy, body) = if captures {
                    let top = inner
                        .values()
                        .chain([&i.body])
                        .filter_map(Expr::max_dummy_index)
                        .max()
                        .unwrap_or(0);
                    let fresh = VarId::dummy(top.max(i.dummy.index) + 1);
                    inner.insert(i.dummy, Expr::var(fresh));
                    (fresh, i.body.substitute_raw(&inner))
                } else {
                    (i.dummy, i.body.substitute_raw(&inner))
                };
                Expr::integral(body, dummy, lower, upper)
            }
        }
    }

    /// Number of nodes, used for cheap size heuristics.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Num(_) | Node::Var(_) | Node::Pi => 1,
            Node::Add(xs) | Node::Mul(xs) => 1 + xs.iter().map(Expr::size).sum::<usize>(),
            Node::Pow(b, _) => 1 + b.size(),
            Node::Div(a, b) => 1 + a.size() + b.size(),
            Node::Func(_, a) => 1 + a.size(),
            Node::Integral(i) => 1 + i.body.size() + i.lower.size() + i.upper.size(),
        }
    }
}

/// A dummy variable not occurring in any of the given expressions.
pub fn fresh_dummy<'a, I: IntoIterator<Item = &'a Expr>>(exprs: I) -> VarId {
    let top = exprs
        .into_iter()
        .filter_map(|e| e.max_dummy_index().filter(|&i| i < BOUND_DUMMY_BASE))
        .max();
    VarId::dummy(top.map_or(0, |i| i + 1))
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<VarId> for Expr {
    fn from(v: VarId) -> Self {
        Expr::var(v)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Self {
        Expr::num(q)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a, b]));
binop!(Sub, sub, |a, b| Expr::sum([a, -b]));
binop!(Mul, mul, |a, b| Expr::product([a, b]));
binop!(Div, div, Expr::quotient);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self.node() {
            Node::Num(q) => Expr::num(-q.clone()),
            _ => Expr::product([Expr::int(-1), self]),
        }
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

