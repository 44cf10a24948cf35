//! Differential forms of degree 0–3 over jet coordinates.
//!
//! A form is a sparse map from strictly increasing multi-indices of cobasis
//! elements to canonical coefficients. One global order is used in both
//! bases: `dt < dx^1 < ... < dx^m < dx'^1 < ... < dx''^m < ...`; the contact
//! basis reuses the same slots for `ω^i_(k) = dx^i_(k) - x^i_(k+1) dt`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::jet::{prolong, JetSpace};
use crate::symbolic::{self, canonicalize, diff, is_zero, Expr, Role, VarId, ZeroVerdict};
use crate::{Error, Result};

pub const MAX_DEGREE: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisMode {
    /// `dt, dx^i, dx'^i, dx''^i, ...`
    Coordinate,
    /// `dt, ω^i, ω'^i, ω''^i, ...`
    Contact,
}

/// One cobasis element; `Slot { order: k, index: i }` is `dx^i_(k)` or
/// `ω^i_(k)` depending on the basis mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    Dt,
    Slot { order: u8, index: usize },
}

impl Basis {
    pub fn dx(order: u8, index: usize) -> Basis {
        Basis::Slot { order, index }
    }

    /// Cobasis element dual to a coordinate variable.
    pub fn of_var(v: VarId) -> Option<Basis> {
        match v.role {
            Role::Time => Some(Basis::Dt),
            Role::Jet(order) => Some(Basis::Slot { order, index: v.index }),
            _ => None,
        }
    }
}

/// Sort a multi-index, returning the permutation sign, or `None` when an
/// element repeats.
fn normalize(mut idx: Vec<Basis>) -> Option<(Vec<Basis>, i64)> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((idx, sign))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffForm {
    degree: usize,
    mode: BasisMode,
    terms: BTreeMap<Vec<Basis>, Expr>,
}

impl DiffForm {
    pub fn zero(degree: usize, mode: BasisMode) -> DiffForm {
        DiffForm { degree, mode, terms: BTreeMap::new() }
    }

    pub fn function(f: Expr) -> DiffForm {
        DiffForm::zero(0, BasisMode::Coordinate).with_term(Vec::new(), f)
    }

    /// `f · b` for a single cobasis element.
    pub fn one_form(b: Basis, f: Expr, mode: BasisMode) -> DiffForm {
        DiffForm::zero(1, mode).with_term(vec![b], f)
    }

    /// Build from unsorted multi-indices; terms are accumulated with signs.
    pub fn from_terms<I>(degree: usize, mode: BasisMode, terms: I) -> Result<DiffForm>
    where
        I: IntoIterator<Item = (Vec<Basis>, Expr)>,
    {
        if degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow(degree));
        }
        let mut out = DiffForm::zero(degree, mode);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::DegreeMismatch(idx.len(), degree));
            }
            out.accumulate(idx, c);
        }
        Ok(out.normalized())
    }

    fn with_term(mut self, idx: Vec<Basis>, c: Expr) -> DiffForm {
        self.accumulate(idx, c);
        self.normalized()
    }

    fn accumulate(&mut self, idx: Vec<Basis>, c: Expr) {
        if let Some((idx, sign)) = normalize(idx) {
            let c = if sign < 0 { -c } else { c };
            let slot = self.terms.entry(idx).or_insert_with(Expr::zero);
            *slot = Expr::sum([slot.clone(), c]);
        }
    }

    fn normalized(mut self) -> DiffForm {
        self.terms = std::mem::take(&mut self.terms)
            .into_iter()
            .map(|(k, c)| (k, canonicalize(&c)))
            .filter(|(_, c)| !c.is_literal_zero())
            .collect();
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn mode(&self) -> BasisMode {
        self.mode
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Basis>, Expr> {
        &self.terms
    }

    /// Coefficient of a (sorted) multi-index, zero if absent.
    pub fn coeff(&self, idx: &[Basis]) -> Expr {
        match normalize(idx.to_vec()) {
            Some((k, sign)) => {
                let c = self.terms.get(&k).cloned().unwrap_or_else(Expr::zero);
                if sign < 0 {
                    canonicalize(&-c)
                } else {
                    c
                }
            }
            None => Expr::zero(),
        }
    }

    /// The scalar of a 0-form.
    pub fn as_function(&self) -> Option<Expr> {
        (self.degree == 0).then(|| self.coeff(&[]))
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest jet order among coefficients and cobasis slots.
    pub fn jet_order(&self) -> u8 {
        self.terms
            .iter()
            .flat_map(|(k, c)| {
                k.iter()
                    .map(|b| match b {
                        Basis::Dt => 0,
                        Basis::Slot { order, .. } => *order,
                    })
                    .chain([crate::jet::jet_order(c)])
            })
            .max()
            .unwrap_or(0)
    }

    pub fn in_mode(&self, mode: BasisMode) -> DiffForm {
        match (self.mode, mode) {
            (BasisMode::Coordinate, BasisMode::Contact) => self.to_contact(),
            (BasisMode::Contact, BasisMode::Coordinate) => self.to_coordinate(),
            _ => self.clone(),
        }
    }

    pub fn add(&self, other: &DiffForm) -> Result<DiffForm> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        let other = other.in_mode(self.mode);
        let mut out = self.clone();
        for (k, c) in other.terms {
            out.accumulate(k, c);
        }
        Ok(out.normalized())
    }

    pub fn sub(&self, other: &DiffForm) -> Result<DiffForm> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffForm {
        self.scale(&Expr::int(-1))
    }

    pub fn scale(&self, f: &Expr) -> DiffForm {
        let mut out = DiffForm::zero(self.degree, self.mode);
        for (k, c) in &self.terms {
            out.accumulate(k.clone(), f * c);
        }
        out.normalized()
    }

    pub fn wedge(&self, other: &DiffForm) -> Result<DiffForm> {
        let degree = self.degree + other.degree;
        if degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow(degree));
        }
        let other = other.in_mode(self.mode);
        let mut out = DiffForm::zero(degree, self.mode);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut idx = ka.clone();
                idx.extend(kb.iter().copied());
                out.accumulate(idx, ca * cb);
            }
        }
        Ok(out.normalized())
    }

    /// `df` of a function as a coordinate-basis 1-form.
    pub fn d_function(f: &Expr) -> DiffForm {
        let mut out = DiffForm::zero(1, BasisMode::Coordinate);
        for v in f.free_vars() {
            if let Some(b) = Basis::of_var(v) {
                out.accumulate(vec![b], diff(f, v));
            }
        }
        out.normalized()
    }

    /// Exterior derivative; the result is expressed in the input's mode.
    pub fn d(&self) -> Result<DiffForm> {
        if self.degree >= MAX_DEGREE {
            return Err(Error::DegreeOverflow(self.degree + 1));
        }
        let coord = self.to_coordinate();
        let mut out = DiffForm::zero(self.degree + 1, BasisMode::Coordinate);
        for (k, c) in &coord.terms {
            for (b, dc) in DiffForm::d_function(c).terms {
                let mut idx = b;
                idx.extend(k.iter().copied());
                out.accumulate(idx, dc);
            }
        }
        Ok(out.normalized().in_mode(self.mode))
    }

    /// Interior product with the coordinate vector field `∂/∂v`.
    pub fn contract(&self, v: VarId) -> Result<DiffForm> {
        if self.degree == 0 {
            return Err(Error::Validation("cannot contract a 0-form".into()));
        }
        let Some(target) = Basis::of_var(v) else {
            return Ok(DiffForm::zero(self.degree - 1, self.mode));
        };
        let coord = self.to_coordinate();
        let mut out = DiffForm::zero(self.degree - 1, BasisMode::Coordinate);
        for (k, c) in &coord.terms {
            if let Some(pos) = k.iter().position(|b| *b == target) {
                let mut rest = k.clone();
                rest.remove(pos);
                let c = if pos % 2 == 1 { -c.clone() } else { c.clone() };
                out.accumulate(rest, c);
            }
        }
        Ok(out.normalized().in_mode(self.mode))
    }

    /// Replace every slot with a linear combination of 1-forms.
    fn map_slots(&self, mode: BasisMode, image: impl Fn(Basis) -> DiffForm) -> DiffForm {
        let mut out = DiffForm::zero(self.degree, mode);
        for (k, c) in &self.terms {
            let mut acc = DiffForm::function(c.clone());
            acc.mode = mode;
            for b in k {
                let mut img = image(*b);
                img.mode = mode;
                acc = acc.wedge(&img).expect("degree bounded by input");
            }
            for (kk, cc) in acc.terms {
                out.accumulate(kk, cc);
            }
        }
        out.normalized()
    }

    pub fn to_contact(&self) -> DiffForm {
        if self.mode == BasisMode::Contact {
            return self.clone();
        }
        self.map_slots(BasisMode::Contact, |b| match b {
            Basis::Dt => DiffForm::one_form(Basis::Dt, Expr::one(), BasisMode::Contact),
            Basis::Slot { order, index } => {
                // dx_(k) = ω_(k) + x_(k+1) dt
                let mut f = DiffForm::one_form(b, Expr::one(), BasisMode::Contact);
                f.accumulate(vec![Basis::Dt], Expr::var(VarId::jet(order + 1, index)));
                f.normalized()
            }
        })
    }

    pub fn to_coordinate(&self) -> DiffForm {
        if self.mode == BasisMode::Coordinate {
            return self.clone();
        }
        self.map_slots(BasisMode::Coordinate, |b| match b {
            Basis::Dt => DiffForm::one_form(Basis::Dt, Expr::one(), BasisMode::Coordinate),
            Basis::Slot { order, index } => {
                let mut f = DiffForm::one_form(b, Expr::one(), BasisMode::Coordinate);
                f.accumulate(vec![Basis::Dt], -Expr::var(VarId::jet(order + 1, index)));
                f.normalized()
            }
        })
    }

    /// Horizontalization `h`: `dx_(k) -> x_(k+1) dt`, contact forms vanish.
    /// Returned in coordinate mode.
    pub fn horizontalize(&self) -> Result<DiffForm> {
        if self.degree > 1 {
            return Err(Error::DegreeOverflow(self.degree));
        }
        if self.degree == 0 {
            return Ok(self.clone());
        }
        let contact = self.to_contact();
        Ok(DiffForm::one_form(Basis::Dt, contact.coeff(&[Basis::Dt]), BasisMode::Coordinate))
    }

    /// The coefficient of `dt` in `h(self)`, i.e. the Lagrange function of a
    /// horizontal 1-form.
    pub fn horizontal_coefficient(&self) -> Result<Expr> {
        Ok(self.horizontalize()?.coeff(&[Basis::Dt]))
    }

    /// Split a 2-form into its 1-contact part (`ω ∧ dt` terms) and 2-contact
    /// part (`ω ∧ ω` terms), both in the contact basis.
    pub fn contact_split(&self) -> Result<(DiffForm, DiffForm)> {
        if self.degree != 2 {
            return Err(Error::DegreeMismatch(self.degree, 2));
        }
        let c = self.to_contact();
        let mut p1 = DiffForm::zero(2, BasisMode::Contact);
        let mut p2 = DiffForm::zero(2, BasisMode::Contact);
        for (k, coef) in c.terms {
            if k.contains(&Basis::Dt) {
                p1.terms.insert(k, coef);
            } else {
                p2.terms.insert(k, coef);
            }
        }
        Ok((p1, p2))
    }

    /// Substitute into coefficients only (cobasis untouched).
    pub fn substitute_coefficients(&self, map: &BTreeMap<VarId, Expr>) -> DiffForm {
        let mut out = DiffForm::zero(self.degree, self.mode);
        for (k, c) in &self.terms {
            out.accumulate(k.clone(), c.substitute_raw(map));
        }
        out.normalized()
    }

    /// Drop every term whose multi-index contains a slot matching `pred`.
    pub fn drop_slots(&self, pred: impl Fn(Basis) -> bool) -> DiffForm {
        let mut out = self.clone();
        out.terms.retain(|k, _| !k.iter().any(|b| pred(*b)));
        out
    }

    /// Apply a coefficient map (e.g. integration) to every term.
    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Result<Expr>) -> Result<DiffForm> {
        let mut out = DiffForm::zero(self.degree, self.mode);
        for (k, c) in &self.terms {
            out.accumulate(k.clone(), f(c)?);
        }
        Ok(out.normalized())
    }

    /// Pull back along a point transformation: `self` is read in the barred
    /// chart and the result is expressed in the unbarred one.
    pub fn pullback(&self, phi: &PointTransform) -> Result<DiffForm> {
        let coord = self.to_coordinate();
        let order = coord.jet_order().max(1);
        let images = prolong(&phi.forward, order)?;
        let mut out = DiffForm::zero(self.degree, BasisMode::Coordinate);
        for (k, c) in &coord.terms {
            let mut acc = DiffForm::function(c.substitute_raw(&images));
            for b in k {
                let img = match b {
                    Basis::Dt => DiffForm::one_form(Basis::Dt, Expr::one(), BasisMode::Coordinate),
                    Basis::Slot { order, index } => DiffForm::d_function(&images[&VarId::jet(*order, *index)]),
                };
                acc = acc.wedge(&img)?;
            }
            for (kk, cc) in acc.terms {
                out.accumulate(kk, cc);
            }
        }
        Ok(out.normalized().in_mode(self.mode))
    }

    /// Combined verdict that every coefficient vanishes.
    pub fn zero_verdict(&self) -> ZeroVerdict {
        let vs: Vec<ZeroVerdict> = self.terms.values().map(is_zero).collect();
        ZeroVerdict::worst(&vs)
    }

    /// Deterministic text rendering with the coordinate names of `space`.
    pub fn display(&self, space: &JetSpace) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (n, (k, c)) in self.terms.iter().enumerate() {
            // Written with dt last, as in `ε ω∧dt`.
            let mut k = k.clone();
            let mut c = c.clone();
            if k.len() > 1 && k[0] == Basis::Dt {
                k.rotate_left(1);
                if k.len() % 2 == 0 {
                    c = canonicalize(&-c);
                }
            }
            let basis: Vec<String> = k.iter().map(|b| basis_name(*b, self.mode, space)).collect();
            let basis = basis.join("∧");
            let mut coef = space.print(&c);
            let neg = coef.starts_with('-') && !coef[1..].contains([' ']);
            if neg {
                coef.remove(0);
            }
            let coef = if coef.contains(' ') { format!("({coef})") } else { coef };
            let body = match (coef.as_str(), basis.is_empty()) {
                (_, true) => coef.clone(),
                ("1", false) => basis,
                (_, false) => format!("{coef}*{basis}"),
            };
            match (n, neg) {
                (0, false) => out.push_str(&body),
                (0, true) => write!(out, "-{body}").unwrap(),
                (_, false) => write!(out, " + {body}").unwrap(),
                (_, true) => write!(out, " - {body}").unwrap(),
            }
        }
        out
    }
}

fn basis_name(b: Basis, mode: BasisMode, space: &JetSpace) -> String {
    match b {
        Basis::Dt => "dt".into(),
        Basis::Slot { order, index } => {
            let primes = "'".repeat(order as usize);
            let name = space.coords().get(index).cloned().unwrap_or_else(|| format!("q{}", index + 1));
            match mode {
                BasisMode::Coordinate => format!("d{name}{primes}"),
                BasisMode::Contact => format!("ω{primes}_{name}"),
            }
        }
    }
}

/// A point transformation `x̄ = φ(x)` with its inverse `x = ψ(x̄)`.
///
/// Both charts use the same variable identifiers; which chart an expression
/// lives in is a matter of interpretation.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTransform {
    pub forward: Vec<Expr>,
    pub inverse: Vec<Expr>,
}

impl PointTransform {
    /// Validate that both maps depend on positions only and compose to the
    /// identity in both orders.
    pub fn new(forward: Vec<Expr>, inverse: Vec<Expr>) -> Result<PointTransform> {
        if forward.len() != inverse.len() {
            return Err(Error::Validation("coordinate map and inverse differ in dimension".into()));
        }
        let positions_only = |e: &Expr| e.free_vars().iter().all(|v| v.role == Role::Jet(0) && v.index < forward.len());
        if !forward.iter().chain(&inverse).all(positions_only) {
            return Err(Error::Validation("point transformations may depend on positions only".into()));
        }
        let t = PointTransform { forward, inverse };
        let compose = |outer: &[Expr], inner: &[Expr]| -> bool {
            let map: BTreeMap<VarId, Expr> = inner.iter().enumerate().map(|(i, e)| (VarId::pos(i), e.clone())).collect();
            outer
                .iter()
                .enumerate()
                .all(|(i, e)| is_zero(&(e.substitute_raw(&map) - Expr::var(VarId::pos(i)))).is_zero())
        };
        if !compose(&t.forward, &t.inverse) || !compose(&t.inverse, &t.forward) {
            return Err(Error::NonInvertiblePair);
        }
        Ok(t)
    }

    pub fn identity(m: usize) -> PointTransform {
        let id: Vec<Expr> = (0..m).map(|i| Expr::var(VarId::pos(i))).collect();
        PointTransform { forward: id.clone(), inverse: id }
    }

    pub fn inverted(&self) -> PointTransform {
        PointTransform { forward: self.inverse.clone(), inverse: self.forward.clone() }
    }

    pub fn dim(&self) -> usize {
        self.forward.len()
    }

    /// Prolonged forward map up to `order`.
    pub fn prolonged(&self, order: u8) -> Result<BTreeMap<VarId, Expr>> {
        prolong(&self.forward, order)
    }

    /// Jacobian `∂φ^i/∂x^j`.
    pub fn jacobian(&self) -> Vec<Vec<Expr>> {
        self.forward
            .iter()
            .map(|f| (0..self.dim()).map(|j| symbolic::diff(f, VarId::pos(j))).collect())
            .collect()
    }
}
