//! Jet coordinates and the total time derivative.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::symbolic::{self, Expr, Role, VarId};
use crate::{Error, Result};

/// Hard cap on the jet order of any user-facing space.
pub const MAX_JET_ORDER: u8 = 3;

/// Coordinate system `(t, x^i, x'^i, x''^i, x'''^i)` over an `m`-manifold chart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JetSpace {
    coords: Vec<String>,
    params: Vec<String>,
    max_order: u8,
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

const RESERVED: [&str; 9] = ["t", "pi", "sin", "cos", "tan", "exp", "ln", "sqrt", "integrate"];

impl JetSpace {
    pub fn new<S: Into<String>>(coords: Vec<S>, max_order: u8) -> Result<Self> {
        let coords: Vec<String> = coords.into_iter().map(Into::into).collect();
        if coords.is_empty() {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        if !(1..=MAX_JET_ORDER).contains(&max_order) {
            return Err(Error::InvalidSpace(format!("max jet order must be 1, 2 or 3, got {max_order}")));
        }
        let space = JetSpace { coords, params: Vec::new(), max_order };
        space.check_names(&space.coords)?;
        Ok(space)
    }

    /// Standard names `x1..xm`.
    pub fn numbered(m: usize, max_order: u8) -> Result<Self> {
        JetSpace::new((1..=m).map(|i| format!("x{i}")).collect(), max_order)
    }

    pub fn with_params<S: Into<String>>(mut self, params: Vec<S>) -> Result<Self> {
        let params: Vec<String> = params.into_iter().map(Into::into).collect();
        let mut all = self.coords.clone();
        all.extend(params.iter().cloned());
        self.check_names(&all)?;
        self.params = params;
        Ok(self)
    }

    fn check_names(&self, names: &[String]) -> Result<()> {
        for (k, n) in names.iter().enumerate() {
            if !valid_identifier(n) {
                return Err(Error::InvalidSpace(format!("`{n}` is not a valid identifier")));
            }
            if RESERVED.contains(&n.as_str()) || n.starts_with("_s") {
                return Err(Error::InvalidSpace(format!("`{n}` is reserved")));
            }
            if names[..k].contains(n) {
                return Err(Error::InvalidSpace(format!("duplicate coordinate `{n}`")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn max_order(&self) -> u8 {
        self.max_order
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    /// Same coordinates with a different order cap.
    pub fn with_max_order(&self, max_order: u8) -> Result<Self> {
        let mut s = JetSpace::new(self.coords.clone(), max_order)?;
        s.params = self.params.clone();
        Ok(s)
    }

    /// Resolve a bare identifier (no primes).
    pub fn lookup(&self, name: &str) -> Option<VarId> {
        if name == "t" {
            return Some(VarId::TIME);
        }
        if let Some(i) = self.coords.iter().position(|c| c == name) {
            return Some(VarId::pos(i));
        }
        self.params.iter().position(|c| c == name).map(VarId::param)
    }

    pub fn name(&self, v: VarId) -> String {
        match v.role {
            Role::Time => "t".into(),
            Role::Jet(k) => match self.coords.get(v.index) {
                Some(c) => format!("{c}{}", "'".repeat(k as usize)),
                None => v.to_string(),
            },
            Role::Parameter => self.params.get(v.index).cloned().unwrap_or_else(|| v.to_string()),
            Role::Dummy => v.to_string(),
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = VarId> {
        (0..self.dim()).map(VarId::pos)
    }

    pub fn velocities(&self) -> impl Iterator<Item = VarId> {
        (0..self.dim()).map(VarId::vel)
    }

    pub fn accelerations(&self) -> impl Iterator<Item = VarId> {
        (0..self.dim()).map(VarId::acc)
    }

    /// `t` followed by all jet variables up to `order`.
    pub fn coordinates_up_to(&self, order: u8) -> Vec<VarId> {
        let mut out = vec![VarId::TIME];
        for k in 0..=order {
            out.extend((0..self.dim()).map(|i| VarId::jet(k, i)));
        }
        out
    }

    pub fn parse(&self, text: &str) -> Result<Expr> {
        symbolic::parse(text, self)
    }

    pub fn print(&self, e: &Expr) -> String {
        symbolic::print(e, self)
    }
}

impl symbolic::VarNames for JetSpace {
    fn var_name(&self, v: VarId) -> String {
        self.name(v)
    }
}

/// Highest derivative order occurring in `e` (0 for functions of `t`, `x`).
pub fn jet_order(e: &Expr) -> u8 {
    e.free_vars().iter().filter_map(VarId::jet_order).max().unwrap_or(0)
}

/// Formal time derivative `d/dt = ∂_t + Σ x^{(k+1)} ∂/∂x^{(k)}`, canonical.
///
/// The space's own `max_order` may be raised up to [`MAX_JET_ORDER`].
pub fn total_derivative(e: &Expr, _space: &JetSpace) -> Result<Expr> {
    total_derivative_capped(e, MAX_JET_ORDER)
}

/// Total derivative allowing jet variables up to order `limit`.
pub(crate) fn total_derivative_capped(e: &Expr, limit: u8) -> Result<Expr> {
    let mut terms = Vec::new();
    for v in e.free_vars() {
        let Some(dv) = (match v.role {
            Role::Time => Some(Expr::one()),
            Role::Jet(_) => v.raised().map(Expr::var),
            _ => None,
        }) else {
            continue;
        };
        let partial = symbolic::diff(e, v);
        if partial.is_literal_zero() {
            continue;
        }
        if let Some(k) = v.jet_order() {
            if k + 1 > limit {
                return Err(Error::OrderOverflow { needed: k + 1, limit });
            }
        }
        terms.push(partial * dv);
    }
    Ok(symbolic::canonicalize(&Expr::sum(terms)))
}

/// Lift a map of position expressions `x̄^i = φ^i(x)` to all jet orders up to
/// `order` through repeated total differentiation.
pub fn prolong(positions: &[Expr], order: u8) -> Result<BTreeMap<VarId, Expr>> {
    let mut map = BTreeMap::new();
    for (i, phi) in positions.iter().enumerate() {
        let mut cur = symbolic::canonicalize(phi);
        map.insert(VarId::pos(i), cur.clone());
        for k in 1..=order {
            cur = total_derivative_capped(&cur, order)?;
            map.insert(VarId::jet(k, i), cur.clone());
        }
    }
    Ok(map)
}

/// True when `e` contains only jet coordinates of order ≤ `order` (and t).
pub fn is_function_on(e: &Expr, order: u8) -> bool {
    jet_order(e) <= order
}
