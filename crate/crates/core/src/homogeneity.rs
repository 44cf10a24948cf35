//! Homogeneous source forms of degree `c ∉ {0, 1}`: degree detection, the
//! reduced Helmholtz set, reconstruction of `A` from `B`, and the automatic
//! global Lagrangian.

use num::{BigInt, FromPrimitive, Zero};

use crate::globalization::{check_omega_vanishes_with, global_lagrangian_with};
use crate::numeric::SamplePlan;
use crate::symbolic::{canonicalize, diff, eval, is_zero_with, Expr, Rational, VarId, ZeroVerdict};
use crate::variational::{reduced_ab_families, Check, Family, HelmholtzReport, Lagrangian, SourceForm};
use crate::{Error, Result};

const MAX_DENOMINATOR: i64 = 12;

/// Result of probing `x'^i ∂F/∂x'^i + 2 x''^i ∂F/∂x''^i = c F`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneityFinding {
    pub degree: Option<Rational>,
    /// Euler residual of each coefficient for the candidate degree.
    pub residuals: Vec<Expr>,
    pub verdict: ZeroVerdict,
}

impl HomogeneityFinding {
    /// `c` is certified and lies outside `{0, 1}`.
    pub fn applicable(&self) -> bool {
        self.degree.as_ref().is_some_and(|c| !c.is_zero() && *c != Rational::from_integer(1.into()))
    }
}

/// `x'^i ∂F/∂x'^i + 2 x''^i ∂F/∂x''^i`.
pub fn euler_operator(f: &Expr, m: usize) -> Expr {
    let mut terms = Vec::new();
    for i in 0..m {
        terms.push(diff(f, VarId::vel(i)) * Expr::var(VarId::vel(i)));
        terms.push(Expr::int(2) * diff(f, VarId::acc(i)) * Expr::var(VarId::acc(i)));
    }
    canonicalize(&Expr::sum(terms))
}

/// Nearest fraction with denominator at most 12.
fn round_rational(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    (1..=MAX_DENOMINATOR)
        .filter_map(|q| {
            let p = (x * q as f64).round();
            let err = (x - p / q as f64).abs();
            Some((err, Rational::new(BigInt::from_f64(p)?, BigInt::from(q))))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, r)| r)
}

fn probe(eps: &SourceForm, plan: &SamplePlan) -> Option<Rational> {
    let m = eps.dim();
    let f = eps.eps().iter().find(|e| !e.is_literal_zero())?;
    let ef = euler_operator(f, m);
    let vars: Vec<VarId> =
        eps.space().coordinates_up_to(2).into_iter().chain((0..eps.space().params().len()).map(VarId::param)).collect();
    let mut rng = plan.rng();
    for _ in 0..plan.trials.max(8) {
        let p = plan.sample(vars.iter().copied(), &mut rng);
        if let (Ok(num), Ok(den)) = (eval(&ef, &p), eval(f, &p)) {
            if den.abs() > 1e-3 {
                return round_rational(num / den);
            }
        }
    }
    None
}

fn certify(eps: &SourceForm, c: &Rational, plan: &SamplePlan) -> (Vec<Expr>, ZeroVerdict) {
    let m = eps.dim();
    let residuals: Vec<Expr> =
        eps.eps().iter().map(|e| canonicalize(&(euler_operator(e, m) - Expr::num(c.clone()) * e))).collect();
    let verdict = ZeroVerdict::worst(&residuals.iter().map(|r| is_zero_with(r, plan)).collect::<Vec<_>>());
    (residuals, verdict)
}

pub fn homogeneity_degree(eps: &SourceForm) -> HomogeneityFinding {
    homogeneity_degree_with(eps, None, &SamplePlan::default())
}

/// Estimate `c` at a sample point (or take `forced`) and certify it on
/// every coefficient.
pub fn homogeneity_degree_with(eps: &SourceForm, forced: Option<Rational>, plan: &SamplePlan) -> HomogeneityFinding {
    let Some(c) = forced.or_else(|| probe(eps, plan)) else {
        return HomogeneityFinding { degree: None, residuals: Vec::new(), verdict: ZeroVerdict::ProvenNonZero };
    };
    let (residuals, verdict) = certify(eps, &c, plan);
    HomogeneityFinding { degree: verdict.is_zero().then_some(c), residuals, verdict }
}

/// `A_i = (1/(c-1)) (½(∂B_ij/∂x^k + ∂B_ik/∂x^j) - (1/c) ∂B_jk/∂x^i) x'^j x'^k`.
pub fn reconstruct_a(b: &[Vec<Expr>], c: &Rational) -> Result<Vec<Expr>> {
    if c.is_zero() || *c == Rational::from_integer(1.into()) {
        return Err(Error::DegenerateDegree(c.clone()));
    }
    let m = b.len();
    let inv_c = Expr::num(c.recip());
    let outer = Expr::num((c - Rational::from_integer(1.into())).recip());
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut terms = Vec::new();
        for j in 0..m {
            for k in 0..m {
                let sym = Expr::rat(1, 2) * (diff(&b[i][j], VarId::pos(k)) + diff(&b[i][k], VarId::pos(j)));
                let coef = sym - &inv_c * diff(&b[j][k], VarId::pos(i));
                terms.push(coef * Expr::var(VarId::vel(j)) * Expr::var(VarId::vel(k)));
            }
        }
        out.push(canonicalize(&(&outer * Expr::sum(terms))));
    }
    Ok(out)
}

pub fn homogeneous_variational_check(eps: &SourceForm) -> Result<HelmholtzReport> {
    homogeneous_variational_check_with(eps, None, &SamplePlan::default())
}

/// The reduced Helmholtz set (`B1`, `B2`, `A2`) together with the
/// reconstruction identity `A = reconstruct_a(B, c)`.
pub fn homogeneous_variational_check_with(
    eps: &SourceForm,
    forced: Option<Rational>,
    plan: &SamplePlan,
) -> Result<HelmholtzReport> {
    let finding = homogeneity_degree_with(eps, forced, plan);
    let c = match finding.degree {
        Some(c) if finding.applicable() => c,
        Some(c) => return Err(Error::NotApplicable(format!("homogeneity degree {c} is excluded"))),
        None => return Err(Error::NotApplicable("the system is not homogeneous".into())),
    };
    let (a, b) = eps.affine()?;
    let mut families = reduced_ab_families(a, b, plan);
    let rebuilt = reconstruct_a(b, &c)?;
    let checks = (0..eps.dim()).map(|i| Check::new(format!("({})", i + 1), &rebuilt[i] - &a[i], plan)).collect();
    families.push(Family::new("A-formula", checks));
    Ok(HelmholtzReport::new(families, None))
}

/// Global Lagrangian of a homogeneous locally variational system.
pub fn auto_global(eps: &SourceForm, mode: crate::symbolic::IntegrationMode) -> Result<Lagrangian> {
    auto_global_with(eps, None, mode, &SamplePlan::default())
}

pub fn auto_global_with(
    eps: &SourceForm,
    forced: Option<Rational>,
    mode: crate::symbolic::IntegrationMode,
    plan: &SamplePlan,
) -> Result<Lagrangian> {
    if !homogeneous_variational_check_with(eps, forced, plan)?.passed() {
        return Err(Error::HelmholtzViolated);
    }
    if !check_omega_vanishes_with(eps, plan)?.is_zero() {
        return Err(Error::Validation("homogeneous variational system with nonzero obstruction".into()));
    }
    global_lagrangian_with(eps, mode, plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetSpace;
    use crate::symbolic::{int, rat, IntegrationMode};
    use crate::variational::{euler_lagrange, helmholtz};

    fn sp(names: &[&str]) -> JetSpace {
        JetSpace::new(names.to_vec(), 2).unwrap()
    }

    const GEODESIC: [&str; 2] = ["x*y'^2 - x''", "-2*x*x'*y' - (x^2 + 1)*y''"];

    #[test]
    fn degree_examples() {
        let s = sp(&["x", "y"]);
        let geo = SourceForm::parse(&s, &GEODESIC).unwrap();
        let f = homogeneity_degree(&geo);
        assert_eq!(f.degree, Some(int(2)));
        assert!(f.applicable());
        let s1 = sp(&["x"]);
        assert_eq!(homogeneity_degree(&SourceForm::parse(&s1, &["x'' + x"]).unwrap()).degree, None);
        assert_eq!(homogeneity_degree(&SourceForm::parse(&s1, &["x''"]).unwrap()).degree, Some(int(2)));
        assert_eq!(homogeneity_degree(&SourceForm::parse(&s1, &["x'^3"]).unwrap()).degree, Some(int(3)));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_rational(2.0000001), Some(int(2)));
        assert_eq!(round_rational(0.3333333), Some(rat(1, 3)));
        assert_eq!(round_rational(f64::NAN), None);
    }

    #[test]
    fn reconstruct_examples() {
        let s = sp(&["x", "y"]);
        let geo = SourceForm::parse(&s, &GEODESIC).unwrap();
        let (a, b) = geo.affine().unwrap();
        assert_eq!(reconstruct_a(b, &int(2)).unwrap(), a.to_vec());
        let free = vec![vec![Expr::int(-1), Expr::zero()], vec![Expr::zero(), Expr::int(-1)]];
        assert_eq!(reconstruct_a(&free, &int(2)).unwrap(), vec![Expr::zero(), Expr::zero()]);
        assert_eq!(reconstruct_a(&free, &int(1)), Err(Error::DegenerateDegree(int(1))));
    }

    #[test]
    fn reduced_check_examples() {
        let s = sp(&["x", "y"]);
        let geo = SourceForm::parse(&s, &GEODESIC).unwrap();
        let r = homogeneous_variational_check(&geo).unwrap();
        assert!(r.passed());
        assert_eq!(r.passed(), helmholtz(&geo).unwrap().passed());
        let bad = SourceForm::parse(&s, &["x''", "y'' + x'^2"]).unwrap();
        let r = homogeneous_variational_check(&bad).unwrap();
        assert!(!r.family("A2").unwrap().passed());
        assert_eq!(r.passed(), helmholtz(&bad).unwrap().passed());
        let s1 = sp(&["x"]);
        assert!(matches!(
            homogeneous_variational_check(&SourceForm::parse(&s1, &["x'' + x"]).unwrap()),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn auto_global_examples() {
        let s = sp(&["x", "y", "z"]);
        let free = SourceForm::parse(&s, &["x''", "y''", "z''"]).unwrap();
        let l = auto_global(&free, IntegrationMode::Exact).unwrap();
        assert_eq!(euler_lagrange(&l).unwrap().eps(), free.eps());
        let s2 = sp(&["x", "y"]);
        let geo = SourceForm::parse(&s2, &GEODESIC).unwrap();
        let l = auto_global(&geo, IntegrationMode::Exact).unwrap();
        assert_eq!(euler_lagrange(&l).unwrap().eps(), geo.eps());
        let s1 = sp(&["x"]);
        assert!(matches!(
            auto_global(&SourceForm::parse(&s1, &["x'' + x"]).unwrap(), IntegrationMode::Exact),
            Err(Error::NotApplicable(_))
        ));
    }
}
