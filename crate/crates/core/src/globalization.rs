//! Homotopy decomposition `α_ε = ω + d(μ₀ + κ)` of the Lepage 2-form and
//! the global Lagrangian `h(μ₀ + κ)` when the obstruction `ω` vanishes.

use std::collections::BTreeMap;

use crate::forms::{Basis, BasisMode, DiffForm, PointTransform};
use crate::jet::{prolong, JetSpace};
use crate::numeric::SamplePlan;
use crate::symbolic::{
    canonicalize, diff, eval, fresh_dummy, try_canonicalize, integrate_scaled, is_zero_with, Expr, IntegrationMode, VarId,
    ZeroVerdict,
};
use crate::variational::{
    helmholtz_with, lepage_equivalent, skew_velocity_part, source_two_form, Check, Family, Lagrangian, SourceForm,
};
use crate::{Error, Result};

fn coord(b: Basis, f: Expr) -> DiffForm {
    DiffForm::one_form(b, f, BasisMode::Coordinate)
}

fn dt() -> DiffForm {
    coord(Basis::Dt, Expr::one())
}

fn vel(i: usize) -> Expr {
    Expr::var(VarId::vel(i))
}

/// Check that a form vanishes; the residual is its first offending
/// coefficient.
pub fn form_check(label: impl Into<String>, form: &DiffForm, plan: &SamplePlan) -> Check {
    let mut worst = Check { label: label.into(), residual: Expr::zero(), verdict: ZeroVerdict::ProvenZero };
    let mut verdicts = vec![ZeroVerdict::ProvenZero];
    for c in form.terms().values() {
        let v = is_zero_with(c, plan);
        if !v.is_zero() && worst.verdict.is_zero() {
            worst.residual = c.clone();
        }
        verdicts.push(v);
    }
    worst.verdict = ZeroVerdict::worst(&verdicts);
    worst
}

fn symmetric_b(eps: &SourceForm, plan: &SamplePlan) -> Result<(Vec<Expr>, Vec<Vec<Expr>>)> {
    let (a, b) = eps.affine()?;
    let m = eps.dim();
    for i in 0..m {
        for j in (i + 1)..m {
            if !is_zero_with(&(&b[i][j] - &b[j][i]), plan).is_zero() {
                return Err(Error::HelmholtzViolated);
            }
        }
    }
    Ok((a.to_vec(), b.to_vec()))
}

/// `α₀` and `α′` with `α_ε = α₀ ∧ dt + α′`, both in the coordinate basis.
pub fn split_alpha(eps: &SourceForm) -> Result<(DiffForm, DiffForm)> {
    let (a, b) = symmetric_b(eps, &SamplePlan::default())?;
    let m = eps.dim();
    let mut alpha0 = Vec::new();
    let mut alpha1 = Vec::new();
    for i in 0..m {
        let mut ci = vec![a[i].clone()];
        for j in 0..m {
            if i != j {
                let skew = skew_velocity_part(&a, i, j);
                ci.push(Expr::rat(-1, 2) * &skew * vel(j));
                alpha1.push((vec![Basis::dx(0, i), Basis::dx(0, j)], Expr::rat(1, 4) * skew));
            }
            alpha0.push((vec![Basis::dx(1, i)], &b[i][j] * vel(j)));
            alpha1.push((vec![Basis::dx(0, i), Basis::dx(1, j)], b[i][j].clone()));
        }
        alpha0.push((vec![Basis::dx(0, i)], Expr::sum(ci)));
    }
    Ok((
        DiffForm::from_terms(1, BasisMode::Coordinate, alpha0)?,
        DiffForm::from_terms(2, BasisMode::Coordinate, alpha1)?,
    ))
}

/// `μ₀ = -t α₀`, a primitive of `α₀ ∧ dt`.
pub fn mu0(eps: &SourceForm) -> Result<DiffForm> {
    let (alpha0, _) = split_alpha(eps)?;
    Ok(alpha0.scale(&-Expr::var(VarId::TIME)))
}

/// Pullback along the section `x'^j = 0 (j < l), x'^l = ν`.
fn restrict_below(rho: &DiffForm, l: usize) -> DiffForm {
    let zeros: BTreeMap<VarId, Expr> = (0..l).map(|j| (VarId::vel(j), Expr::zero())).collect();
    rho.to_coordinate()
        .drop_slots(|b| matches!(b, Basis::Slot { order: 1, index } if index < l))
        .substitute_coefficients(&zeros)
}

/// Homotopy operator `K_l` (0-based `l`) in the velocity fibre: contract
/// with `∂/∂x'^l`, restrict to `x'^j = 0 (j < l)`, `x'^l = ν`, and integrate
/// `ν` from 0 to `x'^l`.
pub fn homotopy_k(rho: &DiffForm, l: usize, mode: IntegrationMode) -> Result<DiffForm> {
    let contracted = rho.to_coordinate().contract(VarId::vel(l))?;
    let nu = fresh_dummy(contracted.terms().values());
    let mut section: BTreeMap<VarId, Expr> = (0..l).map(|j| (VarId::vel(j), Expr::zero())).collect();
    section.insert(VarId::vel(l), Expr::var(nu));
    contracted
        .drop_slots(|b| matches!(b, Basis::Slot { order: 1, index } if index <= l))
        .map_coefficients(|c| integrate_scaled(&c.substitute_raw(&section), nu, &Expr::zero(), &vel(l), mode))
}

fn on_zero_section(eps: &SourceForm, e: &Expr) -> Result<Expr> {
    let zero: BTreeMap<VarId, Expr> = (0..eps.dim()).map(|i| (VarId::vel(i), Expr::zero())).collect();
    try_canonicalize(&e.substitute_raw(&zero))
        .map_err(|_| Error::Domain(format!("`{}` is singular at the zero section", eps.space().print(e))))
}

fn regular_b(eps: &SourceForm) -> Result<()> {
    let (_, b) = eps.affine()?;
    b.iter().flatten().try_for_each(|e| on_zero_section(eps, e).map(drop))
}

/// `ω_ij = ¼(∂A_i/∂x'^j - ∂A_j/∂x'^i)` at the zero section, for all
/// ordered pairs; `ω = ω_ij dx^i ∧ dx^j` summed over all `i, j`.
pub fn omega_components(eps: &SourceForm) -> Result<Vec<((usize, usize), Expr)>> {
    let (a, _) = eps.affine()?;
    let m = eps.dim();
    let mut out = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let skew = skew_velocity_part(a, i, j);
            out.push(((i, j), canonicalize(&(Expr::rat(1, 4) * on_zero_section(eps, &skew)?))));
        }
    }
    Ok(out)
}

/// The obstruction 2-form `ω`, coefficients on positions only.
pub fn omega(eps: &SourceForm) -> Result<DiffForm> {
    let terms = omega_components(eps)?
        .into_iter()
        .map(|((i, j), c)| (vec![Basis::dx(0, i), Basis::dx(0, j)], Expr::int(2) * c));
    DiffForm::from_terms(2, BasisMode::Coordinate, terms.collect::<Vec<_>>())
}

/// `κ = Σ_l K_l α′`.
pub fn kappa(eps: &SourceForm, mode: IntegrationMode) -> Result<DiffForm> {
    regular_b(eps)?;
    let (_, alpha1) = split_alpha(eps)?;
    let mut out = DiffForm::zero(1, BasisMode::Coordinate);
    for l in 0..eps.dim() {
        out = out.add(&homotopy_k(&alpha1, l, mode)?)?;
    }
    Ok(out)
}

/// `κ` from its closed form `-Σ_l ∫_0^{x'^l} B_jl(x, 0..0, ν, x'^{l+1}..) dν dx^j`,
/// independent of the homotopy operator code path.
pub fn kappa_closed_form(eps: &SourceForm, mode: IntegrationMode) -> Result<DiffForm> {
    regular_b(eps)?;
    let (_, b) = eps.affine()?;
    let m = eps.dim();
    let nu = fresh_dummy(b.iter().flatten());
    let mut terms = Vec::new();
    for l in 0..m {
        let mut section: BTreeMap<VarId, Expr> = (0..l).map(|j| (VarId::vel(j), Expr::zero())).collect();
        section.insert(VarId::vel(l), Expr::var(nu));
        for (j, row) in b.iter().enumerate() {
            let integral = integrate_scaled(&row[l].substitute_raw(&section), nu, &Expr::zero(), &vel(l), mode)?;
            terms.push((vec![Basis::dx(0, j)], -integral));
        }
    }
    DiffForm::from_terms(1, BasisMode::Coordinate, terms)
}

pub fn check_omega_vanishes(eps: &SourceForm) -> Result<ZeroVerdict> {
    check_omega_vanishes_with(eps, &SamplePlan::default())
}

pub fn check_omega_vanishes_with(eps: &SourceForm, plan: &SamplePlan) -> Result<ZeroVerdict> {
    let comps = omega_components(eps)?;
    Ok(ZeroVerdict::worst(&comps.iter().map(|(_, c)| is_zero_with(c, plan)).collect::<Vec<_>>()))
}

/// Render `ω` by its components, e.g. `1/2 dx∧dy`.
pub fn format_omega(eps: &SourceForm) -> Result<String> {
    let space = eps.space();
    let parts: Vec<String> = omega_components(eps)?
        .into_iter()
        .filter(|(_, c)| !c.is_literal_zero())
        .map(|((i, j), c)| format!("({}) d{}∧d{}", space.print(&c), space.coords()[i], space.coords()[j]))
        .collect();
    Ok(if parts.is_empty() { "0".into() } else { parts.join(" + ") })
}

/// All pieces of the decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalDecomposition {
    pub alpha: DiffForm,
    pub alpha0: DiffForm,
    pub alpha_prime: DiffForm,
    pub mu0: DiffForm,
    pub omega: DiffForm,
    pub kappa: DiffForm,
}

pub fn decompose(eps: &SourceForm, mode: IntegrationMode) -> Result<GlobalDecomposition> {
    let (alpha0, alpha_prime) = split_alpha(eps)?;
    Ok(GlobalDecomposition {
        alpha: lepage_equivalent(eps).to_coordinate(),
        mu0: alpha0.scale(&-Expr::var(VarId::TIME)),
        alpha0,
        alpha_prime,
        omega: omega(eps)?,
        kappa: kappa(eps, mode)?,
    })
}

/// `h(μ₀ + κ)` as a Lagrange function.
pub fn global_lagrangian(eps: &SourceForm, mode: IntegrationMode) -> Result<Lagrangian> {
    global_lagrangian_with(eps, mode, &SamplePlan::default())
}

pub fn global_lagrangian_with(eps: &SourceForm, mode: IntegrationMode, plan: &SamplePlan) -> Result<Lagrangian> {
    if !helmholtz_with(eps, plan)?.passed() {
        return Err(Error::HelmholtzViolated);
    }
    if !check_omega_vanishes_with(eps, plan)?.is_zero() {
        return Err(Error::ObstructionNonzero { omega: format_omega(eps)? });
    }
    let parts = decompose(eps, mode)?;
    let l = parts.mu0.add(&parts.kappa)?.horizontal_coefficient()?;
    Lagrangian::new(eps.space(), l)
}

/// `-ε_i x'^i t - Σ_l (∫_0^{x'^l} B_jl(..) dν) x'^j` assembled directly.
pub fn global_lagrangian_closed_form(eps: &SourceForm, mode: IntegrationMode) -> Result<Lagrangian> {
    let m = eps.dim();
    let t = Expr::var(VarId::TIME);
    let mut terms: Vec<Expr> = eps.eps().iter().enumerate().map(|(i, e)| -(&t * e * vel(i))).collect();
    let kappa = kappa_closed_form(eps, mode)?;
    for j in 0..m {
        terms.push(kappa.coeff(&[Basis::dx(0, j)]) * vel(j));
    }
    Lagrangian::new(eps.space(), Expr::sum(terms))
}

/// Every identity of the decomposition as its own check.
pub fn verify_global_decomposition(eps: &SourceForm, mode: IntegrationMode) -> Result<Family> {
    verify_global_decomposition_with(eps, mode, &SamplePlan::default())
}

pub fn verify_global_decomposition_with(eps: &SourceForm, mode: IntegrationMode, plan: &SamplePlan) -> Result<Family> {
    let p = decompose(eps, mode)?;
    let m = eps.dim();
    let mut checks = Vec::new();
    let mut add = |label: &str, form: DiffForm| checks.push(form_check(label, &form, plan));
    add("alpha - alpha0^dt - alpha'", p.alpha.sub(&p.alpha0.wedge(&dt())?)?.sub(&p.alpha_prime)?);
    add("d alpha", p.alpha.d()?);
    add("d alpha0", p.alpha0.d()?);
    add("d alpha'", p.alpha_prime.d()?);
    add("d mu0 - alpha0^dt", p.mu0.d()?.sub(&p.alpha0.wedge(&dt())?)?);
    let h_mu0 = coord(Basis::Dt, p.mu0.horizontal_coefficient()?);
    let expected: Vec<Expr> = eps.eps().iter().enumerate().map(|(i, e)| -(Expr::var(VarId::TIME) * e * vel(i))).collect();
    add("h mu0 + eps.x' t dt", h_mu0.sub(&coord(Basis::Dt, Expr::sum(expected)))?);
    add("d omega", p.omega.d()?);
    add("alpha' - omega - d kappa", p.alpha_prime.sub(&p.omega)?.sub(&p.kappa.d()?)?);
    add("alpha - omega - d(mu0 + kappa)", p.alpha.sub(&p.omega)?.sub(&p.mu0.add(&p.kappa)?.d()?)?);
    add("kappa - closed form", p.kappa.sub(&kappa_closed_form(eps, mode)?)?);
    add("p1 alpha - eps", p.alpha.contact_split()?.0.sub(&source_two_form(eps))?);
    let mut rho = p.alpha_prime.clone();
    for l in 0..m {
        let k = homotopy_k(&rho, l, mode)?;
        let next = restrict_below(&rho, l + 1);
        add(&format!("stage {}", l + 1), rho.sub(&next)?.sub(&k.d()?)?);
        rho = next;
    }
    add("zero section of alpha' - omega", rho.sub(&p.omega)?);
    Ok(Family::new("decomposition", checks))
}

/// Transform `(A, B)` to the chart `x̄ = φ(x)`:
/// `Ā_i = A_k ∂x^k/∂x̄^i + B_kl ∂x^k/∂x̄^i ∂²x^l/∂x̄^p∂x̄^q x̄'^p x̄'^q`,
/// `B̄_ij = B_kl ∂x^k/∂x̄^i ∂x^l/∂x̄^j`, everything composed with `x = ψ(x̄)`.
pub fn transform_affine(a: &[Expr], b: &[Vec<Expr>], phi: &PointTransform) -> Result<(Vec<Expr>, Vec<Vec<Expr>>)> {
    let m = a.len();
    let psi = &phi.inverse;
    let images = prolong(psi, 1)?;
    let a: Vec<Expr> = a.iter().map(|e| e.substitute_raw(&images)).collect();
    let b: Vec<Vec<Expr>> = b.iter().map(|r| r.iter().map(|e| e.substitute_raw(&images)).collect()).collect();
    let jac: Vec<Vec<Expr>> = psi.iter().map(|f| (0..m).map(|j| diff(f, VarId::pos(j))).collect()).collect();
    let mut a_bar = Vec::with_capacity(m);
    let mut b_bar = vec![vec![Expr::zero(); m]; m];
    for i in 0..m {
        let mut terms = Vec::new();
        for k in 0..m {
            terms.push(&a[k] * &jac[k][i]);
            for l in 0..m {
                let mut hess = Vec::new();
                for p in 0..m {
                    for q in 0..m {
                        hess.push(diff(&jac[l][p], VarId::pos(q)) * vel(p) * vel(q));
                    }
                }
                terms.push(&b[k][l] * &jac[k][i] * Expr::sum(hess));
            }
        }
        a_bar.push(canonicalize(&Expr::sum(terms)));
        for j in 0..m {
            let mut terms = Vec::new();
            for k in 0..m {
                for l in 0..m {
                    terms.push(&b[k][l] * &jac[k][i] * &jac[l][j]);
                }
            }
            b_bar[i][j] = canonicalize(&Expr::sum(terms));
        }
    }
    Ok((a_bar, b_bar))
}

/// The source form in the chart `x̄ = φ(x)`, built from the transformed
/// affine parts.
pub fn transform_source(eps: &SourceForm, phi: &PointTransform) -> Result<SourceForm> {
    let (a, b) = eps.affine()?;
    let (a_bar, b_bar) = transform_affine(a, b, phi)?;
    let m = eps.dim();
    let eps_bar = (0..m)
        .map(|i| Expr::sum(std::iter::once(a_bar[i].clone()).chain((0..m).map(|j| &b_bar[i][j] * Expr::var(VarId::acc(j))))))
        .collect();
    SourceForm::new(eps.space(), eps_bar)
}

/// Outcome of comparing `ω` and `κ` across two charts.
#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub points: usize,
    pub omega_residual: f64,
    pub kappa_residual: f64,
}

impl InvarianceReport {
    pub fn max_residual(&self) -> f64 {
        self.omega_residual.max(self.kappa_residual)
    }
}

fn max_coefficient(form: &DiffForm, space: &JetSpace, plan: &SamplePlan, points: usize) -> Result<f64> {
    let mut rng = plan.rng();
    let vars: Vec<VarId> = std::iter::once(VarId::TIME)
        .chain(space.coordinates_up_to(1))
        .chain((0..space.params().len()).map(VarId::param))
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let p = plan.sample(vars.iter().copied(), &mut rng);
        for c in form.terms().values() {
            worst = worst.max(eval(c, &p)?.abs());
        }
    }
    Ok(worst)
}

/// Build `ω, κ` in the chart `x̄ = φ(x)`, pull them back along `φ` and
/// compare with the unbarred ones at `points` seeded sample points.
pub fn chart_invariance_probe(
    eps: &SourceForm,
    phi: &PointTransform,
    points: usize,
    mode: IntegrationMode,
    plan: &SamplePlan,
) -> Result<InvarianceReport> {
    let bar = transform_source(eps, phi)?;
    let d_omega = omega(&bar)?.pullback(phi)?.sub(&omega(eps)?)?;
    let d_kappa = kappa(&bar, mode)?.pullback(phi)?.sub(&kappa(eps, mode)?)?;
    Ok(InvarianceReport {
        points,
        omega_residual: max_coefficient(&d_omega, eps.space(), plan, points)?,
        kappa_residual: max_coefficient(&d_kappa, eps.space(), plan, points)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variational::euler_lagrange;

    fn sp(names: &[&str]) -> JetSpace {
        JetSpace::new(names.to_vec(), 2).unwrap()
    }

    fn c(space: &JetSpace, s: &str) -> Expr {
        canonicalize(&space.parse(s).unwrap())
    }

    const GEODESIC: [&str; 2] = ["x*y'^2 - x''", "-2*x*x'*y' - (x^2 + 1)*y''"];

    #[test]
    fn split_alpha_free_particle() {
        let s = sp(&["x"]);
        let (a0, a1) = split_alpha(&SourceForm::parse(&s, &["x''"]).unwrap()).unwrap();
        assert_eq!(a0.coeff(&[Basis::dx(1, 0)]), c(&s, "x'"));
        assert_eq!(a0.terms().len(), 1);
        assert_eq!(a1.coeff(&[Basis::dx(0, 0), Basis::dx(1, 0)]), Expr::one());
    }

    #[test]
    fn split_alpha_geodesic() {
        let s = sp(&["x", "y"]);
        let (a0, _) = split_alpha(&SourceForm::parse(&s, &GEODESIC).unwrap()).unwrap();
        assert_eq!(a0.coeff(&[Basis::dx(1, 1)]), c(&s, "-(x^2 + 1)*y'"));
    }

    #[test]
    fn mu0_free_particle() {
        let s = sp(&["x"]);
        let e = SourceForm::parse(&s, &["x''"]).unwrap();
        let m = mu0(&e).unwrap();
        assert_eq!(m.coeff(&[Basis::dx(1, 0)]), c(&s, "-t*x'"));
        assert_eq!(m.horizontal_coefficient().unwrap(), c(&s, "-t*x'*x''"));
        assert!(mu0(&SourceForm::parse(&s, &["0"]).unwrap()).unwrap().is_structurally_zero());
    }

    #[test]
    fn homotopy_operator_examples() {
        let s = sp(&["x"]);
        let rho = coord(Basis::dx(0, 0), Expr::one()).wedge(&coord(Basis::dx(1, 0), Expr::one())).unwrap();
        let k = homotopy_k(&rho, 0, IntegrationMode::Exact).unwrap();
        assert_eq!(k.coeff(&[Basis::dx(0, 0)]), c(&s, "-x'"));
        let flat = coord(Basis::dx(0, 0), Expr::one()).wedge(&dt()).unwrap();
        assert!(homotopy_k(&flat, 0, IntegrationMode::Exact).unwrap().is_structurally_zero());
    }

    #[test]
    fn omega_examples() {
        let s = sp(&["x", "y"]);
        let mag = SourceForm::parse(&s, &["x'' + y'", "y'' - x'"]).unwrap();
        assert_eq!(omega_components(&mag).unwrap(), vec![((0, 1), Expr::rat(1, 2))]);
        assert_eq!(check_omega_vanishes(&mag).unwrap(), ZeroVerdict::ProvenNonZero);
        assert_eq!(format_omega(&mag).unwrap(), "(1/2) dx∧dy");
        let geo = SourceForm::parse(&s, &GEODESIC).unwrap();
        assert_eq!(check_omega_vanishes(&geo).unwrap(), ZeroVerdict::ProvenZero);
        assert!(omega(&geo).unwrap().is_structurally_zero());
    }

    #[test]
    fn kappa_examples() {
        let s = sp(&["x", "y"]);
        let free = SourceForm::parse(&s, &["x''", "y''"]).unwrap();
        let k = kappa(&free, IntegrationMode::Exact).unwrap();
        assert_eq!(k.coeff(&[Basis::dx(0, 0)]), c(&s, "-x'"));
        assert_eq!(k.coeff(&[Basis::dx(0, 1)]), c(&s, "-y'"));
        let geo = SourceForm::parse(&s, &GEODESIC).unwrap();
        let k = kappa(&geo, IntegrationMode::Exact).unwrap();
        assert_eq!(k.coeff(&[Basis::dx(0, 0)]), c(&s, "x'"));
        assert_eq!(k.coeff(&[Basis::dx(0, 1)]), c(&s, "(x^2 + 1)*y'"));
    }

    #[test]
    fn global_lagrangian_examples() {
        let s = sp(&["x", "y"]);
        let free = SourceForm::parse(&s, &["x''", "y''"]).unwrap();
        let l = global_lagrangian(&free, IntegrationMode::Exact).unwrap();
        assert_eq!(l.expr(), &c(&s, "-(x'^2 + y'^2) - t*(x''*x' + y''*y')"));
        assert_eq!(euler_lagrange(&l).unwrap().eps(), free.eps());
        let geo = SourceForm::parse(&s, &GEODESIC).unwrap();
        let l = global_lagrangian(&geo, IntegrationMode::Exact).unwrap();
        assert_eq!(euler_lagrange(&l).unwrap().eps(), geo.eps());
        assert_eq!(&l, &global_lagrangian_closed_form(&geo, IntegrationMode::Exact).unwrap());
        let mag = SourceForm::parse(&s, &["x'' + y'", "y'' - x'"]).unwrap();
        assert!(matches!(global_lagrangian(&mag, IntegrationMode::Exact), Err(Error::ObstructionNonzero { .. })));
    }

    #[test]
    fn decomposition_identities() {
        let s = sp(&["x", "y"]);
        for sys in [&GEODESIC[..], &["x'' + y'", "y'' - x'"], &["x''", "y''"]] {
            let e = SourceForm::parse(&s, sys).unwrap();
            let f = verify_global_decomposition(&e, IntegrationMode::Exact).unwrap();
            for check in &f.checks {
                assert_eq!(check.verdict, ZeroVerdict::ProvenZero, "{sys:?}: {}", check.label);
            }
        }
    }

    #[test]
    fn affine_law_matches_covector_transformation() {
        let s = sp(&["x", "y"]);
        let geo = SourceForm::parse(&s, &GEODESIC).unwrap();
        let phi = PointTransform::new(vec![c(&s, "x"), c(&s, "y + x^3")], vec![c(&s, "x"), c(&s, "y - x^3")]).unwrap();
        let bar = transform_source(&geo, &phi).unwrap();
        let images = prolong(&phi.inverse, 2).unwrap();
        for i in 0..2 {
            let direct = Expr::sum(
                (0..2)
                    .map(|k| geo.eps()[k].substitute_raw(&images) * diff(&phi.inverse[k], VarId::pos(i)))
                    .collect::<Vec<_>>(),
            );
            assert_eq!(canonicalize(&direct), bar.eps()[i]);
        }
    }

    #[test]
    fn chart_invariance() {
        let s = sp(&["x", "y"]);
        let geo = SourceForm::parse(&s, &GEODESIC).unwrap();
        let plan = SamplePlan::default();
        let id = chart_invariance_probe(&geo, &PointTransform::identity(2), 10, IntegrationMode::Exact, &plan).unwrap();
        assert_eq!(id.max_residual(), 0.0);
        let lin = PointTransform::new(vec![c(&s, "2*x"), c(&s, "2*y")], vec![c(&s, "x/2"), c(&s, "y/2")]).unwrap();
        let r = chart_invariance_probe(&geo, &lin, 10, IntegrationMode::Exact, &plan).unwrap();
        assert!(r.max_residual() < 1e-10);
    }
}
