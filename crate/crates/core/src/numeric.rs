//! Numeric oracles: seeded sampling, finite differences, adaptive
//! Gauss–Kronrod quadrature and sampled Euler–Lagrange round trips.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::symbolic::{self, eval, Expr, Node, Point, VarId, ZeroVerdict};
use crate::variational::{Lagrangian, SourceForm};
use crate::{Error, Result};

/// Sampling configuration shared by all randomized checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub trials: usize,
    /// Interval used for every variable without an explicit entry in `boxes`.
    pub default_box: (f64, f64),
    pub boxes: BTreeMap<VarId, (f64, f64)>,
    /// Scaled residual bound for zero tests.
    pub tol: f64,
    /// Relative bound for finite-difference comparisons.
    pub fd_tol: f64,
    pub step: f64,
    /// Points where some denominator is smaller than this are resampled.
    pub margin: f64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            seed: 0x5eed,
            trials: 32,
            default_box: (-2.0, 2.0),
            boxes: BTreeMap::new(),
            tol: 1e-9,
            fd_tol: 1e-6,
            step: 1e-5,
            margin: 1e-6,
        }
    }
}

impl SamplePlan {
    pub fn with_seed(seed: u64) -> Self {
        SamplePlan { seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Validation(m.into()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        for (lo, hi) in std::iter::once(&self.default_box).chain(self.boxes.values()) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return bad("sampling box must be a nondegenerate finite interval");
            }
        }
        if !(self.tol > 0.0 && self.fd_tol > 0.0 && self.step > 0.0 && self.margin >= 0.0) {
            return bad("tolerances and step must be positive");
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn sample(&self, vars: impl IntoIterator<Item = VarId>, rng: &mut ChaCha8Rng) -> Point {
        vars.into_iter()
            .map(|v| {
                let (lo, hi) = self.boxes.get(&v).copied().unwrap_or(self.default_box);
                (v, rng.gen_range(lo..hi))
            })
            .collect()
    }
}

/// Random polynomial with `terms` monomials of total degree at most
/// `max_degree` in `vars` and integer coefficients in `-3..=3`.
pub fn random_polynomial<R: Rng>(rng: &mut R, vars: &[VarId], max_degree: u32, terms: usize) -> Expr {
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let degree = rng.gen_range(0..=max_degree);
        let mut factors = vec![Expr::int(rng.gen_range(-3..=3))];
        for _ in 0..degree {
            factors.push(Expr::var(vars[rng.gen_range(0..vars.len())]));
        }
        out.push(Expr::product(factors));
    }
    symbolic::canonicalize(&Expr::sum(out))
}

fn denominators(e: &Expr, out: &mut Vec<Expr>) {
    match e.node() {
        Node::Num(_) | Node::Var(_) | Node::Pi => {}
        Node::Add(xs) | Node::Mul(xs) => xs.iter().for_each(|x| denominators(x, out)),
        Node::Pow(b, q) => {
            if q < &symbolic::int(0) {
                out.push(b.clone());
            }
            denominators(b, out);
        }
        Node::Div(a, b) => {
            out.push(b.clone());
            denominators(a, out);
            denominators(b, out);
        }
        Node::Func(_, a) => denominators(a, out),
        Node::Integral(i) => {
            denominators(&i.lower, out);
            denominators(&i.upper, out);
        }
    }
}

/// Smallest magnitude of any denominator of `e` at `p` (infinity if none).
pub fn singular_distance(e: &Expr, p: &Point) -> f64 {
    let mut dens = Vec::new();
    denominators(e, &mut dens);
    dens.iter().map(|d| eval(d, p).map_or(0.0, f64::abs)).fold(f64::INFINITY, f64::min)
}

fn magnitude(e: &Expr, p: &Point) -> Result<f64> {
    Ok(match e.node() {
        Node::Add(xs) => {
            let mut s = 0.0;
            for x in xs {
                s += eval(x, p)?.abs();
            }
            s
        }
        Node::Div(a, b) => magnitude(a, p)? / eval(b, p)?.abs(),
        _ => eval(e, p)?.abs(),
    })
}

/// Sample `e` at `plan.trials` points; residuals are scaled by
/// `1 + Σ|summands|`. Points where evaluation fails are resampled.
pub fn numeric_zero(e: &Expr, plan: &SamplePlan) -> ZeroVerdict {
    let vars = e.free_vars();
    let mut rng = plan.rng();
    let mut done = 0;
    let mut attempts = 0;
    let mut max_residual: f64 = 0.0;
    while done < plan.trials && attempts < plan.trials * 20 {
        attempts += 1;
        let p = plan.sample(vars.iter().copied(), &mut rng);
        if singular_distance(e, &p) < plan.margin {
            continue;
        }
        let (Ok(v), Ok(m)) = (eval(e, &p), magnitude(e, &p)) else {
            continue;
        };
        let residual = v.abs() / (1.0 + m);
        if !(residual <= plan.tol) {
            return ZeroVerdict::NumericNonZero { witness: p.into_iter().collect(), residual };
        }
        max_residual = max_residual.max(residual);
        done += 1;
    }
    if done == 0 {
        return ZeroVerdict::NumericNonZero { witness: Vec::new(), residual: f64::NAN };
    }
    ZeroVerdict::NumericZero { trials: done, max_residual }
}

/// Central difference `(e(p+h) - e(p-h)) / 2h` in direction `v`.
pub fn fd_partial(e: &Expr, v: VarId, point: &Point, step: f64) -> Result<f64> {
    let mut p = point.clone();
    let x = point.get(&v).copied().unwrap_or(0.0);
    p.insert(v, x + step);
    let plus = eval(e, &p)?;
    p.insert(v, x - step);
    let minus = eval(e, &p)?;
    Ok((plus - minus) / (2.0 * step))
}

/// Result of adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

const MAX_SEGMENTS: usize = 2000;

/// Adaptive 7/15-point Gauss–Kronrod quadrature of `f` over `[a, b]`
/// targeting absolute error `tol`.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::from([Segment { a, b, value, error }]);
    let mut err = error;
    while err > tol && heap.len() < MAX_SEGMENTS {
        if !err.is_finite() {
            break;
        }
        let s = heap.pop().unwrap();
        let m = 0.5 * (s.a + s.b);
        let (v1, e1) = gk15(&mut f, s.a, m);
        let (v2, e2) = gk15(&mut f, m, s.b);
        evaluations += 30;
        err += e1 + e2 - s.error;
        heap.push(Segment { a: s.a, b: m, value: v1, error: e1 });
        heap.push(Segment { a: m, b: s.b, value: v2, error: e2 });
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    if !value.is_finite() {
        return Err(Error::Domain("integrand is not finite on the interval".into()));
    }
    if error > tol {
        return Err(Error::AccuracyNotReached { estimate: error });
    }
    Ok(Quadrature { value, error, evaluations })
}

/// `∫_lower^upper e d(dummy)` with the remaining variables fixed by `point`.
pub fn quadrature(e: &Expr, dummy: VarId, lower: f64, upper: f64, point: &Point) -> Result<f64> {
    let mut p = point.clone();
    let mut failure = None;
    let q = gauss_kronrod(
        |s| {
            p.insert(dummy, s);
            eval(e, &p).unwrap_or_else(|err| {
                failure.get_or_insert(err);
                f64::NAN
            })
        },
        lower,
        upper,
        1e-10,
    );
    if let Some(err) = failure {
        return Err(err);
    }
    Ok(q?.value)
}

/// Maximum residuals of `E_i(λ) - ε_i` over sampled jet points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElRoundTrip {
    pub seed: u64,
    pub trials: usize,
    pub skipped: usize,
    pub max_residual: Vec<f64>,
}

impl ElRoundTrip {
    pub fn max(&self) -> f64 {
        self.max_residual.iter().copied().fold(0.0, f64::max)
    }
}

/// Values of a jet point along the polynomial curve
/// `x^i(t0 + τ) = Σ_k x^{i(k)} τ^k / k!` with derivatives up to order 4.
fn curve_point(t0: f64, jets: &[[f64; 5]], tau: f64) -> Point {
    let mut p = Point::new();
    p.insert(VarId::TIME, t0 + tau);
    for (i, c) in jets.iter().enumerate() {
        for k in 0..=2u8 {
            // k-th derivative of the Taylor polynomial at τ.
            let mut v = 0.0;
            let mut fact = 1.0;
            let mut pow = 1.0;
            for j in (k as usize)..5 {
                v += c[j] * pow / fact;
                fact *= (j - k as usize + 1) as f64;
                pow *= tau;
            }
            p.insert(VarId::jet(k, i), v);
        }
    }
    p
}

/// Five-point stencils for first and second derivatives.
fn d1(f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    Ok((f(-2.0 * h)? - 8.0 * f(-h)? + 8.0 * f(h)? - f(2.0 * h)?) / (12.0 * h))
}

fn d2(f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    Ok((-f(-2.0 * h)? + 16.0 * f(-h)? - 30.0 * f(0.0)? + 16.0 * f(h)? - f(2.0 * h)?) / (12.0 * h * h))
}

/// Evaluate `E_i(λ) - ε_i` at sampled jet points of order 4.
///
/// Partial derivatives of `λ` are exact; the total time derivatives are taken
/// numerically along a polynomial curve through each sampled jet point, so
/// the symbolic total derivative is not involved.
pub fn numeric_el_roundtrip(eps: &SourceForm, lagrangian: &Lagrangian, plan: &SamplePlan) -> Result<ElRoundTrip> {
    plan.validate()?;
    let m = eps.space().dim();
    let l = lagrangian.expr();
    let h = 2e-3;
    let mut rng = plan.rng();
    let mut max_residual = vec![0.0f64; m];
    let (mut done, mut skipped) = (0, 0);
    let px: Vec<Expr> = (0..m).map(|i| symbolic::diff(l, VarId::pos(i))).collect();
    let pv: Vec<Expr> = (0..m).map(|i| symbolic::diff(l, VarId::vel(i))).collect();
    let pa: Vec<Expr> = (0..m).map(|i| symbolic::diff(l, VarId::acc(i))).collect();
    while done < plan.trials {
        if skipped > plan.trials * 20 {
            return Err(Error::Domain("no evaluable sample points for the Euler–Lagrange round trip".into()));
        }
        let (lo, hi) = plan.default_box;
        let t0 = rng.gen_range(lo..hi);
        let jets: Vec<[f64; 5]> = (0..m).map(|_| std::array::from_fn(|_| rng.gen_range(lo..hi))).collect();
        let at = |tau: f64| curve_point(t0, &jets, tau);
        let base = at(0.0);
        let mut residuals = Vec::with_capacity(m);
        let mut ok = true;
        for i in 0..m {
            let r = (|| -> Result<f64> {
                let e_i = eval(&px[i], &base)? - d1(|tau| eval(&pv[i], &at(tau)), h)? + d2(|tau| eval(&pa[i], &at(tau)), h)?;
                Ok(e_i - eval(&eps.eps()[i], &base)?)
            })();
            match r {
                Ok(r) => residuals.push(r.abs()),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            skipped += 1;
            continue;
        }
        for (mx, r) in max_residual.iter_mut().zip(residuals) {
            *mx = mx.max(r);
        }
        done += 1;
    }
    Ok(ElRoundTrip { seed: plan.seed, trials: done, skipped, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetSpace;

    #[test]
    fn quadrature_examples() {
        let s = VarId::dummy(0);
        let e = Expr::var(s);
        assert!((quadrature(&e, s, 0.0, 1.0, &Point::new()).unwrap() - 0.5).abs() < 1e-12);
        let e = Expr::var(s).powi(2);
        assert!((quadrature(&e, s, 0.0, 2.0, &Point::new()).unwrap() - 8.0 / 3.0).abs() < 1e-10);
        let e = Expr::exp(Expr::var(s));
        assert!((quadrature(&e, s, 0.0, 1.0, &Point::new()).unwrap() - (std::f64::consts::E - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn quadrature_adapts_to_peaks() {
        let q = gauss_kronrod(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((q.value - exact).abs() < 1e-8, "{} vs {exact}", q.value);
        assert!(q.evaluations > 15);
    }

    #[test]
    fn quadrature_reports_failure() {
        assert!(matches!(
            gauss_kronrod(|x| 1.0 / x.abs().sqrt(), -1.0, 1.0, 1e-14),
            Err(Error::AccuracyNotReached { .. }) | Err(Error::Domain(_))
        ));
    }

    #[test]
    fn fd_examples() {
        let s = JetSpace::new(vec!["x"], 2).unwrap();
        let p = Point::from([(VarId::pos(0), 3.0)]);
        let d = fd_partial(&s.parse("x^2").unwrap(), VarId::pos(0), &p, 1e-5).unwrap();
        assert!((d - 6.0).abs() < 1e-6);
        let d = fd_partial(&s.parse("7/3").unwrap(), VarId::pos(0), &p, 1e-5).unwrap();
        assert!(d.abs() < 1e-10);
    }

    #[test]
    fn numeric_zero_examples() {
        let s = JetSpace::new(vec!["x"], 2).unwrap();
        let plan = SamplePlan::default();
        assert!(matches!(
            numeric_zero(&s.parse("sin(x)^2 + cos(x)^2 - 1").unwrap(), &plan),
            ZeroVerdict::NumericZero { trials: 32, .. }
        ));
        assert!(matches!(numeric_zero(&s.parse("x'' + x' - x''").unwrap(), &plan), ZeroVerdict::NumericNonZero { .. }));
        assert_eq!(numeric_zero(&Expr::zero(), &plan), ZeroVerdict::NumericZero { trials: 32, max_residual: 0.0 });
    }

    #[test]
    fn plan_validation() {
        assert!(SamplePlan::default().validate().is_ok());
        assert!(SamplePlan { trials: 0, ..Default::default() }.validate().is_err());
        assert!(SamplePlan { default_box: (1.0, 1.0), ..Default::default() }.validate().is_err());
        assert!(SamplePlan { tol: 0.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn curve_derivatives_are_consistent() {
        let jets = vec![[0.3, -1.2, 0.7, 1.9, -0.4]];
        let h = 1e-3;
        let x = |tau: f64| Ok(curve_point(0.5, &jets, tau)[&VarId::pos(0)]);
        let v = curve_point(0.5, &jets, 0.0)[&VarId::vel(0)];
        assert!((d1(x, h).unwrap() - v).abs() < 1e-9);
        let xd = |tau: f64| Ok(curve_point(0.5, &jets, tau)[&VarId::vel(0)]);
        assert!((d2(xd, h).unwrap() - 1.9).abs() < 1e-6);
    }
}
