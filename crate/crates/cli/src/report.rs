//! Command pipelines and their text / JSON reports.

use std::fmt::Write as _;
use std::path::Path;

use lepage_core::globalization::{
    chart_invariance_probe, check_omega_vanishes_with, decompose, format_omega, global_lagrangian_with,
    verify_global_decomposition_with,
};
use lepage_core::homogeneity::{auto_global_with, homogeneity_degree_with, homogeneous_variational_check_with};
use lepage_core::numeric::numeric_el_roundtrip;
use lepage_core::symbolic::is_zero_with;
use lepage_core::system::SystemFile;
use lepage_core::variational::{
    euler_lagrange_with, helmholtz_ab_with, helmholtz_with, tonti, tonti_first_order_with, Family, HelmholtzReport,
};
use lepage_core::{Error, JetSpace, Lagrangian, Rational, SourceForm, ZeroVerdict};
use serde_json::{json, Value};

use crate::{Method, Settings};

/// Points used by the chart invariance probe.
const INVARIANCE_POINTS: usize = 10;
const INVARIANCE_TOL: f64 = 1e-8;
const LOCAL: &str = "chart-local (star-shaped domain)";

pub struct Outcome {
    pub code: u8,
    pub json: Value,
    pub text: String,
    pub elapsed_ms: u128,
}

impl Outcome {
    fn new(code: u8, json: Value, text: String) -> Outcome {
        Outcome { code, json, text, elapsed_ms: 0 }
    }

    pub fn from_error(e: Error) -> Outcome {
        let code = match e {
            Error::HelmholtzViolated => 2,
            Error::ObstructionNonzero { .. } => 3,
            _ => 1,
        };
        Outcome::new(code, json!({ "error": e.to_string(), "exit_code": code }), format!("error       {e}\n"))
    }

    pub fn set_file(&mut self, path: &Path) {
        let name = path.display().to_string();
        if let Value::Object(map) = &mut self.json {
            map.insert("file".into(), Value::String(name.clone()));
        }
        self.text = format!("file        {name}\n{}", self.text);
    }
}

fn verdict_json(v: &ZeroVerdict, space: &JetSpace) -> Value {
    match v {
        ZeroVerdict::ProvenZero | ZeroVerdict::ProvenNonZero => json!({ "verdict": v.label() }),
        ZeroVerdict::NumericZero { trials, max_residual } => {
            json!({ "verdict": v.label(), "trials": trials, "max_residual": max_residual })
        }
        ZeroVerdict::NumericNonZero { witness, residual } => {
            let point: serde_json::Map<String, Value> =
                witness.iter().map(|(var, x)| (space.name(*var), json!(x))).collect();
            json!({ "verdict": v.label(), "witness": point, "residual": residual })
        }
    }
}

fn verdict_text(v: &ZeroVerdict, space: &JetSpace) -> String {
    match v {
        ZeroVerdict::NumericZero { trials, max_residual } => {
            format!("NumericZero ({trials} points, max residual {max_residual:.1e})")
        }
        ZeroVerdict::NumericNonZero { witness, residual } => {
            let at: Vec<String> = witness.iter().map(|(var, x)| format!("{}={x:.4}", space.name(*var))).collect();
            format!("NumericNonZero (residual {residual:.2e} at {})", at.join(", "))
        }
        _ => v.label().to_string(),
    }
}

fn family_json(f: &Family, space: &JetSpace) -> Value {
    let checks: Vec<Value> = f
        .checks
        .iter()
        .map(|c| json!({ "pair": c.label, "residual": space.print(&c.residual), "verdict": verdict_json(&c.verdict, space) }))
        .collect();
    json!({ "name": f.name, "verdict": verdict_json(&f.verdict, space), "checks": checks })
}

fn family_text(out: &mut String, f: &Family, space: &JetSpace) {
    writeln!(out, "  {:<10}{}", f.name, verdict_text(&f.verdict, space)).unwrap();
    for c in f.checks.iter().filter(|c| !c.passed()) {
        writeln!(out, "    {:<8}residual {}  {}", c.label, space.print(&c.residual), verdict_text(&c.verdict, space))
            .unwrap();
    }
}

fn report_json(r: &HelmholtzReport, space: &JetSpace) -> Value {
    json!({
        "passed": r.passed(),
        "verdict": verdict_json(&r.verdict, space),
        "families": r.families.iter().map(|f| family_json(f, space)).collect::<Vec<_>>(),
        "dependent": r.dependent.as_ref().map(|f| family_json(f, space)),
        "side_conditions": r.side_conditions.iter().map(|e| space.print(e)).collect::<Vec<_>>(),
    })
}

fn report_text(out: &mut String, title: &str, r: &HelmholtzReport, space: &JetSpace) {
    writeln!(out, "{title:<12}{}", if r.passed() { "passed" } else { "failed" }).unwrap();
    for f in &r.families {
        family_text(out, f, space);
    }
    if let Some(dep) = &r.dependent {
        writeln!(out, "  {:<10}{} (consistency only)", "dependent", verdict_text(&dep.verdict, space)).unwrap();
    }
    for e in &r.side_conditions {
        writeln!(out, "  assuming  {} ≠ 0", space.print(e)).unwrap();
    }
}

fn header(out: &mut String, eps: &SourceForm, s: &Settings) {
    let space = eps.space();
    for (name, e) in space.coords().iter().zip(eps.eps()) {
        writeln!(out, "{:<12}{}", format!("ε[{name}]"), space.print(e)).unwrap();
    }
    writeln!(out, "seed        {}", s.plan.seed).unwrap();
}

fn mode(s: &Settings) -> lepage_core::symbolic::IntegrationMode {
    if s.numeric_fallback {
        lepage_core::symbolic::IntegrationMode::NumericFallback
    } else {
        lepage_core::symbolic::IntegrationMode::Exact
    }
}

fn require_variational(eps: &SourceForm, s: &Settings) -> Result<HelmholtzReport, Error> {
    let h = helmholtz_with(eps, &s.plan)?;
    if !h.passed() {
        return Err(Error::HelmholtzViolated);
    }
    Ok(h)
}

pub fn check(system: &SystemFile, s: &Settings) -> Result<Outcome, Error> {
    let eps = system.source_form()?;
    let space = eps.space();
    let h = helmholtz_with(&eps, &s.plan)?;
    let ab = helmholtz_ab_with(&eps, &s.plan);
    let hom = homogeneity_degree_with(&eps, s.degree.clone(), &s.plan);
    let reduced = hom.applicable().then(|| homogeneous_variational_check_with(&eps, s.degree.clone(), &s.plan));
    let omega = match eps.is_affine() {
        true => Some((check_omega_vanishes_with(&eps, &s.plan)?, format_omega(&eps)?)),
        false => None,
    };
    let obstructed = omega.as_ref().is_some_and(|(v, _)| !v.is_zero());
    let code = match (h.passed(), obstructed) {
        (false, _) => 2,
        (true, true) => 3,
        (true, false) => 0,
    };
    let conclusion = match code {
        0 => "variational; h(μ₀ + κ) is a global Lagrangian",
        3 => "variational, but ω ≠ 0: only chart-local Lagrangians are produced",
        _ => "not variational",
    };

    let mut text = String::new();
    header(&mut text, &eps, s);
    report_text(&mut text, "helmholtz", &h, space);
    match &ab {
        Ok(r) => report_text(&mut text, "A/B form", r, space),
        Err(e) => writeln!(text, "A/B form    unavailable: {e}").unwrap(),
    }
    match &hom.degree {
        Some(c) => writeln!(text, "homogeneity c = {c}{}", if hom.applicable() { "" } else { " (excluded degree)" }).unwrap(),
        None => writeln!(text, "homogeneity not homogeneous").unwrap(),
    }
    if let Some(r) = &reduced {
        match r {
            Ok(r) => report_text(&mut text, "reduced set", r, space),
            Err(e) => writeln!(text, "reduced set unavailable: {e}").unwrap(),
        }
    }
    if let Some((v, w)) = &omega {
        writeln!(text, "obstruction ω = {w}  {}", verdict_text(v, space)).unwrap();
    }
    writeln!(text, "verdict     {conclusion}").unwrap();

    let json = json!({
        "command": "check",
        "seed": s.plan.seed,
        "eps": eps.eps().iter().map(|e| space.print(e)).collect::<Vec<_>>(),
        "helmholtz": report_json(&h, space),
        "helmholtz_ab": match &ab { Ok(r) => report_json(r, space), Err(e) => json!({ "error": e.to_string() }) },
        "homogeneity": {
            "degree": hom.degree.as_ref().map(|c| c.to_string()),
            "applicable": hom.applicable(),
            "verdict": verdict_json(&hom.verdict, space),
            "reduced": reduced.as_ref().map(|r| match r {
                Ok(r) => report_json(r, space),
                Err(e) => json!({ "error": e.to_string() }),
            }),
        },
        "obstruction": omega.as_ref().map(|(v, w)| json!({ "omega": w, "verdict": verdict_json(v, space) })),
        "variational": h.passed(),
        "exit_code": code,
    });
    Ok(Outcome::new(code, json, text))
}

struct Built {
    method: Method,
    lagrangian: Lagrangian,
    locality: &'static str,
    warnings: Vec<String>,
    homogeneous: Option<Rational>,
}

fn build(eps: &SourceForm, s: &Settings, method: Method) -> Result<Built, Error> {
    let m = mode(s);
    let global =
        |l| Built { method: Method::Global, lagrangian: l, locality: "global", warnings: Vec::new(), homogeneous: None };
    Ok(match method {
        Method::Tonti => {
            Built { method, lagrangian: tonti(eps, m)?, locality: LOCAL, warnings: Vec::new(), homogeneous: None }
        }
        Method::Tonti1 => Built {
            method,
            lagrangian: tonti_first_order_with(eps, m, &s.plan)?,
            locality: LOCAL,
            warnings: Vec::new(),
            homogeneous: None,
        },
        Method::Global => global(global_lagrangian_with(eps, m, &s.plan)?),
        Method::Auto => {
            let hom = homogeneity_degree_with(eps, s.degree.clone(), &s.plan);
            if hom.applicable() {
                Built { homogeneous: hom.degree, ..global(auto_global_with(eps, s.degree.clone(), m, &s.plan)?) }
            } else if check_omega_vanishes_with(eps, &s.plan)?.is_zero() {
                global(global_lagrangian_with(eps, m, &s.plan)?)
            } else {
                let mut b = build(eps, s, Method::Tonti1)?;
                b.warnings.push(format!("ω = {} ≠ 0: no global Lagrangian of the form h(μ₀ + κ)", format_omega(eps)?));
                b
            }
        }
    })
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Tonti => "tonti",
        Method::Tonti1 => "tonti1",
        Method::Global => "global",
        Method::Auto => "auto",
    }
}

pub fn lagrangian(system: &SystemFile, s: &Settings, method: Method) -> Result<Outcome, Error> {
    let eps = system.source_form()?;
    let space = eps.space();
    require_variational(&eps, s)?;
    let built = build(&eps, s, method)?;
    let l = &built.lagrangian;
    let symbolic = match euler_lagrange_with(l, &s.plan) {
        Ok(back) => ZeroVerdict::worst(
            &back.eps().iter().zip(eps.eps()).map(|(a, b)| is_zero_with(&(a - b), &s.plan)).collect::<Vec<_>>(),
        ),
        Err(_) => ZeroVerdict::ProvenNonZero,
    };
    let numeric = numeric_el_roundtrip(&eps, l, &s.plan)?;
    let ok = symbolic.is_zero() && numeric.max() < s.plan.fd_tol;
    let code = if ok { 0 } else { 1 };

    let mut text = String::new();
    header(&mut text, &eps, s);
    writeln!(text, "method      {}", method_name(built.method)).unwrap();
    if let Some(c) = &built.homogeneous {
        writeln!(text, "route       homogeneous of degree {c}, A rebuilt from B").unwrap();
    }
    writeln!(text, "L           {}", l.print()).unwrap();
    writeln!(text, "domain      {}", built.locality).unwrap();
    writeln!(text, "E(L) = ε    {}", verdict_text(&symbolic, space)).unwrap();
    writeln!(text, "numeric     max residual {:.2e} over {} points", numeric.max(), numeric.trials).unwrap();
    for w in &built.warnings {
        writeln!(text, "warning     {w}").unwrap();
    }

    let json = json!({
        "command": "lagrangian",
        "seed": s.plan.seed,
        "method": method_name(built.method),
        "lagrangian": l.print(),
        "domain": built.locality,
        "homogeneous_degree": built.homogeneous.as_ref().map(|c| c.to_string()),
        "warnings": built.warnings,
        "roundtrip": {
            "symbolic": verdict_json(&symbolic, space),
            "numeric_max_residual": numeric.max_residual,
            "numeric_points": numeric.trials,
            "numeric_skipped": numeric.skipped,
        },
        "exit_code": code,
    });
    Ok(Outcome::new(code, json, text))
}

pub fn forms(system: &SystemFile, s: &Settings) -> Result<Outcome, Error> {
    let eps = system.source_form()?;
    let space = eps.space();
    require_variational(&eps, s)?;
    let m = mode(s);
    let parts = decompose(&eps, m)?;
    let checks = verify_global_decomposition_with(&eps, m, &s.plan)?;
    let obstructed = !check_omega_vanishes_with(&eps, &s.plan)?.is_zero();
    let code = match (checks.passed(), obstructed) {
        (false, _) => 1,
        (true, true) => 3,
        (true, false) => 0,
    };
    let shown = [
        ("alpha", parts.alpha.in_mode(lepage_core::BasisMode::Contact).display(space)),
        ("alpha0", parts.alpha0.display(space)),
        ("alpha'", parts.alpha_prime.display(space)),
        ("mu0", parts.mu0.display(space)),
        ("omega", parts.omega.display(space)),
        ("kappa", parts.kappa.display(space)),
    ];

    let mut text = String::new();
    header(&mut text, &eps, s);
    for (name, f) in &shown {
        writeln!(text, "{name:<12}{f}").unwrap();
    }
    writeln!(text, "identities  {}", if checks.passed() { "all hold" } else { "FAILED" }).unwrap();
    for c in &checks.checks {
        writeln!(text, "  {:<34}{}", c.label, verdict_text(&c.verdict, space)).unwrap();
    }

    let forms: serde_json::Map<String, Value> = shown.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let json = json!({
        "command": "forms",
        "seed": s.plan.seed,
        "forms": forms,
        "identities": family_json(&checks, space),
        "exit_code": code,
    });
    Ok(Outcome::new(code, json, text))
}

pub fn invariance(system: &SystemFile, s: &Settings) -> Result<Outcome, Error> {
    if system.charts.is_empty() {
        return Err(Error::Validation("the system file declares no charts".into()));
    }
    let eps = system.source_form()?;
    let mut text = String::new();
    header(&mut text, &eps, s);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for chart in &system.charts {
        let phi = system.transform(chart)?;
        let r = chart_invariance_probe(&eps, &phi, INVARIANCE_POINTS, mode(s), &s.plan)?;
        worst = worst.max(r.max_residual());
        writeln!(
            text,
            "chart {:<9} ω residual {:.2e}  κ residual {:.2e}  ({} points)",
            chart.name, r.omega_residual, r.kappa_residual, r.points
        )
        .unwrap();
        rows.push(json!({
            "chart": chart.name,
            "forward": chart.forward,
            "inverse": chart.inverse,
            "points": r.points,
            "omega_residual": r.omega_residual,
            "kappa_residual": r.kappa_residual,
        }));
    }
    let code = if worst < INVARIANCE_TOL { 0 } else { 2 };
    writeln!(text, "verdict     {}", if code == 0 { "ω and κ agree across charts" } else { "charts disagree" }).unwrap();
    let json = json!({
        "command": "invariance",
        "seed": s.plan.seed,
        "tolerance": INVARIANCE_TOL,
        "charts": rows,
        "max_residual": worst,
        "exit_code": code,
    });
    Ok(Outcome::new(code, json, text))
}
