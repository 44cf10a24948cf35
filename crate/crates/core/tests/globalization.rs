use lepage_core::catalog;
use lepage_core::forms::PointTransform;
use lepage_core::globalization::{
    chart_invariance_probe, check_omega_vanishes, decompose, global_lagrangian, global_lagrangian_closed_form,
    verify_global_decomposition,
};
use lepage_core::homogeneity::{auto_global, homogeneity_degree, homogeneous_variational_check, reconstruct_a};
use lepage_core::numeric::{numeric_el_roundtrip, SamplePlan};
use lepage_core::symbolic::IntegrationMode;
use lepage_core::variational::{
    cartan_form, euler_lagrange, euler_lagrange_expressions, helmholtz, tonti_first_order,
};
use lepage_core::{Error, JetSpace, Lagrangian, SourceForm, ZeroVerdict};

const EXACT: IntegrationMode = IntegrationMode::Exact;

#[test]
fn decomposition_chain_on_catalog() {
    for entry in catalog::VARIATIONAL {
        let family = verify_global_decomposition(&entry.source_form(), EXACT).unwrap();
        for check in &family.checks {
            assert_eq!(check.verdict, ZeroVerdict::ProvenZero, "{}: {}", entry.name, check.label);
        }
    }
}

#[test]
fn omega_has_no_velocities() {
    for entry in catalog::VARIATIONAL {
        let parts = decompose(&entry.source_form(), EXACT).unwrap();
        assert!(parts.omega.jet_order() == 0, "{}", entry.name);
    }
}

#[test]
fn global_lagrangians_reproduce_the_system() {
    let plan = SamplePlan::default();
    for entry in catalog::VARIATIONAL {
        let eps = entry.source_form();
        if !check_omega_vanishes(&eps).unwrap().is_zero() {
            assert!(matches!(global_lagrangian(&eps, EXACT), Err(Error::ObstructionNonzero { .. })));
            continue;
        }
        let l = global_lagrangian(&eps, EXACT).unwrap();
        assert_eq!(euler_lagrange(&l).unwrap().eps(), eps.eps(), "{}", entry.name);
        assert_eq!(l, global_lagrangian_closed_form(&eps, EXACT).unwrap(), "{}", entry.name);
        assert!(numeric_el_roundtrip(&eps, &l, &plan).unwrap().max() < 1e-6, "{}", entry.name);
    }
}

#[test]
fn horizontal_parts_of_primitives_share_equations() {
    for entry in catalog::VARIATIONAL {
        let eps = entry.source_form();
        if !check_omega_vanishes(&eps).unwrap().is_zero() {
            continue;
        }
        let parts = decompose(&eps, EXACT).unwrap();
        let h1 = parts.mu0.add(&parts.kappa).unwrap().horizontal_coefficient().unwrap();
        let theta = cartan_form(&tonti_first_order(&eps, EXACT).unwrap()).unwrap();
        let h2 = theta.horizontal_coefficient().unwrap();
        let el = |e| euler_lagrange_expressions(&Lagrangian::new(eps.space(), e).unwrap()).unwrap();
        assert_eq!(el(h1), el(h2), "{}", entry.name);
    }
}

#[test]
fn magnetic_obstruction() {
    let eps = catalog::MAGNETIC.source_form();
    assert_eq!(check_omega_vanishes(&eps).unwrap(), ZeroVerdict::ProvenNonZero);
    match global_lagrangian(&eps, EXACT) {
        Err(Error::ObstructionNonzero { omega }) => assert_eq!(omega, "(1/2) dx∧dy"),
        other => panic!("unexpected {other:?}"),
    }
    assert!(tonti_first_order(&eps, EXACT).is_ok());
}

#[test]
fn shear_chart_invariance() {
    let eps = catalog::GEODESIC.source_form();
    let s = eps.space();
    let p = |t: &str| s.parse(t).unwrap();
    let shear = PointTransform::new(vec![p("x"), p("y + x^3")], vec![p("x"), p("y - x^3")]).unwrap();
    let report = chart_invariance_probe(&eps, &shear, 10, EXACT, &SamplePlan::default()).unwrap();
    assert!(report.max_residual() < 1e-8, "{report:?}");
}

#[test]
fn noninvertible_chart_is_rejected() {
    let s = JetSpace::new(vec!["x"], 2).unwrap();
    let p = |t: &str| s.parse(t).unwrap();
    assert_eq!(PointTransform::new(vec![p("x^2")], vec![p("x")]), Err(Error::NonInvertiblePair));
}

#[test]
fn homogeneous_catalog_systems() {
    for entry in catalog::ALL {
        let eps = entry.source_form();
        let finding = homogeneity_degree(&eps);
        if !finding.applicable() {
            continue;
        }
        let reduced = homogeneous_variational_check(&eps).unwrap();
        assert_eq!(reduced.passed(), helmholtz(&eps).unwrap().passed(), "{}", entry.name);
        if reduced.passed() {
            let (a, b) = eps.affine().unwrap();
            assert_eq!(reconstruct_a(b, finding.degree.as_ref().unwrap()).unwrap(), a.to_vec(), "{}", entry.name);
            assert_eq!(check_omega_vanishes(&eps).unwrap(), ZeroVerdict::ProvenZero, "{}", entry.name);
            let l = auto_global(&eps, EXACT).unwrap();
            assert_eq!(euler_lagrange(&l).unwrap().eps(), eps.eps(), "{}", entry.name);
        }
    }
}

#[test]
fn affine_parts_have_shifted_degrees() {
    let eps = catalog::GEODESIC.source_form();
    let (a, b) = eps.affine().unwrap();
    let s = eps.space();
    let deg = |coeffs: Vec<_>| homogeneity_degree(&SourceForm::new(s, coeffs).unwrap()).degree;
    assert_eq!(deg(a.to_vec()), Some(lepage_core::symbolic::int(2)));
    let diag: Vec<_> = (0..2).map(|i| b[i][i].clone()).collect();
    assert_eq!(deg(diag), Some(lepage_core::symbolic::int(0)));
}

#[test]
fn zero_section_singularities_are_domain_errors() {
    let s = JetSpace::new(vec!["x", "y"], 2).unwrap();
    let singular_a = SourceForm::parse(&s, &["x'' + y'^3/(x'^2 + y'^2)", "y''"]).unwrap();
    assert!(matches!(lepage_core::globalization::omega(&singular_a), Err(Error::Domain(_))));
    let singular_b = SourceForm::parse(&s, &["x''/(x'^2 + y'^2)", "y''"]).unwrap();
    for mode in [EXACT, IntegrationMode::NumericFallback] {
        assert!(matches!(lepage_core::globalization::kappa(&singular_b, mode), Err(Error::Domain(_))));
        assert!(matches!(decompose(&singular_b, mode), Err(Error::Domain(_))));
    }
}
