use lepage_core::forms::{Basis, BasisMode, DiffForm};
use lepage_core::numeric::{random_polynomial, SamplePlan};
use lepage_core::{Expr, VarId};
use proptest::prelude::*;

fn coords() -> Vec<VarId> {
    vec![VarId::TIME, VarId::pos(0), VarId::pos(1), VarId::vel(0), VarId::vel(1)]
}

fn basis() -> Vec<Basis> {
    vec![Basis::Dt, Basis::dx(0, 0), Basis::dx(0, 1), Basis::dx(1, 0), Basis::dx(1, 1)]
}

fn coefficient(seed: u64) -> Expr {
    let mut rng = SamplePlan::with_seed(seed).rng();
    random_polynomial(&mut rng, &coords(), 3, 4)
}

fn one_form(seed: u64, mode: BasisMode) -> DiffForm {
    let terms = basis().into_iter().enumerate().map(|(k, b)| (vec![b], coefficient(seed.wrapping_add(k as u64))));
    DiffForm::from_terms(1, mode, terms.collect::<Vec<_>>()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>()) {
        let f = DiffForm::function(coefficient(seed));
        prop_assert!(f.d().unwrap().d().unwrap().is_structurally_zero());
        let w = one_form(seed, BasisMode::Coordinate);
        prop_assert!(w.d().unwrap().d().unwrap().is_structurally_zero());
        let c = one_form(seed, BasisMode::Contact);
        prop_assert!(c.d().unwrap().d().unwrap().is_structurally_zero());
    }

    #[test]
    fn wedge_is_graded_commutative(a in any::<u64>(), b in any::<u64>()) {
        let p = one_form(a, BasisMode::Coordinate);
        let q = one_form(b, BasisMode::Coordinate);
        prop_assert!(p.wedge(&q).unwrap().add(&q.wedge(&p).unwrap()).unwrap().is_structurally_zero());
        prop_assert!(p.wedge(&p).unwrap().is_structurally_zero());
    }

    #[test]
    fn leibniz_rule(a in any::<u64>(), b in any::<u64>()) {
        let f = DiffForm::function(coefficient(a));
        let w = one_form(b, BasisMode::Coordinate);
        let lhs = f.wedge(&w).unwrap().d().unwrap();
        let rhs = f.d().unwrap().wedge(&w).unwrap().add(&f.wedge(&w.d().unwrap()).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_structurally_zero());
    }

    #[test]
    fn contact_round_trip(seed in any::<u64>()) {
        let w = one_form(seed, BasisMode::Coordinate);
        prop_assert_eq!(w.to_contact().to_coordinate(), w.clone());
        let two = w.wedge(&one_form(seed ^ 0x55, BasisMode::Coordinate)).unwrap();
        prop_assert_eq!(two.to_contact().to_coordinate(), two);
    }

    #[test]
    fn contraction_is_an_antiderivation(a in any::<u64>(), b in any::<u64>(), k in 0usize..5) {
        let v = coords()[k];
        let p = one_form(a, BasisMode::Coordinate);
        let q = one_form(b, BasisMode::Coordinate);
        let lhs = p.wedge(&q).unwrap().contract(v).unwrap();
        let rhs = p.contract(v).unwrap().wedge(&q).unwrap().sub(&p.wedge(&q.contract(v).unwrap()).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_structurally_zero());
    }
}
