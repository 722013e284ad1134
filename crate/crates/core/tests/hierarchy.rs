use weylpt_core::engine::{build_q_hierarchy_via, residuals, RhsRoute};
use weylpt_core::reference::{h_table, observable_table, q_table};
use weylpt_core::series::build_h_series;
use weylpt_core::*;

fn hierarchy() -> QHierarchy {
    build_q_hierarchy(7).unwrap()
}

/// Weyl-ordered substitution `T_{r,s}(A, B)` via `T_{r,s} = ½{P, T_{r−1,s}} = ½{X, T_{r,s−1}}`.
fn weyl_substitute(op: &OperatorPoly, x: &PerturbationSeries, p: &PerturbationSeries, max: u32) -> PerturbationSeries {
    let half = num_rational::BigRational::new(1.into(), 2.into());
    let one = PerturbationSeries::from_orders(Convention::Scaled, PerturbationSeries::EXACT, [(0, OperatorPoly::identity())]).unwrap();
    let mut total = PerturbationSeries::new(Convention::Scaled, max);
    for (key, c) in op.terms() {
        let mut t = one.clone();
        for _ in 0..key.s {
            t = x.star(&t, max).unwrap().add(&t.star(x, max).unwrap()).unwrap().scale_rational(&half);
        }
        for _ in 0..key.r {
            t = p.star(&t, max).unwrap().add(&t.star(p, max).unwrap()).unwrap().scale_rational(&half);
        }
        total = total.add(&t.map(|_, o| o.scale(c))).unwrap();
    }
    total
}

#[test]
fn generator_residuals_vanish_through_top_order() {
    let qh = hierarchy();
    let report = residuals(&qh).unwrap();
    assert!(report.all_zero(), "{report:?}");
    qh.check_structure().unwrap();
}

#[test]
fn closed_form_and_graded_routes_agree() {
    let a = build_q_hierarchy_via(7, RhsRoute::ClosedForm).unwrap();
    let b = build_q_hierarchy_via(7, RhsRoute::Graded).unwrap();
    assert_eq!(a, b);
}

#[test]
fn low_generators_match_printed_tables() {
    let qh = hierarchy();
    assert_eq!(qh.get(1), q_table(1).unwrap());
    assert_eq!(qh.get(3), q_table(3).unwrap());
    for k in [0, 2, 4, 6] {
        assert!(qh.get(k).is_zero());
    }
}

#[test]
fn generator_leading_powers_match_printed_tables() {
    // Highest and lowest inverse powers of 𝓜 agree term by term at orders 5 and 7.
    let qh = hierarchy();
    for k in [5, 7] {
        let ours = qh.get(k);
        let printed = q_table(k).unwrap();
        assert_eq!(ours.keys().collect::<Vec<_>>(), printed.keys().collect::<Vec<_>>());
        for key in printed.keys() {
            let a = ours.coeff(*key);
            let b = printed.coeff(*key);
            let lo = |c: &CoeffValue| c.terms().map(|(e, v)| (*e, v.clone())).next().unwrap();
            let hi = |c: &CoeffValue| c.terms().map(|(e, v)| (*e, v.clone())).last().unwrap();
            assert_eq!(lo(&a), lo(&b), "order {k} {key}");
            assert_eq!(hi(&a), hi(&b), "order {k} {key}");
        }
    }
}

#[test]
fn hermitian_hamiltonian_low_orders_match_printed_tables() {
    let qh = hierarchy();
    let hs = build_hermitian_h(&qh, 6).unwrap();
    assert_eq!(hs.get(0), h_table(0).unwrap());
    assert_eq!(hs.get(2), h_table(2).unwrap());
    for k in [1, 3, 5] {
        assert!(hs.get(k).is_zero());
    }
    for k in [0, 2, 4, 6] {
        assert!(hs.get(k).is_hermitian());
    }
}

#[test]
fn hermitian_hamiltonian_fourth_order_is_frozen() {
    let qh = hierarchy();
    let h4 = build_hermitian_h(&qh, 4).unwrap().get(4);
    let m = CoeffValue::m_pow;
    let expect = OperatorPoly::t(6, 0, m(2, 1, -12))
        + OperatorPoly::t(4, 2, m(-36, 1, -10) + m(24, 1, -8))
        + OperatorPoly::t(2, 4, m(-51, 2, -8) + m(36, 1, -6))
        + OperatorPoly::t(2, 0, m(27, 1, -10) + m(-24, 1, -8))
        + OperatorPoly::t(0, 6, m(-7, 2, -6) + m(6, 1, -4))
        + OperatorPoly::t(0, 2, m(15, 2, -8) + m(-12, 1, -6));
    assert_eq!(h4, expect);
}

#[test]
fn observables_through_second_order_match_printed_tables() {
    let qh = hierarchy();
    for which in [Observable::X, Observable::P] {
        let obs = build_observable(which, &qh, 3).unwrap();
        assert!(obs.is_pt_covariant());
        for k in 0..=2 {
            assert_eq!(obs.series.get(k), observable_table(which, k).unwrap(), "{which:?} order {k}");
        }
    }
}

#[test]
fn observables_are_canonical_through_third_order() {
    let qh = hierarchy();
    let x = build_observable(Observable::X, &qh, 3).unwrap().series;
    let p = build_observable(Observable::P, &qh, 3).unwrap().series;
    let comm = x.commutator(&p, 3).unwrap();
    assert_eq!(comm.get(0), OperatorPoly::t(0, 0, GaussianRational::i()));
    for k in 1..=3 {
        assert!(comm.get(k).is_zero(), "order {k}: {}", comm.get(k));
    }
}

#[test]
fn printed_third_order_observables_are_not_canonical() {
    let qh = hierarchy();
    let mut x = build_observable(Observable::X, &qh, 3).unwrap().series;
    let mut p = build_observable(Observable::P, &qh, 3).unwrap().series;
    x.set(3, observable_table(Observable::X, 3).unwrap()).unwrap();
    p.set(3, observable_table(Observable::P, 3).unwrap()).unwrap();
    let comm = x.commutator(&p, 3).unwrap();
    assert!(!comm.get(3).is_zero());
}

#[test]
fn hermitian_hamiltonian_of_physical_observables_is_original_hamiltonian() {
    let qh = hierarchy();
    let hs = build_hermitian_h(&qh, 4).unwrap();
    let x = build_observable(Observable::X, &qh, 3).unwrap().series;
    let p = build_observable(Observable::P, &qh, 3).unwrap().series;
    let mut total = PerturbationSeries::new(Convention::Scaled, 3);
    for k in [0, 2] {
        let sub = weyl_substitute(&hs.get(k), &x, &p, 3);
        let shifted = sub.truncate(3 - k).map(|_, o| o.clone());
        let mut lifted = PerturbationSeries::new(Convention::Scaled, 3);
        for (j, o) in shifted.orders() {
            lifted.set(j + k, o.clone()).unwrap();
        }
        total = total.add(&lifted).unwrap();
    }
    assert_eq!(total, build_h_series().truncate(3));
}

#[test]
fn deeper_requests_are_rejected() {
    assert!(matches!(build_q_hierarchy(9), Err(AlgebraError::UnsupportedOrder(9))));
    let qh = build_q_hierarchy(3).unwrap();
    assert!(matches!(build_hermitian_h(&qh, 6), Err(AlgebraError::InsufficientDepth { .. })));
    assert!(matches!(build_observable(Observable::X, &qh, 4), Err(AlgebraError::UnsupportedOrder(4))));
}

#[test]
fn json_round_trip_of_generator() {
    let qh = hierarchy();
    for (_, q) in qh.orders() {
        let text = serde_json::to_string(&q.to_json()).unwrap();
        let back: weylpt_core::symbol::OperatorJson = serde_json::from_str(&text).unwrap();
        assert_eq!(&OperatorPoly::from_json(&back).unwrap(), q);
    }
}
