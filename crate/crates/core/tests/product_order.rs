use std::f64::consts::PI;

use nalgebra::Matrix4;
use nccausal_core::finite_geometry::latitude;
use nccausal_core::product_causality::{
    causal_report, curve_oracle, product_symbol, reachable_longitudes, ArcSet, NotRelatedReason,
};
use nccausal_core::spacetime::{max_proper_time, proper_time};
use nccausal_core::{
    causal_symbol, causally_precedes, causally_related, lorentzian_distance, CausalVerdict, Event, FiniteDirac,
    Herm2, InternalState, ProductState,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn e(t: f64, x: f64) -> Event {
    Event::new(t, x)
}

fn w(t: f64, x: f64, z: f64, theta: f64) -> ProductState {
    ProductState::new(e(t, x), InternalState::from_latitude_longitude(z, theta).unwrap())
}

#[test]
fn speed_limit_examples_agree_with_the_curve_oracle() {
    let df = FiniteDirac::new(1.0, 2.0).unwrap();
    let slow = (w(0.0, 0.0, 0.0, 0.0), w(2.0, 0.0, 0.0, 1.5));
    let fast = (w(0.0, 0.0, 0.0, 0.0), w(2.0, 0.0, 0.0, PI));
    assert_eq!(causally_related(&slow.0, &slow.1, &df), CausalVerdict::Related);
    assert!(curve_oracle(&slow.0, &slow.1, &df, 4));
    assert_eq!(
        causally_related(&fast.0, &fast.1, &df),
        CausalVerdict::NotRelated(NotRelatedReason::SpeedLimitExceeded)
    );
    assert!(!curve_oracle(&fast.0, &fast.1, &df, 4));
}

#[test]
fn borderline_speed_is_accepted_by_both_sides() {
    let df = FiniteDirac::new(0.0, 1.0).unwrap();
    let (a, b) = (w(0.0, 0.0, 0.3, 0.0), w(2.0, 0.0, 0.3, 2.0));
    assert!(causally_related(&a, &b, &df).is_related());
    assert!(curve_oracle(&a, &b, &df, 4));
}

#[test]
fn light_cone_admits_a_single_longitude() {
    let df = FiniteDirac::new(0.0, 1.0).unwrap();
    let source = w(0.0, 0.0, 0.0, 0.7);
    match reachable_longitudes(&source, &e(1.5, -1.5), &df).unwrap() {
        ArcSet::Arc { center, half_width } => {
            assert_eq!(half_width, 0.0);
            assert!((center - 0.7).abs() < 1e-15);
        }
        other => panic!("{other:?}"),
    }
    assert!(causally_related(&source, &w(1.5, -1.5, 0.0, 0.7), &df).is_related());
    assert!(!causally_related(&source, &w(1.5, -1.5, 0.0, 0.7 + 1e-6), &df).is_related());
    assert_eq!(reachable_longitudes(&source, &e(PI, 0.0), &df).unwrap(), ArcSet::Full);
    assert_eq!(reachable_longitudes(&source, &e(0.5, 2.0), &df).unwrap(), ArcSet::Empty);
}

#[test]
fn report_names_the_first_failing_condition() {
    let df = FiniteDirac::new(0.0, 1.0).unwrap();
    // Spacelike and on different parallels: the base condition wins.
    let r = causal_report(&w(0.0, 0.0, 0.0, 0.0), &w(0.0, 1.0, 0.5, 0.0), &df);
    assert_eq!(r.verdict, CausalVerdict::NotRelated(NotRelatedReason::BaseNotCausal));
    let r = causal_report(&w(0.0, 0.0, 0.0, 0.0), &w(1.0, 0.0, 0.5, 3.0), &df);
    assert_eq!(r.verdict, CausalVerdict::NotRelated(NotRelatedReason::LatitudeMismatch));
}

/// `J[D, a]` for `a = f·1` written out from explicit Kronecker blocks.
fn scalar_symbol_by_hand(ft: f64, fx: f64) -> Matrix4<Complex64> {
    let c = causal_symbol(ft, fx);
    let m = c.matrix();
    Matrix4::from_fn(|r, col| if r % 2 == col % 2 { m[(r / 2, col / 2)] } else { Complex64::new(0.0, 0.0) })
}

#[test]
fn scalar_elements_reduce_to_the_base_symbol() {
    let df = FiniteDirac::new(0.3, -1.1).unwrap();
    let one = Herm2::identity();
    for (ft, fx) in [(1.0, 0.0), (0.2, -0.7), (-1.5, 2.5)] {
        let s = product_symbol(&one.scale(4.0), &one.scale(ft), &one.scale(fx), &df);
        let diff = s.matrix() - scalar_symbol_by_hand(ft, fx);
        assert!(diff.norm() < 1e-14, "{diff}");
    }
    let s = product_symbol(&one, &one, &Herm2::zeros(), &df);
    let minus_identity = Matrix4::<Complex64>::identity() * Complex64::new(-1.0, 0.0);
    assert!((s.matrix() - minus_identity).norm() < 1e-14);
    let constant = product_symbol(&one.scale(3.0), &Herm2::zeros(), &Herm2::zeros(), &df);
    assert_eq!(constant.matrix(), &Matrix4::zeros());
}

#[test]
fn zigzag_curve_is_shorter_than_the_geodesic() {
    let zigzag = proper_time(&[e(0.0, 0.0), e(1.0, 0.6), e(2.0, 0.0)]).unwrap();
    assert!((zigzag - 1.6).abs() < 1e-12);
    assert!(zigzag < lorentzian_distance(&e(0.0, 0.0), &e(2.0, 0.0)));
    let best = max_proper_time(&e(0.0, 0.0), &e(5.0, 3.0), 8).unwrap();
    assert!((best - 4.0).abs() < 1e-3);
}

fn future_state(base: &ProductState, dt: f64, slope: f64, df: &FiniteDirac, fraction: f64) -> ProductState {
    let q = e(base.event.t + dt, base.event.x + slope * dt);
    let z = latitude(&base.internal);
    let theta = nccausal_core::finite_geometry::longitude(&base.internal).unwrap();
    let budget = df.gap() * lorentzian_distance(&base.event, &q);
    ProductState::new(q, InternalState::from_latitude_longitude(z, theta + fraction * budget).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(256) })]

    #[test]
    fn relation_is_reflexive(t in -5.0f64..5.0, x in -5.0f64..5.0, z in -1.0f64..1.0, theta in -PI..PI) {
        let df = FiniteDirac::new(0.0, 1.5).unwrap();
        let s = w(t, x, z, theta);
        prop_assert!(causally_related(&s, &s, &df).is_related());
    }

    #[test]
    fn chains_within_the_speed_limit_compose(
        t in -3.0f64..3.0, x in -3.0f64..3.0, z in -0.9f64..0.9, theta in -PI..PI,
        dt1 in 0.01f64..2.0, s1 in -0.99f64..0.99, f1 in -0.9f64..0.9,
        dt2 in 0.01f64..2.0, s2 in -0.99f64..0.99, f2 in -0.9f64..0.9,
    ) {
        let df = FiniteDirac::new(-0.5, 0.75).unwrap();
        let a = w(t, x, z, theta);
        let b = future_state(&a, dt1, s1, &df, f1);
        let c = future_state(&b, dt2, s2, &df, f2);
        prop_assert!(causally_related(&a, &b, &df).is_related());
        prop_assert!(causally_related(&b, &c, &df).is_related());
        prop_assert!(causally_related(&a, &c, &df).is_related());
    }

    #[test]
    fn mutual_relation_forces_equality(
        t in -2.0f64..2.0, x in -2.0f64..2.0, dt in -1.0f64..1.0, dx in -1.0f64..1.0,
        z in -0.9f64..0.9, theta in -PI..PI, dtheta in -1.0f64..1.0,
    ) {
        let df = FiniteDirac::new(0.0, 1.0).unwrap();
        let a = w(t, x, z, theta);
        let b = w(t + dt, x + dx, z, theta + dtheta);
        if causally_related(&a, &b, &df).is_related() && causally_related(&b, &a, &df).is_related() {
            prop_assert_eq!(a.event, b.event);
            prop_assert!(dtheta.abs() < 1e-12);
        }
    }

    #[test]
    fn reachable_arc_matches_the_relation(
        t in -2.0f64..2.0, x in -2.0f64..2.0, z in -0.9f64..0.9, theta in -PI..PI,
        qt in -2.0f64..4.0, qx in -3.0f64..3.0, target in -PI..PI,
    ) {
        let df = FiniteDirac::new(1.0, 2.0).unwrap();
        let source = w(t, x, z, theta);
        let goal = w(qt, qx, z, target);
        let report = causal_report(&source, &goal, &df);
        prop_assume!(report.speed_margin.map_or(true, |m| m.abs() > 1e-9));
        let arc = reachable_longitudes(&source, &goal.event, &df).unwrap();
        prop_assert_eq!(arc.contains(target), report.verdict.is_related());
    }

    #[test]
    fn same_internal_state_restricts_to_the_base_order(
        t in -2.0f64..2.0, x in -2.0f64..2.0, qt in -2.0f64..2.0, qx in -2.0f64..2.0,
        z in -1.0f64..1.0, theta in -PI..PI,
    ) {
        let df = FiniteDirac::new(0.0, 1.0).unwrap();
        let (a, b) = (w(t, x, z, theta), w(qt, qx, z, theta));
        prop_assert_eq!(causally_related(&a, &b, &df).is_related(), causally_precedes(&a.event, &b.event));
    }
}
