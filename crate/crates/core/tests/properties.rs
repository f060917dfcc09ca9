use proptest::prelude::*;
use relhel_core::core4::*;
use relhel_core::filaments::shapes;
use relhel_core::filaments::*;

fn three(r: f64) -> impl Strategy<Value = ThreeVector> {
    (-r..r, -r..r, -r..r).prop_map(|(a, b, c)| ThreeVector::new(a, b, c))
}

fn subluminal(max: f64) -> impl Strategy<Value = ThreeVector> {
    three(1.0).prop_filter_map("inside the ball", move |v| {
        let n = v.norm();
        (n < 1.0).then(|| (max * n) * v.normalized())
    })
}

fn bivector() -> impl Strategy<Value = Bivector> {
    (three(5.0), three(5.0)).prop_map(|(e, b)| Bivector::new(e, b))
}

fn rotate(p: ThreeVector, axis: ThreeVector, angle: f64) -> ThreeVector {
    let k = axis.normalized();
    let (s, c) = angle.sin_cos();
    c * p + s * k.cross(&p) + ((1.0 - c) * k.dot(&p)) * k
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn double_dual_is_minus_identity(m in bivector()) {
        let d = hodge_dual(&hodge_dual(&m));
        prop_assert!((d.e + m.e).max_abs() <= 1e-14 && (d.b + m.b).max_abs() <= 1e-14);
    }

    #[test]
    fn dual_swaps_the_invariants(m in bivector()) {
        let (a, b) = bivector_invariants(&m);
        let (da, db) = bivector_invariants(&hodge_dual(&m));
        prop_assert!((da + a).abs() <= 1e-12 * (1.0 + a.abs()));
        prop_assert!((db + b).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn invariants_survive_boosts(m in bivector(), beta in subluminal(0.95)) {
        let boost = LorentzBoost::new(beta).unwrap();
        let (a, b) = bivector_invariants(&m);
        let (ba, bb) = bivector_invariants(&boost_bivector(&boost, &m));
        let scale = m.e.norm_sq() + m.b.norm_sq();
        prop_assert!((ba - a).abs() <= 1e-10 * scale);
        prop_assert!((bb - b).abs() <= 1e-10 * scale);
    }

    #[test]
    fn four_velocity_is_unit(v in subluminal(0.999)) {
        let u = four_velocity(v).unwrap();
        prop_assert!((minkowski_dot(&u, &u) - 1.0).abs() <= 1e-12 * u.time() * u.time());
        prop_assert!((three_velocity(&u) - v).max_abs() <= 1e-12);
    }

    #[test]
    fn raising_undoes_lowering(c in prop::array::uniform4(-10.0f64..10.0)) {
        let v = FourVector::contravariant(c);
        prop_assert_eq!(raise_index(lower_index(v)), v);
        prop_assert_eq!(lower_index(v).to_contravariant(), v);
    }

    #[test]
    fn interior_product_is_orthogonal_to_the_observer(m in bivector(), v in subluminal(0.9)) {
        let u = four_velocity(v).unwrap();
        let e = interior_product(&u, &m);
        let b = interior_product(&u, &hodge_dual(&m));
        let scale = u.time() * u.time() * (m.e.norm() + m.b.norm());
        prop_assert!(minkowski_dot(&u, &e).abs() <= 1e-12 * scale);
        prop_assert!(minkowski_dot(&u, &b).abs() <= 1e-12 * scale);
    }

    #[test]
    fn boost_then_inverse_is_identity(beta in subluminal(0.9), c in prop::array::uniform4(-5.0f64..5.0)) {
        let boost = LorentzBoost::new(beta).unwrap();
        let v = FourVector::contravariant(c);
        let back = boost_four_vector(&boost.inverse(), &boost_four_vector(&boost, &v));
        for (got, want) in back.components.iter().zip(c) {
            prop_assert!((got - want).abs() <= 1e-11 * (1.0 + want.abs()) * boost.gamma() * boost.gamma());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rigid_motions_preserve_the_link(
        axis in three(1.0).prop_filter("nonzero", |a| a.norm() > 0.1),
        angle in -3.0f64..3.0,
        shift in three(4.0),
    ) {
        let (a, b) = shapes::hopf_pair(96).unwrap();
        let lk0 = gauss_linking_number(&a, &b).unwrap().rounded;
        let moved = |lp: &LoopPolyline| {
            let pts: Vec<_> = lp.spatial_points().into_iter().map(|p| rotate(p, axis, angle) + shift).collect();
            LoopPolyline::from_spatial(&pts, 0.0).unwrap()
        };
        let (ma, mb) = (moved(&a), moved(&b));
        let g = gauss_linking_number(&ma, &mb).unwrap();
        prop_assert!(g.trustworthy);
        prop_assert_eq!(g.rounded, lk0);
        prop_assert_eq!(crossing_link_oracle(&ma, &mb).unwrap(), lk0);
    }

    #[test]
    fn link_is_symmetric_and_odd_under_reversal(q in 1u32..3) {
        let (a, b) = shapes::torus_link_pair(128, q).unwrap();
        let ab = gauss_linking_number(&a, &b).unwrap().value;
        let ba = gauss_linking_number(&b, &a).unwrap().value;
        let rev = gauss_linking_number(&a.reversed(), &b).unwrap().value;
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!((ab + rev).abs() <= 1e-12);
        prop_assert_eq!(crossing_link_oracle(&a, &b).unwrap(), ab.round() as i64);
    }
}
