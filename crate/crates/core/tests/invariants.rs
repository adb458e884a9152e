//! Property tests for the gauge, induced-metric and map invariants.

mod common;

use common::*;
use finsler_duality::gauge::{dual_gauge, legendre, legendre_inverse, GaugeBody};
use finsler_duality::induced::EmbeddedSphere;
use finsler_duality::maps::{boundary_map, symmetric_boundary_map};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn direction() -> impl Strategy<Value = DVector<f64>> {
    prop::array::uniform3(-1.0..1.0f64)
        .prop_filter("away from zero", |a| a.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(|a| v(&a))
}

/// Random SPD matrices with condition number at most about 20.
fn spd() -> impl Strategy<Value = DMatrix<f64>> {
    (prop::array::uniform9(-1.0..1.0f64), prop::array::uniform3(0.3..2.0f64)).prop_map(|(r, d)| {
        let raw = DMatrix::from_row_slice(3, 3, &r);
        let q = raw.qr().q();
        &q * DMatrix::from_diagonal(&DVector::from_row_slice(&d)) * q.transpose()
    })
}

fn body() -> impl Strategy<Value = GaugeBody> {
    prop_oneof![
        spd().prop_map(|a| GaugeBody::ellipsoid(a).unwrap()),
        (spd(), spd()).prop_map(|(a, b)| GaugeBody::power_mean(vec![a, b], 4).unwrap()),
        Just(randers()),
    ]
}

fn symmetric_sphere() -> impl Strategy<Value = EmbeddedSphere> {
    (spd(), spd(), any::<bool>()).prop_map(|(a, b, pm)| {
        let b1 = GaugeBody::ellipsoid(a).unwrap();
        let b2 = if pm {
            GaugeBody::power_mean(vec![DMatrix::identity(3, 3), b], 4).unwrap()
        } else {
            GaugeBody::ellipsoid(b).unwrap()
        };
        EmbeddedSphere::new(b1, b2).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauge_is_positively_homogeneous(body in body(), x in direction(), s in 0.1..10.0f64) {
        let f = body.value(&x);
        prop_assert!((body.value(&(&x * s)) - s * f).abs() <= 1e-12 * s * f);
    }

    #[test]
    fn legendre_round_trips(body in body(), x in direction()) {
        let q = body.project(&x);
        let xi = legendre(&body, &q).unwrap();
        prop_assert!((xi.dot(&q) - 1.0).abs() < 1e-12);
        prop_assert!((dual_gauge(&body, &xi).unwrap() - 1.0).abs() < 1e-10);
        prop_assert!((legendre_inverse(&body, &xi).unwrap() - &q).norm() < 1e-8);
        prop_assert!((legendre(&body.dual(), &xi).unwrap() - &q).norm() < 1e-8);
    }

    #[test]
    fn bidual_recovers_gauge(body in body(), x in direction()) {
        let bidual = dual_gauge(&body.dual(), &x).unwrap();
        let f = body.value(&x);
        prop_assert!((bidual - f).abs() <= 1e-8 * f);
    }

    #[test]
    fn young_inequality_holds(body in body(), x in direction(), xi in direction()) {
        prop_assert!(xi.dot(&x) <= body.value(&x) * dual_gauge(&body, &xi).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn lifted_covectors_are_canonical(sphere in symmetric_sphere(), x in direction(), w in direction()) {
        let q = sphere.body1().project(&x);
        let n = sphere.conormal(&q).unwrap();
        let v = &w - &q * (n.dot(&w) / n.dot(&q));
        prop_assume!(v.norm() > 1e-3);
        let lifted = sphere.lift(&q, &v).unwrap();
        prop_assert!(lifted.p.dot(&q).abs() < 1e-12);
        prop_assert!((lifted.level - 1.0).abs() < 1e-10);
        // G never exceeds the ambient dual norm of the same covector.
        prop_assert!(sphere.induced_hamiltonian(&q, &lifted.p).unwrap() <= sphere.dual2().value(&lifted.p) + 1e-12);
        let g2 = sphere.induced_hamiltonian(&q, &(&lifted.p * 2.5)).unwrap();
        prop_assert!((g2 - 2.5).abs() < 1e-10);
    }

    #[test]
    fn maps_land_on_dual_sphere_and_respect_symmetry(sphere in symmetric_sphere(), x in direction(), w in direction()) {
        let q = sphere.body1().project(&x);
        let n = sphere.conormal(&q).unwrap();
        let v = &w - &q * (n.dot(&w) / n.dot(&q));
        prop_assume!(v.norm() > 1e-3);
        let p = sphere.lift(&q, &v).unwrap().p;
        let phi = boundary_map(&sphere, &q, &p).unwrap();
        prop_assert!((sphere.dual2().value(&phi.q) - 1.0).abs() < 1e-10);
        prop_assert!((sphere.swapped().induced_hamiltonian(&phi.q, &phi.p).unwrap() - 1.0).abs() < 1e-9);
        let psi = symmetric_boundary_map(&sphere, &q, &p).unwrap();
        let anti = symmetric_boundary_map(&sphere, &-&q, &-&p).unwrap();
        prop_assert!((&anti.q + &psi.q).norm() < 1e-9 && (&anti.p + &psi.p).norm() < 1e-9);
    }
}
