//! Reference values computed independently of the library's solvers.

mod common;

use std::f64::consts::PI;

use common::*;
use finsler_duality::gauge::{dual_gauge, GaugeBody};
use finsler_duality::geodesics::{girth, GirthOptions};
use finsler_duality::induced::EmbeddedSphere;
use finsler_duality::measures::{ht_volume, VolumeOptions};
use nalgebra::{DMatrix, DVector};

/// Gauss–Kummer series `π(a+b) Σ C(½, n)² hⁿ`.
fn perimeter_series(a: f64, b: f64) -> f64 {
    let h = ((a - b) / (a + b)).powi(2);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..200 {
        let c = (0.5 - (n - 1) as f64) / n as f64;
        term *= c * c * h;
        sum += term;
    }
    PI * (a + b) * sum
}

#[test]
fn frozen_perimeters_match_two_quadratures() {
    for (a, b, frozen) in [(0.8, 0.6, PERIMETER_08_06), (1.0, 0.6, PERIMETER_10_06), (1.0, 0.8, PERIMETER_10_08)] {
        assert!((ellipse_perimeter(a, b) - frozen).abs() < 1e-13);
        assert!((perimeter_series(a, b) - frozen).abs() < 1e-13);
    }
}

fn fibonacci_sphere(n: usize) -> Vec<DVector<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            v(&[r * t.cos(), r * t.sin(), z])
        })
        .collect()
}

#[test]
fn dual_gauge_matches_brute_force_mesh() {
    let mesh = fibonacci_sphere(200_000);
    for body in [axis_ellipsoid(), power_mean(), randers()] {
        let boundary: Vec<_> = mesh.iter().map(|x| body.project(x)).collect();
        for xi in [v(&[1.0, 0.0, 0.0]), v(&[0.3, -0.8, 0.5]), v(&[-0.2, 0.1, -1.4])] {
            let brute = boundary.iter().map(|x| xi.dot(x)).fold(f64::MIN, f64::max);
            let solved = dual_gauge(&body, &xi).unwrap();
            // The mesh maximum is a lower bound that converges quadratically.
            assert!(solved >= brute - 1e-12, "{}: {solved} < {brute}", body.label());
            assert!((solved - brute) / solved < 1e-4, "{}: {solved} vs {brute}", body.label());
        }
    }
}

fn fd_gradient(body: &GaugeBody, x: &DVector<f64>) -> DVector<f64> {
    let h = 1e-6;
    DVector::from_fn(x.len(), |i, _| {
        let mut e = DVector::zeros(x.len());
        e[i] = h;
        (body.value(&(x + &e)) - body.value(&(x - &e))) / (2.0 * h)
    })
}

#[test]
fn gradients_and_hessians_match_finite_differences() {
    let x = v(&[0.4, -0.9, 0.7]);
    for body in [axis_ellipsoid(), power_mean(), randers(), power_mean().dual(), randers().dual()] {
        let g = body.gradient(&x);
        let fd = fd_gradient(&body, &x);
        assert!((&g - &fd).norm() < 1e-8, "{}: gradient {g} vs {fd}", body.label());

        // Hessian of ½F² from differences of F∇F.
        let h = body.hessian_half_sq(&x);
        let step = 1e-5;
        let fd_h = DMatrix::from_fn(3, 3, |i, j| {
            let mut e = DVector::zeros(3);
            e[j] = step;
            let grad = |y: &DVector<f64>| {
                let (f, g) = body.first_order(y);
                g[i] * f
            };
            (grad(&(&x + &e)) - grad(&(&x - &e))) / (2.0 * step)
        });
        assert!((&h - &fd_h).amax() < 1e-7, "{}: hessian\n{h}\nvs\n{fd_h}", body.label());
    }
}

#[test]
fn intrinsic_ellipsoid_area_is_affine_invariant() {
    // Both norms move together under a linear map, so the area stays 4π.
    let sphere = EmbeddedSphere::intrinsic(tilted_ellipsoid());
    let v = ht_volume(&sphere, &VolumeOptions::default()).unwrap();
    assert!((v.value - 4.0 * PI).abs() < 1e-8, "{}", v.value);
}

#[test]
fn induced_length_of_principal_ellipse() {
    let sphere = pair(axis_ellipsoid(), euclidean());
    let m = 20_000;
    let pts: Vec<_> = (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            sphere.body1().project(&v(&[t.cos(), 0.0, t.sin()]))
        })
        .collect();
    let length = sphere.induced_length(&pts, true).unwrap();
    assert!((length - PERIMETER_10_06).abs() < 1e-7, "{length}");
}

#[test]
fn girth_scales_inversely_with_the_norm() {
    let sphere = pair(euclidean().scaled(2.0).unwrap(), euclidean());
    let g = girth(&sphere, &GirthOptions::default()).unwrap();
    assert!((g.girth - PI).abs() < 1e-6 * PI, "{}", g.girth);
}
