#![allow(dead_code)]

use finsler_duality::gauge::GaugeBody;
use finsler_duality::induced::EmbeddedSphere;
use nalgebra::{dvector, DMatrix, DVector};

/// Perimeter of the ellipse with semi-axes `a`, `b` by the periodic
/// trapezoid rule, which converges geometrically for this integrand.
pub fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    let m = 4096;
    let h = std::f64::consts::TAU / m as f64;
    (0..m)
        .map(|k| {
            let t = k as f64 * h;
            (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt()
        })
        .sum::<f64>()
        * h
}

pub const PERIMETER_08_06: f64 = 4.420698432141901;
pub const PERIMETER_10_06: f64 = 5.105399772679626;
pub const PERIMETER_10_08: f64 = 5.672333577794897;

pub fn euclidean() -> GaugeBody {
    GaugeBody::ellipsoid(DMatrix::identity(3, 3)).unwrap().with_label("euclidean")
}

/// Axis-aligned ellipsoid with semi-axes 1, 0.8, 0.6.
pub fn axis_ellipsoid() -> GaugeBody {
    GaugeBody::ellipsoid(DMatrix::from_diagonal(&dvector![1.0, 1.0 / 0.64, 1.0 / 0.36]))
        .unwrap()
        .with_label("ellipsoid(1,0.8,0.6)")
}

pub fn tilted_ellipsoid() -> GaugeBody {
    GaugeBody::ellipsoid(DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.1, 0.2, 1.5, 0.0, 0.1, 0.0, 2.5]))
        .unwrap()
        .with_label("tilted ellipsoid")
}

pub fn power_mean() -> GaugeBody {
    let b = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.2, 0.0, 0.2, 0.6]);
    GaugeBody::power_mean(vec![DMatrix::identity(3, 3), b], 4)
        .unwrap()
        .with_label("power mean p=4")
}

pub fn randers() -> GaugeBody {
    let m = DMatrix::from_row_slice(3, 3, &[1.2, 0.1, 0.0, 0.1, 0.9, 0.05, 0.0, 0.05, 1.1]);
    GaugeBody::randers(m, dvector![0.2, -0.1, 0.15]).unwrap().with_label("randers")
}

pub fn pair(b1: GaugeBody, b2: GaugeBody) -> EmbeddedSphere {
    EmbeddedSphere::new(b1, b2).unwrap()
}

/// Symmetric pairs used across the property tests, with a short name.
pub fn symmetric_pairs() -> Vec<(&'static str, EmbeddedSphere)> {
    vec![
        ("ellipsoid/euclidean", pair(axis_ellipsoid(), euclidean())),
        ("power-mean/euclidean", pair(power_mean(), euclidean())),
        ("euclidean/power-mean", pair(euclidean(), power_mean())),
        ("tilted/power-mean", pair(tilted_ellipsoid(), power_mean())),
        ("power-mean/ellipsoid", pair(power_mean(), axis_ellipsoid())),
        ("tilted/ellipsoid", pair(tilted_ellipsoid(), axis_ellipsoid())),
    ]
}

pub fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}
