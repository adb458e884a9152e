//! Dual gauges, Legendre transforms and biduality for a few bodies.

use finsler_duality::gauge::{certify, dual_gauge, legendre, legendre_inverse, GaugeBody};
use nalgebra::{dvector, DMatrix};

fn main() -> finsler_duality::Result<()> {
    let ellipsoid = GaugeBody::ellipsoid(DMatrix::from_diagonal(&dvector![1.0, 1.5625, 2.0 + 7.0 / 9.0]))?;
    let b = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.2, 0.0, 0.2, 0.6]);
    let power_mean = GaugeBody::power_mean(vec![DMatrix::identity(3, 3), b], 4)?;

    let x = dvector![0.3, -0.7, 0.5];
    for body in [&ellipsoid, &power_mean] {
        let cert = certify(body, 500, 1);
        println!("{}: min curvature eigenvalue {:.4}, certified {}", body.label(), cert.min_eigenvalue, cert.certified);

        let q = body.project(&x);
        let xi = legendre(body, &q)?;
        println!("  q = {:.5?}  F(q) = {:.3e}", q.as_slice(), body.value(&q) - 1.0);
        println!("  L(q) = {:.5?}  <L(q), q> = {:.15}", xi.as_slice(), xi.dot(&q));
        println!("  F*(L(q)) = {:.15}", dual_gauge(body, &xi)?);
        println!("  |L⁻¹(L(q)) − q| = {:.2e}", (legendre_inverse(body, &xi)? - &q).norm());

        let bidual = body.dual().dual();
        println!("  |F** − F| at x = {:.2e}", (bidual.value(&x) - body.value(&x)).abs());
    }
    Ok(())
}
