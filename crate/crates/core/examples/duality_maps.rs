//! The boundary map φ, the interior map Φ and the symmetric map ψ between
//! co-sphere bundles of a pair and its swap.

use finsler_duality::gauge::GaugeBody;
use finsler_duality::geodesics::lift_closed_curve;
use finsler_duality::induced::EmbeddedSphere;
use finsler_duality::maps::{boundary_map, interior_map, symmetric_boundary_map};
use finsler_duality::measures::action;
use nalgebra::{dvector, DMatrix};

fn main() -> finsler_duality::Result<()> {
    let b = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.2, 0.0, 0.2, 0.6]);
    let body1 = GaugeBody::power_mean(vec![DMatrix::identity(3, 3), b], 4)?;
    let sphere = EmbeddedSphere::new(body1, GaugeBody::ellipsoid(DMatrix::identity(3, 3))?)?;
    let swapped = sphere.swapped();

    let q = sphere.body1().project(&dvector![0.2, 0.9, -0.4]);
    let v = sphere.conormal(&q)?.cross(&dvector![1.0, 0.0, 0.0]);
    let x = sphere.lift(&q, &v)?;

    let phi = boundary_map(&sphere, &x.q, &x.p)?;
    let psi = symmetric_boundary_map(&sphere, &x.q, &x.p)?;
    println!("φ(q, p) = ({:.5?}, {:.5?})", phi.q.as_slice(), phi.p.as_slice());
    println!("ψ(q, p) = ({:.5?}, {:.5?})", psi.q.as_slice(), psi.p.as_slice());
    println!("F₂*(φ) − 1 = {:.2e}", sphere.dual2().value(&phi.q) - 1.0);

    // Φ on an interior level, and back again through the swapped pair.
    let half = sphere.cosphere_point(x.q.clone(), &x.p * 0.5)?;
    let there = interior_map(&sphere, &half.q, &half.p)?;
    let back = interior_map(&swapped, &there.q, &there.p)?;
    println!("Φ round trip error {:.2e}", (&back.q - &half.q).norm() + (&back.p - &half.p).norm());

    // Actions of a closed loop and of its images.
    let m = 4000;
    let loop_q: Vec<_> = (0..m)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / m as f64;
            sphere.body1().project(&dvector![t.cos(), 0.3 * t.sin(), t.sin()])
        })
        .collect();
    let lifted = lift_closed_curve(&sphere, &loop_q)?;
    let images = |f: fn(&EmbeddedSphere, &_, &_) -> _| -> finsler_duality::Result<Vec<_>> {
        lifted.iter().map(|x| f(&sphere, &x.q, &x.p)).collect()
    };
    let a = action(&lifted, true);
    println!("action {a:.10}");
    println!("  after φ {:.10}", action(&images(boundary_map)?, true));
    println!("  after ψ {:.10}", action(&images(symmetric_boundary_map)?, true));
    Ok(())
}
