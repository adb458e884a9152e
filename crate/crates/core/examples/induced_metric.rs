//! The induced co-Finsler metric G on the unit sphere of one norm, measured
//! with another.

use finsler_duality::induced::EmbeddedSphere;
use finsler_duality::gauge::GaugeBody;
use nalgebra::{dvector, DMatrix};

fn main() -> finsler_duality::Result<()> {
    let body1 = GaugeBody::ellipsoid(DMatrix::from_diagonal(&dvector![1.0, 1.5625, 2.0 + 7.0 / 9.0]))?;
    let body2 = GaugeBody::ellipsoid(DMatrix::identity(3, 3))?;
    let sphere = EmbeddedSphere::new(body1, body2)?;

    let q = sphere.body1().project(&dvector![1.0, 1.0, 1.0]);
    let n = sphere.conormal(&q)?;
    println!("q = {:.5?}, conormal = {:.5?}", q.as_slice(), n.as_slice());

    // Lift a tangent direction to the co-sphere bundle and read off G.
    let v = n.cross(&dvector![0.0, 0.0, 1.0]);
    let lifted = sphere.lift(&q, &v)?;
    println!("lift of v: p = {:.5?}, G(q, p) = {:.15}", lifted.p.as_slice(), lifted.level);

    let shadow = sphere.shadow(&q, &lifted.p)?;
    println!("shadow covector {:.5?} at t* = {:.5?}", shadow.covector.as_slice(), shadow.t);

    // G-length of the equator polygon against the ambient chord length.
    let m = 2000;
    let equator: Vec<_> = (0..m)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / m as f64;
            sphere.body1().project(&dvector![t.cos(), t.sin(), 0.0])
        })
        .collect();
    println!("equator length {:.10}", sphere.induced_length(&equator, true)?);
    Ok(())
}
