//! Girth of an ellipsoid sphere and of its dual, computed independently.

use finsler_duality::gauge::GaugeBody;
use finsler_duality::geodesics::{dual_girth, girth, GirthOptions};
use finsler_duality::induced::EmbeddedSphere;
use nalgebra::{dvector, DMatrix};

fn main() -> finsler_duality::Result<()> {
    // Semi-axes 1, 0.8, 0.6; the shortest symmetric geodesic is the (0.8, 0.6) ellipse.
    let body1 = GaugeBody::ellipsoid(DMatrix::from_diagonal(&dvector![1.0, 1.5625, 2.0 + 7.0 / 9.0]))?;
    let sphere = EmbeddedSphere::new(body1, GaugeBody::ellipsoid(DMatrix::identity(3, 3))?)?;
    let opts = GirthOptions { seed: 1, ..GirthOptions::default() };

    let g = girth(&sphere, &opts)?;
    println!("girth       {:.10} ± {:.1e}  certified {}", g.girth, g.certificate.error_bar, g.certificate.certified);
    for step in &g.certificate.continuation {
        println!("  N = {:4}  L = {:.12}  residual {:.1e}", step.half_points, step.length, step.residual);
    }
    let d = dual_girth(&sphere, &opts)?;
    println!("dual girth  {:.10} ± {:.1e}", d.girth, d.certificate.error_bar);
    println!("ellipse perimeter 4.420698432141901");
    Ok(())
}
