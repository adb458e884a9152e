//! Integrates a characteristic of G and compares its action with its period.

use finsler_duality::gauge::GaugeBody;
use finsler_duality::geodesics::characteristic_flow;
use finsler_duality::induced::EmbeddedSphere;
use finsler_duality::measures::action;
use nalgebra::{dvector, DMatrix};

fn main() -> finsler_duality::Result<()> {
    let body1 = GaugeBody::ellipsoid(DMatrix::from_diagonal(&dvector![1.0, 1.5625, 2.0 + 7.0 / 9.0]))?;
    let sphere = EmbeddedSphere::new(body1, GaugeBody::ellipsoid(DMatrix::identity(3, 3))?)?;

    // Start on the (y, z) principal ellipse heading along it.
    let q = dvector![0.0, 0.8, 0.0];
    let start = sphere.lift(&q, &dvector![0.0, 0.0, 1.0])?;
    let period = 4.420698432141901;
    let traj = characteristic_flow(&sphere, &start, period, 1e-3)?;
    if let Some(msg) = &traj.failure {
        println!("flow stopped early: {msg}");
    }
    println!("steps {}  closure {:.2e}  max |G − 1| {:.2e}", traj.samples.len() - 1, traj.closure_residual, traj.max_drift);
    println!("action {:.10} vs period {period}", action(&traj.samples, false));

    // Off the symmetry planes the orbit is not closed.
    let start = sphere.lift(&sphere.body1().project(&dvector![0.6, 0.5, 0.4]), &dvector![0.3, -0.2, 0.7])?;
    let traj = characteristic_flow(&sphere, &start, 10.0, 1e-3)?;
    println!("generic start after t = 10: closure {:.3}", traj.closure_residual);
    Ok(())
}
