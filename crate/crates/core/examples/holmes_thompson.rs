//! Holmes–Thompson area of a sphere pair and of its swap.

use finsler_duality::gauge::GaugeBody;
use finsler_duality::induced::EmbeddedSphere;
use finsler_duality::measures::{ht_volume, VolumeOptions};
use nalgebra::{dvector, DMatrix};

fn main() -> finsler_duality::Result<()> {
    let round = EmbeddedSphere::intrinsic(GaugeBody::ellipsoid(DMatrix::identity(3, 3))?);
    let v = ht_volume(&round, &VolumeOptions::default())?;
    println!("round sphere {:.12} (4π = {:.12})", v.value, 4.0 * std::f64::consts::PI);

    let body1 = GaugeBody::ellipsoid(DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.1, 0.2, 1.5, 0.0, 0.1, 0.0, 2.5]))?;
    let body2 = GaugeBody::ellipsoid(DMatrix::from_diagonal(&dvector![1.0, 1.5625, 2.0 + 7.0 / 9.0]))?;
    let sphere = EmbeddedSphere::new(body1, body2)?;
    let opts = VolumeOptions { n_polar: 12, n_fiber: 24, ..VolumeOptions::default() };
    let a = ht_volume(&sphere, &opts)?;
    let b = ht_volume(&sphere.swapped(), &opts)?;
    println!("pair    {:.10} ± {:.1e}", a.value, a.error_estimate);
    println!("swapped {:.10} ± {:.1e}", b.value, b.error_estimate);
    Ok(())
}
