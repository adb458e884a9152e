//! Monte Carlo measure of the lines meeting a body, against π times its
//! Holmes–Thompson area.

use finsler_duality::gauge::GaugeBody;
use finsler_duality::induced::EmbeddedSphere;
use finsler_duality::measures::{crofton_line_measure, ht_volume, CroftonOptions, VolumeOptions};
use nalgebra::{dvector, DMatrix};
use std::f64::consts::PI;

fn main() -> finsler_duality::Result<()> {
    let body = GaugeBody::ellipsoid(DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.1, 0.2, 1.5, 0.0, 0.1, 0.0, 2.5]))?;
    for ambient in [
        GaugeBody::ellipsoid(DMatrix::identity(3, 3))?,
        GaugeBody::ellipsoid(DMatrix::from_diagonal(&dvector![1.0, 1.5625, 2.0 + 7.0 / 9.0]))?,
    ] {
        let sphere = EmbeddedSphere::new(body.clone(), ambient)?;
        let ht = ht_volume(&sphere, &VolumeOptions::default())?;
        let lines = crofton_line_measure(&sphere, &CroftonOptions { n_samples: 200_000, seed: 4, ..CroftonOptions::default() })?;
        println!(
            "line measure {:.5} ± {:.5}   π·HT {:.5}   ratio {:.5}",
            lines.value,
            lines.error_estimate,
            PI * ht.value,
            lines.value / (PI * ht.value)
        );
    }
    Ok(())
}
