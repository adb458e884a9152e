//! Length-spectrum and diameter probes on both sides of the duality.

use finsler_duality::gauge::GaugeBody;
use finsler_duality::geodesics::{diameter_probe, length_spectrum_probe, DiameterOptions, SpectrumOptions};
use finsler_duality::induced::EmbeddedSphere;
use nalgebra::{dvector, DMatrix};

fn main() -> finsler_duality::Result<()> {
    let body1 = GaugeBody::ellipsoid(DMatrix::from_diagonal(&dvector![1.0, 1.5625, 2.0 + 7.0 / 9.0]))?;
    let sphere = EmbeddedSphere::new(body1, GaugeBody::ellipsoid(DMatrix::identity(3, 3))?)?;
    let swapped = sphere.swapped();

    let opts = SpectrumOptions { seed: 2, ..SpectrumOptions::default() };
    let primal = length_spectrum_probe(&sphere, &opts)?;
    let dual = length_spectrum_probe(&swapped, &opts)?;
    println!("primal lengths {:?}", primal.lengths);
    println!("dual lengths   {:?}", dual.lengths);

    let opts = DiameterOptions { m_pairs: 8, seed: 2, ..DiameterOptions::default() };
    let a = diameter_probe(&sphere, &opts)?;
    let b = diameter_probe(&swapped, &opts)?;
    println!("sampled diameter {:.6} (pair {}), dual side {:.6}", a.diameter, a.argmax, b.diameter);
    Ok(())
}
