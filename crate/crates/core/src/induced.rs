//! The Finsler metric induced on a unit sphere `Σ₁ = {F₁ = 1}` by an ambient
//! norm `‖·‖₂`, and its co-sphere bundle.
//!
//! Cotangent vectors of `Σ₁` at `q` are classes of covectors on `V` modulo the
//! conormal `n_q = ∇F₁(q)`. They are stored through the canonical
//! representative `p` with `⟨p, q⟩ = 0`, so every map below is an ambient
//! formula. The dual Finsler norm on `T_q*Σ₁` is
//!
//! ```text
//! G(q, p) = min_t F₂*(p + t·n_q),
//! ```
//!
//! the gauge of the projection of `Σ₂*` onto the fiber (its shadow).

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::gauge::GaugeBody;
use crate::line::minimize_along;

/// Tolerance on `|F₁(q) − 1|` for points handed to the public operations.
pub const ON_SPHERE_TOL: f64 = 1e-9;
/// Looser tolerance for curve points that went through an optimizer.
pub const CURVE_POINT_TOL: f64 = 1e-8;
/// Accuracy in the conormal parameter for the shadow-gauge minimization.
pub const LINE_TOL: f64 = 1e-11;

/// `Σ₁` with the metric induced from `(V, ‖·‖₂)`.
#[derive(Debug, Clone)]
pub struct EmbeddedSphere {
    body1: GaugeBody,
    body2: GaugeBody,
    dual2: GaugeBody,
}

/// The minimizer behind a value of `G`.
#[derive(Debug, Clone)]
pub struct ShadowPoint {
    /// `G(q, p)`.
    pub level: f64,
    /// Minimizing conormal parameter `t*`.
    pub t: f64,
    /// `p + t*·n_q`, a covector on the level set `{F₂* = G}`.
    pub covector: DVector<f64>,
    /// Second derivative of `t ↦ F₂*(p + t·n_q)` at `t*`.
    pub curvature: f64,
}

/// A point `(q, p)` of `T*Σ₁` with canonical covector.
#[derive(Debug, Clone, PartialEq)]
pub struct CoSpherePoint {
    pub q: DVector<f64>,
    pub p: DVector<f64>,
    /// `G(q, p)`; equal to 1 on the co-sphere bundle.
    pub level: f64,
}

impl EmbeddedSphere {
    pub fn new(body1: GaugeBody, body2: GaugeBody) -> Result<Self> {
        if body1.dim() != body2.dim() {
            return Err(Error::InvalidInput(format!(
                "bodies differ in dimension ({} vs {})",
                body1.dim(),
                body2.dim()
            )));
        }
        let dual2 = body2.dual();
        Ok(Self { body1, body2, dual2 })
    }

    /// `Σ₁` inside its own normed space.
    pub fn intrinsic(body: GaugeBody) -> Self {
        let dual2 = body.dual();
        Self {
            body2: body.clone(),
            body1: body,
            dual2,
        }
    }

    /// The dual configuration: `Σ₂* ⊂ (V*, ‖·‖₁*)`.
    pub fn swapped(&self) -> EmbeddedSphere {
        EmbeddedSphere {
            body1: self.dual2.clone(),
            body2: self.body1.dual(),
            dual2: self.body1.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.body1.dim()
    }

    pub fn body1(&self) -> &GaugeBody {
        &self.body1
    }

    pub fn body2(&self) -> &GaugeBody {
        &self.body2
    }

    /// `F₂*`, the gauge of `Σ₂*`.
    pub fn dual2(&self) -> &GaugeBody {
        &self.dual2
    }

    pub fn is_symmetric(&self) -> bool {
        self.body1.is_symmetric() && self.body2.is_symmetric()
    }

    pub(crate) fn check_on_sphere(&self, q: &DVector<f64>, tol: f64) -> Result<()> {
        if q.len() != self.dim() {
            return Err(Error::InvalidInput("point dimension mismatch".into()));
        }
        let f = self.body1.value(q);
        if (f - 1.0).abs() > tol {
            return Err(Error::Precondition(format!("point is off Σ₁: F₁(q) = {f}")));
        }
        Ok(())
    }

    /// `n_q = ∇F₁(q)`, spanning the annihilator of `T_qΣ₁`.
    pub fn conormal(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_on_sphere(q, ON_SPHERE_TOL)?;
        Ok(self.body1.gradient(q))
    }

    /// Canonical representative of the restriction of `P` to `T_qΣ₁`.
    pub fn restrict_covector(&self, big_p: &DVector<f64>, q: &DVector<f64>) -> DVector<f64> {
        let n = self.body1.gradient(q);
        restrict_with(big_p, q, &n)
    }

    /// `G(q, p)`, the dual induced norm of the cotangent vector `p` at `q`.
    pub fn induced_hamiltonian(&self, q: &DVector<f64>, p: &DVector<f64>) -> Result<f64> {
        Ok(self.shadow(q, p)?.level)
    }

    /// `G(q, p)` together with its minimizer on the conormal line.
    pub fn shadow(&self, q: &DVector<f64>, p: &DVector<f64>) -> Result<ShadowPoint> {
        self.check_on_sphere(q, ON_SPHERE_TOL)?;
        if p.len() != self.dim() {
            return Err(Error::InvalidInput("covector dimension mismatch".into()));
        }
        let n = self.body1.gradient(q);
        self.shadow_with(q, &n, p)
    }

    /// Unchecked variant of [`shadow`](Self::shadow) given the conormal.
    pub(crate) fn shadow_with(
        &self,
        q: &DVector<f64>,
        n: &DVector<f64>,
        p: &DVector<f64>,
    ) -> Result<ShadowPoint> {
        if p.iter().all(|&v| v == 0.0) {
            // The zero covector: the conormal line passes through the origin.
            return Ok(ShadowPoint {
                level: 0.0,
                t: 0.0,
                covector: DVector::zeros(p.len()),
                curvature: 0.0,
            });
        }
        let t0 = -p.dot(q) / n.dot(q);
        let m = minimize_along(&self.dual2, p, n, t0, LINE_TOL)?;
        Ok(ShadowPoint {
            level: m.value,
            t: m.t,
            covector: p + n * m.t,
            curvature: m.curvature,
        })
    }

    /// Length of the polygon through `curve` measured chordwise in `‖·‖₂`.
    pub fn induced_length(&self, curve: &[DVector<f64>], closed: bool) -> Result<f64> {
        if closed && curve.len() < 3 {
            return Err(Error::Precondition("a closed curve needs at least 3 points".into()));
        }
        if curve.len() < 2 {
            return Err(Error::Precondition("a curve needs at least 2 points".into()));
        }
        for q in curve {
            self.check_on_sphere(q, CURVE_POINT_TOL)?;
        }
        Ok(chord_length(&self.body2, curve, closed))
    }

    /// Legendre lift of a tangent velocity `v ∈ T_qΣ₁`: the canonical
    /// covector `p` with `G(q, p) = 1` and `⟨p, v⟩ = ‖v‖₂`.
    pub fn lift(&self, q: &DVector<f64>, v: &DVector<f64>) -> Result<CoSpherePoint> {
        self.check_on_sphere(q, CURVE_POINT_TOL)?;
        let n = self.body1.gradient(q);
        // Drop any normal component so that v is tangent.
        let v_t = v - q * (n.dot(v) / n.dot(q));
        if v_t.norm() == 0.0 {
            return Err(Error::Precondition("lift of a zero tangent vector".into()));
        }
        let xi = self.body2.gradient(&v_t);
        let p = restrict_with(&xi, q, &n);
        Ok(CoSpherePoint {
            q: q.clone(),
            p,
            level: 1.0,
        })
    }

    /// A validated point of `T*Σ₁`, computing its level.
    pub fn cosphere_point(&self, q: DVector<f64>, p: DVector<f64>) -> Result<CoSpherePoint> {
        self.check_on_sphere(&q, ON_SPHERE_TOL)?;
        if p.dot(&q).abs() > 1e-10 * (1.0 + p.norm()) {
            return Err(Error::Precondition(format!(
                "covector is not canonical: ⟨p, q⟩ = {:e}",
                p.dot(&q)
            )));
        }
        let level = self.induced_hamiltonian(&q, &p)?;
        Ok(CoSpherePoint { q, p, level })
    }
}

/// `P − ⟨P, q⟩·n` (requires `⟨n, q⟩ = 1`).
pub(crate) fn restrict_with(big_p: &DVector<f64>, q: &DVector<f64>, n: &DVector<f64>) -> DVector<f64> {
    big_p - n * (big_p.dot(q) / n.dot(q))
}

/// `Σ F(x_{i+1} − x_i)`, wrapping around when `closed`.
///
/// Chord values are summed in sorted order, so the result depends only on
/// the multiset of chords (reversing a curve under a symmetric gauge gives
/// the identical value).
pub fn chord_length(body: &GaugeBody, curve: &[DVector<f64>], closed: bool) -> f64 {
    let mut chords: Vec<f64> = curve.windows(2).map(|w| body.value(&(&w[1] - &w[0]))).collect();
    if closed {
        chords.push(body.value(&(&curve[0] - &curve[curve.len() - 1])));
    }
    chords.sort_by(f64::total_cmp);
    chords.iter().sum()
}

/// Free-function form of [`EmbeddedSphere::conormal`].
pub fn conormal(sphere: &EmbeddedSphere, q: &DVector<f64>) -> Result<DVector<f64>> {
    sphere.conormal(q)
}

/// Free-function form of [`EmbeddedSphere::restrict_covector`].
pub fn restrict_covector(sphere: &EmbeddedSphere, big_p: &DVector<f64>, q: &DVector<f64>) -> DVector<f64> {
    sphere.restrict_covector(big_p, q)
}

/// Free-function form of [`EmbeddedSphere::induced_hamiltonian`].
pub fn induced_hamiltonian(sphere: &EmbeddedSphere, q: &DVector<f64>, p: &DVector<f64>) -> Result<f64> {
    sphere.induced_hamiltonian(q, p)
}

/// Free-function form of [`EmbeddedSphere::induced_length`].
pub fn induced_length(sphere: &EmbeddedSphere, curve: &[DVector<f64>], closed: bool) -> Result<f64> {
    sphere.induced_length(curve, closed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use std::f64::consts::PI;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn round() -> EmbeddedSphere {
        EmbeddedSphere::intrinsic(GaugeBody::ellipsoid(DMatrix::identity(3, 3)).unwrap())
    }

    #[test]
    fn round_conormal_and_hamiltonian() {
        let s = round();
        let q = v(&[0.0, 0.0, 1.0]);
        assert_eq!(s.conormal(&q).unwrap(), q);
        let sh = s.shadow(&q, &v(&[1.0, 0.0, 0.0])).unwrap();
        assert!((sh.level - 1.0).abs() < 1e-14);
        assert!(sh.t.abs() < 1e-12);
        assert!(s.conormal(&v(&[0.0, 0.0, 1.1])).is_err());
    }

    #[test]
    fn ellipsoid_conormal_is_a_q() {
        let a = DMatrix::from_diagonal(&v(&[1.0, 0.64, 0.36]));
        let s = EmbeddedSphere::intrinsic(GaugeBody::ellipsoid(a.clone()).unwrap());
        let q = s.body1().project(&v(&[0.3, -0.4, 1.0]));
        assert!((s.conormal(&q).unwrap() - &a * &q).norm() < 1e-14);
    }

    #[test]
    fn restriction_examples() {
        let a = DMatrix::from_diagonal(&v(&[2.0, 1.0, 0.5]));
        let s = EmbeddedSphere::intrinsic(GaugeBody::ellipsoid(a).unwrap());
        let q = s.body1().project(&v(&[0.3, -0.4, 1.0]));
        let n = s.conormal(&q).unwrap();
        assert!(s.restrict_covector(&n, &q).norm() < 1e-14);
        let canonical = s.restrict_covector(&v(&[1.0, 2.0, 3.0]), &q);
        assert!(canonical.dot(&q).abs() < 1e-14);
        assert!((s.restrict_covector(&canonical, &q) - &canonical).norm() < 1e-14);
    }

    #[test]
    fn hamiltonian_is_homogeneous() {
        let s = round();
        let q = v(&[0.0, 0.6, 0.8]);
        let p = v(&[0.7, -0.4, 0.3]);
        let g1 = s.induced_hamiltonian(&q, &p).unwrap();
        let g2 = s.induced_hamiltonian(&q, &(&p * 2.0)).unwrap();
        assert!((g2 - 2.0 * g1).abs() < 1e-10 * g1);
        assert_eq!(s.induced_hamiltonian(&q, &DVector::zeros(3)).unwrap(), 0.0);
    }

    #[test]
    fn equator_length_is_two_pi() {
        let s = round();
        let n = 10_000;
        let curve: Vec<_> = (0..n)
            .map(|i| {
                let th = 2.0 * PI * i as f64 / n as f64;
                v(&[th.cos(), th.sin(), 0.0])
            })
            .collect();
        let len = s.induced_length(&curve, true).unwrap();
        assert!((len - 2.0 * PI).abs() < 1e-6);
        let mut rev = curve.clone();
        rev.reverse();
        assert_eq!(s.induced_length(&rev, true).unwrap(), len);
        assert!(s.induced_length(&curve[..2], true).is_err());
        let mut off = curve.clone();
        off[3] *= 1.01;
        assert!(matches!(s.induced_length(&off, true), Err(Error::Precondition(_))));
    }

    #[test]
    fn lift_has_unit_level_and_pairs_to_speed() {
        let a = DMatrix::from_diagonal(&v(&[1.0, 0.64, 0.36]));
        let b = DMatrix::from_row_slice(3, 3, &[1.5, 0.2, 0.0, 0.2, 1.0, 0.1, 0.0, 0.1, 0.7]);
        let s = EmbeddedSphere::new(GaugeBody::ellipsoid(a).unwrap(), GaugeBody::ellipsoid(b).unwrap()).unwrap();
        let q = s.body1().project(&v(&[0.3, -0.4, 1.0]));
        let n = s.conormal(&q).unwrap();
        let raw = v(&[1.0, 0.2, -0.3]);
        let vt = &raw - &q * (n.dot(&raw) / n.dot(&q));
        let lifted = s.lift(&q, &vt).unwrap();
        let g = s.induced_hamiltonian(&q, &lifted.p).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
        assert!((lifted.p.dot(&vt) - s.body2().value(&vt)).abs() < 1e-13);
    }
}
