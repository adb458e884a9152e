//! Pointwise duality maps between `T*Σ₁` and `T*Σ₂*`.
//!
//! For `(q, p)` the conormal line `{p + t·n_q}` consists of all covectors
//! whose restriction to `T_qΣ₁` is `p`. Its intersections with `Σ₂*` are the
//! candidates `P`; the image point is `(P, q_P)` where `q_P` is the
//! restriction of `q` (viewed as a covector on `V*`) to `T_PΣ₂*`.
//!
//! * [`boundary_map`] (φ): co-sphere to co-sphere, the line is tangent to `Σ₂*`.
//! * [`interior_map`] (Φ): open co-disc to open co-disc, two intersections,
//!   the exit root (where `F₂*` increases along the line) is taken.
//! * [`symmetric_boundary_map`] (ψ) and [`symmetric_interior_map`] (Ψ):
//!   the same maps precomposed with `p ↦ −p`, defined for symmetric bodies.
//!
//! The image is returned as a point of the swapped configuration
//! ([`EmbeddedSphere::swapped`]): its `q` field holds `P`, its `p` field
//! holds `Q = q_P`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::induced::{restrict_with, CoSpherePoint, EmbeddedSphere};
use crate::line::level_crossing;

/// Half-width of the band `|G − 1|` treated as tangency.
pub const TANGENCY_BAND: f64 = 1e-8;
/// Root separation, relative to the diameter of `Σ₂*`, below which the two roots merge.
pub const ROOT_MERGE_TOL: f64 = 1e-6;

/// Both intersections of the conormal line through `p` with `Σ₂*`.
#[derive(Debug, Clone)]
pub struct LineSphereSolution {
    pub t_minus: f64,
    pub t_plus: f64,
    pub tangent: bool,
    pub p_minus: DVector<f64>,
    pub p_plus: DVector<f64>,
    /// `G(q, p)`.
    pub level: f64,
}

fn check_canonical(q: &DVector<f64>, p: &DVector<f64>) -> Result<()> {
    let pair = p.dot(q);
    if pair.abs() > 1e-10 * (1.0 + p.norm()) {
        return Err(Error::Precondition(format!("covector is not canonical: ⟨p, q⟩ = {pair:e}")));
    }
    Ok(())
}

/// Intersects `{p + t·n_q : t ∈ ℝ}` with `Σ₂*`.
pub fn solve_line_sphere(
    sphere: &EmbeddedSphere,
    q: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<LineSphereSolution> {
    let shadow = sphere.shadow(q, p)?;
    check_canonical(q, p)?;
    let level = shadow.level;
    if level > 1.0 + TANGENCY_BAND {
        return Err(Error::NoIntersection { level });
    }
    let n = sphere.body1().gradient(q);
    if (level - 1.0).abs() <= TANGENCY_BAND {
        return Ok(LineSphereSolution {
            t_minus: shadow.t,
            t_plus: shadow.t,
            tangent: true,
            p_minus: shadow.covector.clone(),
            p_plus: shadow.covector,
            level,
        });
    }
    let dual2 = sphere.dual2();
    let t_minus = level_crossing(dual2, p, &n, shadow.t, -1.0, 1.0)?;
    let t_plus = level_crossing(dual2, p, &n, shadow.t, 1.0, 1.0)?;
    let merge = ROOT_MERGE_TOL * 2.0 * dual2.outer_radius();
    Ok(LineSphereSolution {
        t_minus,
        t_plus,
        tangent: (t_plus - t_minus) <= merge,
        p_minus: p + &n * t_minus,
        p_plus: p + &n * t_plus,
        level,
    })
}

/// Builds `(P, q_P)` as a point of the swapped configuration.
fn image_point(sphere: &EmbeddedSphere, q: &DVector<f64>, big_p: DVector<f64>) -> Result<CoSpherePoint> {
    let m = sphere.dual2().gradient(&big_p);
    let big_q = restrict_with(q, &big_p, &m);
    // G*(P, Q) = min_s F₁(Q + s·m_P); the minimizer should be at q.
    let swapped = sphere.swapped();
    let level = swapped.shadow_with(&big_p, &m, &big_q)?.level;
    Ok(CoSpherePoint {
        q: big_p,
        p: big_q,
        level,
    })
}

/// φ: the boundary map `S*(Σ₁, Σ₂*) → S*(Σ₂*, Σ₁)`, `φ(q, p) = (P, q_P)`.
pub fn boundary_map(sphere: &EmbeddedSphere, q: &DVector<f64>, p: &DVector<f64>) -> Result<CoSpherePoint> {
    let sol = solve_line_sphere(sphere, q, p)?;
    if (sol.level - 1.0).abs() > TANGENCY_BAND {
        return Err(Error::Precondition(format!(
            "boundary map needs a co-sphere point, got G = {}",
            sol.level
        )));
    }
    image_point(sphere, q, sol.p_plus)
}

/// Φ: the interior map `D*(Σ₁, Σ₂*) → D*(Σ₂*, Σ₁)` using the exit root.
pub fn interior_map(sphere: &EmbeddedSphere, q: &DVector<f64>, p: &DVector<f64>) -> Result<CoSpherePoint> {
    let level = sphere.induced_hamiltonian(q, p)?;
    if level > 1.0 + TANGENCY_BAND {
        return Err(Error::NoIntersection { level });
    }
    if level > 1.0 - TANGENCY_BAND {
        return Err(Error::IllConditioned { level });
    }
    let sol = solve_line_sphere(sphere, q, p)?;
    image_point(sphere, q, sol.p_plus)
}

fn require_symmetric(sphere: &EmbeddedSphere) -> Result<()> {
    if sphere.is_symmetric() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "symmetrized maps need both bodies symmetric about the origin".into(),
        ))
    }
}

/// ψ(q, p) = φ(q, −p).
pub fn symmetric_boundary_map(
    sphere: &EmbeddedSphere,
    q: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<CoSpherePoint> {
    require_symmetric(sphere)?;
    boundary_map(sphere, q, &(-p))
}

/// Ψ(q, p) = Φ(q, −p).
pub fn symmetric_interior_map(
    sphere: &EmbeddedSphere,
    q: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<CoSpherePoint> {
    require_symmetric(sphere)?;
    interior_map(sphere, q, &(-p))
}

/// Sign of the Jacobian determinant of the fiber projection `X ↦ X_q` from
/// `Σ₂*` to `T_q*Σ₁` at `P`, by central finite differences, with both
/// hypersurfaces oriented by their outward co-orientation.
pub fn projection_jacobian(sphere: &EmbeddedSphere, q: &DVector<f64>, big_p: &DVector<f64>) -> f64 {
    let dim = sphere.dim();
    let dual2 = sphere.dual2();
    let m = dual2.gradient(big_p);
    let n = sphere.body1().gradient(q);
    let w = oriented_tangent_basis(&m);
    let u = oriented_tangent_basis(&n);
    let h = 1e-6;
    let mut jac = DMatrix::zeros(dim - 1, dim - 1);
    for (j, wj) in w.iter().enumerate() {
        let fwd = dual2.project(&(big_p + wj * h));
        let bwd = dual2.project(&(big_p - wj * h));
        let d = (fwd - bwd) / (2.0 * h);
        for (i, ui) in u.iter().enumerate() {
            jac[(i, j)] = d.dot(ui);
        }
    }
    jac.determinant()
}

/// Orthonormal basis `(e₁, …, e_{n−1})` of `normal^⊥` with `det[normal, e] > 0`.
fn oriented_tangent_basis(normal: &DVector<f64>) -> Vec<DVector<f64>> {
    let mut basis = crate::seed::complement_basis(normal);
    let mut cols = vec![normal.normalize()];
    cols.extend(basis.iter().cloned());
    if DMatrix::from_columns(&cols).determinant() < 0.0 {
        basis[0] = -&basis[0];
    }
    basis
}
