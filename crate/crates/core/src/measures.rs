//! Action integrals, Holmes–Thompson volume of `Σ₁` and the Crofton
//! measure of oriented lines meeting a convex body.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge::GaugeBody;
use crate::induced::{CoSpherePoint, EmbeddedSphere, LINE_TOL};
use crate::line::minimize_along;
use crate::seed::{complement_basis, task_rng, unit_vector};

/// Strict-interior margin for line hits.
pub const HIT_MARGIN: f64 = 1e-10;

/// Sampling disc radius relative to the proven bound on hitting lines; hits
/// in the margin signal an overflow.
const DISC_MARGIN: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeReport {
    pub value: f64,
    pub method: VolumeMethod,
    /// Quadrature nodes or Monte Carlo samples behind `value`.
    pub samples: usize,
    pub seed: u64,
    /// Grid-doubling difference, or the standard error for Monte Carlo.
    pub error_estimate: f64,
    /// False when the quadrature error estimate exceeds the requested tolerance.
    pub converged: bool,
}

/// Midpoint-rule action `Σ ⟨(p_i + p_{i+1})/2, q_{i+1} − q_i⟩`.
pub fn action(samples: &[CoSpherePoint], closed: bool) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let segments = if closed { n } else { n - 1 };
    (0..segments)
        .map(|i| {
            let a = &samples[i];
            let b = &samples[(i + 1) % n];
            0.5 * (&a.p + &b.p).dot(&(&b.q - &a.q))
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeOptions {
    /// Gauss–Legendre nodes in `cos(polar angle)`; azimuth uses twice as many.
    pub n_polar: usize,
    /// Trapezoid nodes on each fiber circle.
    pub n_fiber: usize,
    /// Relative tolerance on the grid-doubling estimate.
    pub rel_tol: f64,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        Self {
            n_polar: 16,
            n_fiber: 32,
            rel_tol: 1e-3,
        }
    }
}

/// Area of the unit co-disc `{p : G(q, p) ≤ 1}` in `T*_qΣ₁`, measured
/// against the Euclidean area of the tangent plane.
pub fn fiber_area(sphere: &EmbeddedSphere, q: &DVector<f64>, n_fiber: usize) -> Result<f64> {
    let n = sphere.body1().gradient(q);
    let basis = complement_basis(&n);
    let mut sum = 0.0;
    for k in 0..n_fiber {
        let theta = 2.0 * PI * k as f64 / n_fiber as f64;
        let e = &basis[0] * theta.cos() + &basis[1] * theta.sin();
        let g = sphere.shadow_with(q, &n, &e)?.level;
        sum += 1.0 / (g * g);
    }
    Ok(0.5 * sum * 2.0 * PI / n_fiber as f64)
}

fn ht_integral(sphere: &EmbeddedSphere, n_polar: usize, n_fiber: usize) -> Result<f64> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n_polar).expect("positive node count"));
    let n_az = 2 * n_polar;
    let body1 = sphere.body1();
    let rows: Vec<Result<f64>> = rule
        .as_node_weight_pairs()
        .par_iter()
        .map(|&(z, w)| {
            let s = (1.0 - z * z).max(0.0).sqrt();
            let mut row = 0.0;
            for j in 0..n_az {
                let phi = 2.0 * PI * j as f64 / n_az as f64;
                let u = DVector::from_vec(vec![s * phi.cos(), s * phi.sin(), z]);
                let r = 1.0 / body1.value(&u);
                let q = &u * r;
                let normal = body1.gradient(&q);
                // Surface element of Σ₁ over dΩ: r³·|∇F₁(q)| since ⟨∇F₁(q), q⟩ = 1.
                let jac = r * r * r * normal.norm();
                row += fiber_area(sphere, &q, n_fiber)? * jac;
            }
            Ok(w * row * 2.0 * PI / n_az as f64)
        })
        .collect();
    let mut total = 0.0;
    for r in rows {
        total += r?;
    }
    Ok(total / PI)
}

/// Holmes–Thompson area of `Σ₁` (dimension 3): the symplectic volume of the
/// unit co-disc bundle divided by `π`.
pub fn ht_volume(sphere: &EmbeddedSphere, opts: &VolumeOptions) -> Result<VolumeReport> {
    if sphere.dim() != 3 {
        return Err(Error::Unsupported("volumes are implemented for dimension 3 only".into()));
    }
    if opts.n_polar < 2 || opts.n_fiber < 4 {
        return Err(Error::InvalidInput("quadrature grid too small".into()));
    }
    let coarse = ht_integral(sphere, opts.n_polar, opts.n_fiber)?;
    let fine = ht_integral(sphere, 2 * opts.n_polar, 2 * opts.n_fiber)?;
    let error_estimate = (fine - coarse).abs();
    Ok(VolumeReport {
        value: fine,
        method: VolumeMethod::Quadrature,
        samples: 2 * opts.n_polar * 4 * opts.n_polar * 2 * opts.n_fiber,
        seed: 0,
        error_estimate,
        converged: error_estimate <= opts.rel_tol * fine.abs(),
    })
}

/// The oriented line `{Q + s·L(P)}` with `F₂*(P) = 1` and `⟨Q, P⟩ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedLine {
    covector: DVector<f64>,
    moment: DVector<f64>,
    direction: DVector<f64>,
}

impl OrientedLine {
    /// Validates `(P, Q)` against the ambient dual gauge `ambient.dual2()`.
    pub fn new(ambient: &EmbeddedSphere, covector: DVector<f64>, moment: DVector<f64>) -> Result<Self> {
        let (f, direction) = ambient.dual2().first_order(&covector);
        if (f - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition(format!("direction covector has F* = {f}")));
        }
        if moment.dot(&covector).abs() > 1e-10 * (1.0 + moment.norm()) {
            return Err(Error::Precondition("moment is not annihilated by the covector".into()));
        }
        Ok(Self {
            covector,
            moment,
            direction,
        })
    }

    /// The line through `point` with direction `v`, normalized in `‖·‖₂`.
    pub fn through(ambient: &EmbeddedSphere, point: &DVector<f64>, v: &DVector<f64>) -> Result<Self> {
        let f = ambient.body2().value(v);
        if !(f > 0.0) {
            return Err(Error::InvalidInput("line direction is zero".into()));
        }
        let direction = v / f;
        let covector = ambient.body2().gradient(&direction);
        let moment = point - &direction * point.dot(&covector);
        Ok(Self {
            covector,
            moment,
            direction,
        })
    }

    pub fn covector(&self) -> &DVector<f64> {
        &self.covector
    }

    pub fn moment(&self) -> &DVector<f64> {
        &self.moment
    }

    /// `L(P)`, the unit direction of the line.
    pub fn direction(&self) -> &DVector<f64> {
        &self.direction
    }
}

/// True iff the line passes through the interior of `M`, i.e.
/// `min_s F_M(Q + s·d) < 1 − 1e−10`.
pub fn line_hits_body(line: &OrientedLine, m: &GaugeBody) -> bool {
    hits(m, &line.moment, &line.direction, m.outer_radius())
}

fn hits(m: &GaugeBody, base: &DVector<f64>, dir: &DVector<f64>, outer: f64) -> bool {
    let dn2 = dir.norm_squared();
    let foot = base - dir * (base.dot(dir) / dn2);
    if foot.norm() >= outer {
        return false;
    }
    if m.value(&foot) < 1.0 - HIT_MARGIN {
        return true;
    }
    let t0 = -base.dot(dir) / dn2;
    match minimize_along(m, base, dir, t0, LINE_TOL) {
        Ok(min) => min.value < 1.0 - HIT_MARGIN,
        Err(_) => false,
    }
}

/// `|ω²/2|` on the chart `(u, a, b) ↦ (P, Q)` with `P = u/F₂*(u)` and
/// `Q = a·b₁ + b·b₂`, per unit area of `u ∈ S²` and of `(a, b)`, computed as
/// the Pfaffian of the pulled-back form on the chart basis.
pub fn chart_density(dual: &GaugeBody, u: &DVector<f64>, fiber: &[DVector<f64>; 2]) -> f64 {
    let (f, grad) = dual.first_order(u);
    let big_p = u / f;
    let tangent = complement_basis(u);
    // Chart tangent vectors (δP, δQ); the δQ of base directions only enters
    // base–base entries, which drop out of the Pfaffian.
    let mut dp: Vec<DVector<f64>> = tangent.iter().map(|t| (t - &big_p * grad.dot(t)) / f).collect();
    let mut dq: Vec<DVector<f64>> = vec![DVector::zeros(3); 2];
    for b in fiber {
        dp.push(DVector::zeros(3));
        dq.push(b.clone());
    }
    let omega = DMatrix::from_fn(4, 4, |i, j| dq[i].dot(&dp[j]) - dq[j].dot(&dp[i]));
    let pf = omega[(0, 1)] * omega[(2, 3)] - omega[(0, 2)] * omega[(1, 3)] + omega[(0, 3)] * omega[(1, 2)];
    pf.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CroftonOptions {
    pub n_samples: usize,
    pub seed: u64,
    /// Samples per independently seeded chunk.
    pub chunk: usize,
    /// Enlargements of the sampling disc allowed after edge hits.
    pub max_retries: usize,
}

impl Default for CroftonOptions {
    fn default() -> Self {
        Self {
            n_samples: 100_000,
            seed: 0,
            chunk: 4096,
            max_retries: 3,
        }
    }
}

struct ChunkSum {
    sum: f64,
    sum_sq: f64,
    edge_hits: usize,
}

fn crofton_chunk(sphere: &EmbeddedSphere, outer: f64, scale: f64, seed: u64, task: u64, count: usize) -> ChunkSum {
    let m = sphere.body1();
    let dual = sphere.dual2();
    let mut rng = task_rng(seed, task);
    let mut acc = ChunkSum {
        sum: 0.0,
        sum_sq: 0.0,
        edge_hits: 0,
    };
    for _ in 0..count {
        let u = unit_vector(&mut rng, 3);
        let a: f64 = rng.random();
        let b: f64 = rng.random();
        let (f, grad) = dual.first_order(&u);
        let big_p = &u / f;
        let d = grad;
        // Lines meeting the Euclidean ball of radius `outer` have
        // |Q| ≤ outer·|P|·|d| (norm of the oblique projection along d).
        let bound = scale * outer * big_p.norm() * d.norm();
        let radius = DISC_MARGIN * bound;
        let basis = complement_basis(&u);
        let fiber = [basis[0].clone(), basis[1].clone()];
        let rho = radius * a.sqrt();
        let ang = 2.0 * PI * b;
        let q = &fiber[0] * (rho * ang.cos()) + &fiber[1] * (rho * ang.sin());
        if hits(m, &q, &d, outer) {
            if rho > bound {
                acc.edge_hits += 1;
            }
            let w = chart_density(dual, &u, &fiber) * 4.0 * PI * PI * radius * radius;
            acc.sum += w;
            acc.sum_sq += w * w;
        }
    }
    acc
}

/// Monte Carlo measure of the oriented lines meeting the interior of
/// `M = sphere.body1()`, for the ambient norm `sphere.body2()` (dimension 3).
pub fn crofton_line_measure(sphere: &EmbeddedSphere, opts: &CroftonOptions) -> Result<VolumeReport> {
    if sphere.dim() != 3 {
        return Err(Error::Unsupported("line measures are implemented for dimension 3 only".into()));
    }
    if opts.n_samples < 2 || opts.chunk == 0 {
        return Err(Error::InvalidInput("need at least 2 samples and a positive chunk size".into()));
    }
    let outer = sphere.body1().outer_radius();
    let chunks: Vec<(u64, usize)> = (0..opts.n_samples.div_ceil(opts.chunk))
        .map(|c| (c as u64, opts.chunk.min(opts.n_samples - c * opts.chunk)))
        .collect();
    let mut scale = 1.0;
    for _ in 0..=opts.max_retries {
        let parts: Vec<ChunkSum> = chunks
            .par_iter()
            .map(|&(task, count)| crofton_chunk(sphere, outer, scale, opts.seed, task, count))
            .collect();
        let (mut sum, mut sum_sq, mut edge) = (0.0, 0.0, 0);
        for p in &parts {
            sum += p.sum;
            sum_sq += p.sum_sq;
            edge += p.edge_hits;
        }
        if edge > 0 {
            scale *= 1.5;
            continue;
        }
        let n = opts.n_samples as f64;
        let mean = sum / n;
        let var = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
        return Ok(VolumeReport {
            value: mean,
            method: VolumeMethod::MonteCarlo,
            samples: opts.n_samples,
            seed: opts.seed,
            error_estimate: (var / n).sqrt(),
            converged: true,
        });
    }
    Err(Error::Numerical {
        what: "crofton sampling region keeps overflowing",
        best: scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::characteristic_flow;

    fn round() -> EmbeddedSphere {
        EmbeddedSphere::intrinsic(GaugeBody::ellipsoid(DMatrix::identity(3, 3)).unwrap())
    }

    #[test]
    fn round_ht_volume_is_four_pi() {
        let r = ht_volume(&round(), &VolumeOptions::default()).unwrap();
        assert!((r.value - 4.0 * PI).abs() < 1e-10, "{}", r.value);
        assert!(r.converged);
    }

    #[test]
    fn ht_volume_scales_quadratically() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.5, 2.5]));
        let m = GaugeBody::ellipsoid(a).unwrap();
        let amb = GaugeBody::ellipsoid(DMatrix::identity(3, 3)).unwrap();
        let base = ht_volume(&EmbeddedSphere::new(m.clone(), amb.clone()).unwrap(), &VolumeOptions::default()).unwrap();
        let scaled =
            ht_volume(&EmbeddedSphere::new(m, amb.scaled(1.7).unwrap()).unwrap(), &VolumeOptions::default()).unwrap();
        assert!((scaled.value / base.value - 1.7 * 1.7).abs() < 1e-9);
    }

    #[test]
    fn equator_action_is_two_pi() {
        let n = 10_000;
        let pts: Vec<CoSpherePoint> = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                CoSpherePoint {
                    q: DVector::from_vec(vec![t.cos(), t.sin(), 0.0]),
                    p: DVector::from_vec(vec![-t.sin(), t.cos(), 0.0]),
                    level: 1.0,
                }
            })
            .collect();
        assert!((action(&pts, true) - 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn trajectory_action_matches_elapsed_time() {
        let s = round();
        let start = s
            .cosphere_point(DVector::from_vec(vec![1.0, 0.0, 0.0]), DVector::from_vec(vec![0.0, 0.6, 0.8]))
            .unwrap();
        let tr = characteristic_flow(&s, &start, 3.0, 1e-3).unwrap();
        assert!((action(&tr.samples, false) - 3.0).abs() < 1e-5);
    }

    #[test]
    fn chart_density_is_inverse_square_of_dual_gauge() {
        let amb = GaugeBody::power_mean(
            vec![DMatrix::identity(3, 3), DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5, 1.0]))],
            4,
        )
        .unwrap();
        let dual = amb.dual();
        let u = DVector::from_vec(vec![0.3, -0.5, 0.81]).normalize();
        let basis = complement_basis(&u);
        let d = chart_density(&dual, &u, &[basis[0].clone(), basis[1].clone()]);
        let f = dual.value(&u);
        assert!((d - 1.0 / (f * f)).abs() < 1e-12);
    }

    #[test]
    fn line_hit_conventions() {
        let s = round();
        let ball = s.body1().clone();
        let z = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        let through = OrientedLine::through(&s, &DVector::zeros(3), &z).unwrap();
        assert!(line_hits_body(&through, &ball));
        let far = OrientedLine::through(&s, &DVector::from_vec(vec![2.0, 0.0, 0.0]), &z).unwrap();
        assert!(!line_hits_body(&far, &ball));
        let tangent = OrientedLine::through(&s, &DVector::from_vec(vec![1.0, 0.0, 0.0]), &z).unwrap();
        assert!(!line_hits_body(&tangent, &ball));
        let checked = OrientedLine::new(&s, tangent.covector().clone(), tangent.moment().clone()).unwrap();
        assert_eq!(checked, tangent);
    }

    #[test]
    fn euclidean_ball_line_measure_is_four_pi_squared() {
        let r = crofton_line_measure(&round(), &CroftonOptions { n_samples: 20_000, ..Default::default() }).unwrap();
        assert!((r.value - 4.0 * PI * PI).abs() < 3.0 * r.error_estimate, "{r:?}");
        assert!(r.error_estimate < 5e-3 * r.value);
    }
}
