//! Closed geodesics on `Σ₁`: girth, characteristic flow, spectrum and
//! diameter probes.

pub mod polygon;

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::induced::{restrict_with, CoSpherePoint, EmbeddedSphere, LINE_TOL};
use crate::line::minimize_along;
use crate::seed::{gaussian_vector, task_rng};
use polygon::{upsample, MinimizeOptions, MinimizeOutcome, Polygon, Topology};

/// Closed curve `x₀ … x_{N−1}, −x₀ … −x_{N−1}` stored by its first half.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSymmetricCurve {
    half_points: Vec<DVector<f64>>,
}

impl DiscreteSymmetricCurve {
    /// Projects the given points radially onto `Σ₁`.
    pub fn new(sphere: &EmbeddedSphere, half_points: Vec<DVector<f64>>) -> Result<Self> {
        if half_points.len() < 3 {
            return Err(Error::Precondition("a symmetric curve needs at least 3 half points".into()));
        }
        if half_points.iter().any(|x| x.len() != sphere.dim() || x.norm() == 0.0) {
            return Err(Error::InvalidInput("curve points must be nonzero vectors of the sphere dimension".into()));
        }
        let body1 = sphere.body1();
        Ok(Self {
            half_points: half_points.iter().map(|x| body1.project(x)).collect(),
        })
    }

    /// Samples `θ ↦ cos θ·u + sin θ·v` at `θ = πi/N` and projects onto `Σ₁`.
    pub fn plane_section(sphere: &EmbeddedSphere, u: &DVector<f64>, v: &DVector<f64>, n: usize) -> Result<Self> {
        let pts = (0..n)
            .map(|i| {
                let t = PI * i as f64 / n as f64;
                u * t.cos() + v * t.sin()
            })
            .collect();
        Self::new(sphere, pts)
    }

    pub fn half_points(&self) -> &[DVector<f64>] {
        &self.half_points
    }

    /// `N`, the number of stored points.
    pub fn n(&self) -> usize {
        self.half_points.len()
    }

    /// All `2N` points in order.
    pub fn points(&self) -> Vec<DVector<f64>> {
        let mut out = self.half_points.clone();
        out.extend(self.half_points.iter().map(|x| -x));
        out
    }

    /// Polygon length in `‖·‖₂`.
    pub fn length(&self, sphere: &EmbeddedSphere) -> f64 {
        crate::induced::chord_length(sphere.body2(), &self.points(), true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GirthOptions {
    /// Half points at the coarsest level.
    pub n: usize,
    /// Number of starts; the first (up to 3) are coordinate-plane sections.
    pub starts: usize,
    pub seed: u64,
    /// First-order residual required for convergence.
    pub tol: f64,
    /// Continuation levels `N, 2N, 4N, …`.
    pub levels: usize,
    /// How many of the best coarse candidates are carried through continuation.
    pub refine: usize,
    pub max_iter: usize,
}

impl Default for GirthOptions {
    fn default() -> Self {
        Self {
            n: 32,
            starts: 6,
            seed: 0,
            tol: 1e-9,
            levels: 3,
            refine: 2,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuationStep {
    pub half_points: usize,
    pub length: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `(4·L_{2N} − L_N)/3` using the previous level.
    pub richardson: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GirthCertificate {
    pub residual: f64,
    pub continuation: Vec<ContinuationStep>,
    /// `|L_{2N} − L_N|` between consecutive levels.
    pub deltas: Vec<f64>,
    pub error_bar: f64,
    pub start_index: usize,
    pub start_kind: StartKind,
    /// Coarse-level length reached from every start (NaN if it failed).
    pub coarse_lengths: Vec<f64>,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    CoordinatePlane,
    RandomSymmetric,
    RandomClosed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GirthResult {
    /// Richardson-extrapolated length (the finest polygon length with one level).
    pub girth: f64,
    /// Length of the finest polygon.
    pub polygon_length: f64,
    pub curve: DiscreteSymmetricCurve,
    pub certificate: GirthCertificate,
}

fn require_symmetric(sphere: &EmbeddedSphere, what: &str) -> Result<()> {
    if !sphere.is_symmetric() {
        return Err(Error::Unsupported(format!("{what} requires centrally symmetric bodies")));
    }
    Ok(())
}

fn coordinate_planes(dim: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for gap in 1..dim {
        for a in 0..dim - gap {
            out.push((a, a + gap));
        }
    }
    out
}

fn unit(dim: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(dim);
    e[i] = 1.0;
    e
}

fn random_frame<R: Rng>(rng: &mut R, dim: usize) -> (DVector<f64>, DVector<f64>) {
    loop {
        let u = gaussian_vector(rng, dim);
        let v = gaussian_vector(rng, dim);
        let un = u.norm();
        if un < 1e-8 {
            continue;
        }
        let u = u / un;
        let w = &v - &u * u.dot(&v);
        let wn = w.norm();
        if wn > 1e-8 {
            return (u, w / wn);
        }
    }
}

/// Perturbation `Σ_k a_k cos kθ + b_k sin kθ` with amplitude capped at `cap`.
fn harmonics<R: Rng>(rng: &mut R, dim: usize, orders: &[usize], scale: f64, cap: f64) -> Vec<(usize, DVector<f64>, DVector<f64>)> {
    let mut terms: Vec<_> = orders
        .iter()
        .map(|&k| {
            let s = scale / k.max(1) as f64;
            (k, gaussian_vector(rng, dim) * s, gaussian_vector(rng, dim) * s)
        })
        .collect();
    let bound: f64 = terms.iter().map(|(_, a, b)| a.norm() + b.norm()).sum();
    if bound > cap {
        for (_, a, b) in terms.iter_mut() {
            *a *= cap / bound;
            *b *= cap / bound;
        }
    }
    terms
}

fn loop_points(
    u: &DVector<f64>,
    v: &DVector<f64>,
    terms: &[(usize, DVector<f64>, DVector<f64>)],
    count: usize,
    turn: f64,
) -> Vec<DVector<f64>> {
    (0..count)
        .map(|i| {
            let t = turn * i as f64 / count as f64;
            let mut x = u * t.cos() + v * t.sin();
            for (k, a, b) in terms {
                let kt = *k as f64 * t;
                x += a * kt.cos() + b * kt.sin();
            }
            x
        })
        .collect()
}

/// Starting half polygons for symmetric minimization.
fn symmetric_starts(dim: usize, starts: usize, seed: u64, n: usize) -> Vec<(StartKind, Vec<DVector<f64>>)> {
    let planes = coordinate_planes(dim);
    let n_coord = starts.min(3).min(planes.len());
    let mut out = Vec::with_capacity(starts);
    for &(a, b) in planes.iter().take(n_coord) {
        out.push((StartKind::CoordinatePlane, loop_points(&unit(dim, a), &unit(dim, b), &[], n, PI)));
    }
    for k in n_coord..starts {
        let mut rng = task_rng(seed, k as u64);
        let (u, v) = random_frame(&mut rng, dim);
        let terms = harmonics(&mut rng, dim, &[3, 5], 0.3, 0.5);
        out.push((StartKind::RandomSymmetric, loop_points(&u, &v, &terms, n, PI)));
    }
    out
}

fn minimize(
    sphere: &EmbeddedSphere,
    topology: Topology,
    init: Vec<DVector<f64>>,
    tol: f64,
    max_iter: usize,
) -> MinimizeOutcome {
    let poly = Polygon::new(sphere, topology);
    poly.minimize(
        init,
        &MinimizeOptions {
            tol,
            max_iter,
            ..Default::default()
        },
    )
}

/// Runs continuation from a converged coarse polygon; returns the finest
/// outcome and the per-level record.
fn continuation(
    sphere: &EmbeddedSphere,
    topology: &Topology,
    coarse: MinimizeOutcome,
    levels: usize,
    tol: f64,
    max_iter: usize,
) -> (MinimizeOutcome, Vec<ContinuationStep>) {
    let mut steps = vec![ContinuationStep {
        half_points: coarse.points.len(),
        length: coarse.length,
        residual: coarse.residual,
        iterations: coarse.iterations,
        converged: coarse.converged,
        richardson: None,
    }];
    let mut current = coarse;
    for _ in 1..levels {
        let init = upsample(sphere, topology, &current.points);
        let next = minimize(sphere, topology.clone(), init, tol, max_iter);
        let richardson = (4.0 * next.length - current.length) / 3.0;
        steps.push(ContinuationStep {
            half_points: next.points.len(),
            length: next.length,
            residual: next.residual,
            iterations: next.iterations,
            converged: next.converged,
            richardson: Some(richardson),
        });
        current = next;
    }
    (current, steps)
}

fn extrapolated(steps: &[ContinuationStep]) -> (f64, f64) {
    let last = steps.last().expect("at least one level");
    match (last.richardson, steps.len()) {
        (Some(r), k) if k >= 3 => {
            let prev = steps[k - 2].richardson.unwrap_or(steps[k - 2].length);
            (r, (r - prev).abs())
        }
        (Some(r), _) => (r, (last.length - steps[0].length).abs() / 3.0),
        (None, _) => (last.length, f64::NAN),
    }
}

/// Length of the shortest centrally symmetric closed geodesic on `Σ₁` in
/// the metric induced by `‖·‖₂`.
pub fn girth(sphere: &EmbeddedSphere, opts: &GirthOptions) -> Result<GirthResult> {
    require_symmetric(sphere, "girth")?;
    if sphere.dim() < 3 {
        return Err(Error::Precondition("girth needs dimension at least 3".into()));
    }
    if opts.n < 3 || opts.starts == 0 || opts.levels == 0 || opts.refine == 0 {
        return Err(Error::InvalidInput(
            "girth options need n ≥ 3 and positive starts, levels and refine".into(),
        ));
    }
    let starts = symmetric_starts(sphere.dim(), opts.starts, opts.seed, opts.n);
    let coarse: Vec<(StartKind, MinimizeOutcome)> = starts
        .into_par_iter()
        .map(|(kind, init)| (kind, minimize(sphere, Topology::SymmetricHalf, init, opts.tol, opts.max_iter)))
        .collect();
    let coarse_lengths: Vec<f64> = coarse
        .iter()
        .map(|(_, o)| if o.length.is_finite() { o.length } else { f64::NAN })
        .collect();

    let mut order: Vec<usize> = (0..coarse.len()).filter(|&i| coarse_lengths[i].is_finite()).collect();
    if order.is_empty() {
        return Err(Error::Numerical {
            what: "girth: every start failed",
            best: f64::NAN,
        });
    }
    // Converged candidates first, then by length.
    order.sort_by(|&a, &b| {
        (!coarse[a].1.converged)
            .cmp(&!coarse[b].1.converged)
            .then(coarse_lengths[a].total_cmp(&coarse_lengths[b]))
    });
    order.truncate(opts.refine);

    let topology = Topology::SymmetricHalf;
    let refined: Vec<(usize, MinimizeOutcome, Vec<ContinuationStep>)> = order
        .par_iter()
        .map(|&i| {
            let (out, steps) = continuation(sphere, &topology, coarse[i].1.clone(), opts.levels, opts.tol, opts.max_iter);
            (i, out, steps)
        })
        .collect();

    let (best_index, best_out, best_steps) = refined
        .into_iter()
        .min_by(|a, b| {
            let ca = a.2.iter().all(|s| s.converged);
            let cb = b.2.iter().all(|s| s.converged);
            (!ca).cmp(&!cb).then(extrapolated(&a.2).0.total_cmp(&extrapolated(&b.2).0))
        })
        .expect("at least one candidate");
    let (value, error_bar) = extrapolated(&best_steps);
    let deltas: Vec<f64> = best_steps.windows(2).map(|w| (w[1].length - w[0].length).abs()).collect();
    let shrinking = deltas.windows(2).all(|w| w[1] <= w[0]);
    let converged = best_steps.iter().all(|s| s.converged);
    let curve = DiscreteSymmetricCurve {
        half_points: best_out.points.clone(),
    };
    Ok(GirthResult {
        girth: value,
        polygon_length: best_out.length,
        curve,
        certificate: GirthCertificate {
            residual: best_out.residual,
            continuation: best_steps,
            deltas,
            error_bar,
            start_index: best_index,
            start_kind: coarse[best_index].0,
            coarse_lengths,
            certified: converged && shrinking,
        },
    })
}

/// Girth of `Σ₂*` inside `(V, ‖·‖₁*)`, computed directly on the swapped pair.
pub fn dual_girth(sphere: &EmbeddedSphere, opts: &GirthOptions) -> Result<GirthResult> {
    girth(&sphere.swapped(), opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefineOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefineReport {
    pub length_before: f64,
    pub length_after: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Local minimization of a near-critical symmetric curve.
pub fn refine_closed_geodesic(
    sphere: &EmbeddedSphere,
    curve: &DiscreteSymmetricCurve,
    opts: &RefineOptions,
) -> Result<(DiscreteSymmetricCurve, RefineReport)> {
    require_symmetric(sphere, "refine_closed_geodesic")?;
    let before = curve.length(sphere);
    let out = minimize(
        sphere,
        Topology::SymmetricHalf,
        curve.half_points.clone(),
        opts.tol,
        opts.max_iter,
    );
    let report = RefineReport {
        length_before: before,
        length_after: out.length,
        residual: out.residual,
        iterations: out.iterations,
        converged: out.converged,
    };
    Ok((DiscreteSymmetricCurve { half_points: out.points }, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicTrajectory {
    pub samples: Vec<CoSpherePoint>,
    pub times: Vec<f64>,
    /// Euclidean distance between the first and last `(q, p)`.
    pub closure_residual: f64,
    /// Largest `|G − 1|` observed before each renormalization.
    pub max_drift: f64,
    /// Set when a step failed; the samples then hold the prefix reached.
    pub failure: Option<String>,
}

fn flow_field(sphere: &EmbeddedSphere, x: &DVector<f64>, xi: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
    let body1 = sphere.body1();
    let n = body1.gradient(x);
    let t0 = -xi.dot(x) / n.dot(x);
    let m = minimize_along(sphere.dual2(), xi, &n, t0, LINE_TOL)?;
    let big_p = xi + &n * m.t;
    let dx = sphere.dual2().gradient(&big_p);
    let dxi = -(body1.hessian(x) * &dx) * m.t;
    Ok((dx, dxi))
}

/// Integrates the characteristic flow of `G` for time `t_total` with RK4.
///
/// The flow runs on `T*V` with Hamiltonian `K(x, ξ) = min_t F₂*(ξ + t∇F₁(x))`,
/// which restricts to `G` along `Σ₁`; after every step `q` is rescaled onto
/// `Σ₁`, `p` is made canonical and then rescaled to `G = 1`.
pub fn characteristic_flow(
    sphere: &EmbeddedSphere,
    start: &CoSpherePoint,
    t_total: f64,
    dt: f64,
) -> Result<CharacteristicTrajectory> {
    if !(t_total > 0.0 && dt > 0.0) || !t_total.is_finite() {
        return Err(Error::InvalidInput("flow time and step must be positive".into()));
    }
    let g0 = sphere.induced_hamiltonian(&start.q, &start.p)?;
    if (g0 - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!("start is off the co-sphere: G = {g0}")));
    }
    let steps = (t_total / dt).ceil().max(1.0) as usize;
    let h = t_total / steps as f64;
    let body1 = sphere.body1();
    let mut samples = vec![start.clone()];
    let mut times = vec![0.0];
    let mut max_drift: f64 = 0.0;
    let mut failure = None;
    let (mut x, mut xi) = (start.q.clone(), start.p.clone());
    for k in 0..steps {
        let step = || -> Result<(DVector<f64>, DVector<f64>)> {
            let (k1x, k1p) = flow_field(sphere, &x, &xi)?;
            let (k2x, k2p) = flow_field(sphere, &(&x + &k1x * (0.5 * h)), &(&xi + &k1p * (0.5 * h)))?;
            let (k3x, k3p) = flow_field(sphere, &(&x + &k2x * (0.5 * h)), &(&xi + &k2p * (0.5 * h)))?;
            let (k4x, k4p) = flow_field(sphere, &(&x + &k3x * h), &(&xi + &k3p * h))?;
            let nx = &x + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
            let np = &xi + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0);
            Ok((nx, np))
        };
        let (nx, np) = match step() {
            Ok(v) => v,
            Err(e) => {
                failure = Some(format!("step {k} failed: {e}"));
                break;
            }
        };
        let q = body1.project(&nx);
        let n = body1.gradient(&q);
        let p = restrict_with(&np, &q, &n);
        let level = match sphere.shadow_with(&q, &n, &p) {
            Ok(s) => s.level,
            Err(e) => {
                failure = Some(format!("step {k} renormalization failed: {e}"));
                break;
            }
        };
        if !(level > 0.0) {
            failure = Some(format!("step {k} produced a degenerate covector"));
            break;
        }
        max_drift = max_drift.max((level - 1.0).abs());
        let p = p / level;
        x = q.clone();
        xi = p.clone();
        samples.push(CoSpherePoint { q, p, level: 1.0 });
        times.push(h * (k + 1) as f64);
    }
    let last = samples.last().expect("non-empty");
    let closure_residual = ((&last.q - &start.q).norm_squared() + (&last.p - &start.p).norm_squared()).sqrt();
    Ok(CharacteristicTrajectory {
        samples,
        times,
        closure_residual,
        max_drift,
        failure,
    })
}

/// Legendre lift of a closed polygon using 4th-order central differences
/// for the tangent directions.
pub fn lift_closed_curve(sphere: &EmbeddedSphere, points: &[DVector<f64>]) -> Result<Vec<CoSpherePoint>> {
    let n = points.len();
    if n < 5 {
        return Err(Error::Precondition("lifting needs at least 5 points".into()));
    }
    (0..n)
        .map(|i| {
            let at = |k: isize| &points[(i as isize + k).rem_euclid(n as isize) as usize];
            let v = (at(1) - at(-1)) * 8.0 - (at(2) - at(-2));
            sphere.lift(&points[i], &v)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumOptions {
    pub k_starts: usize,
    pub seed: u64,
    /// Half points per start (closed starts use twice as many).
    pub n: usize,
    /// Also try coordinate-plane sections traversed up to this many times.
    pub max_winding: usize,
    pub cluster_tol: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            k_starts: 4,
            seed: 0,
            n: 32,
            max_winding: 1,
            cluster_tol: 1e-4,
            tol: 1e-8,
            max_iter: 3000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumHit {
    pub length: f64,
    pub residual: f64,
    pub kind: StartKind,
    pub winding: usize,
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumProbe {
    /// Sorted cluster representatives.
    pub lengths: Vec<f64>,
    pub hits: Vec<SpectrumHit>,
    pub starts_tried: usize,
}

/// Multi-start search for closed geodesics; returns the distinct lengths
/// found. This is a probe and never claims to find every closed geodesic.
pub fn length_spectrum_probe(sphere: &EmbeddedSphere, opts: &SpectrumOptions) -> Result<SpectrumProbe> {
    if opts.k_starts == 0 {
        return Err(Error::InvalidInput("k_starts must be at least 1".into()));
    }
    if opts.n < 3 {
        return Err(Error::InvalidInput("n must be at least 3".into()));
    }
    let dim = sphere.dim();
    let symmetric = sphere.is_symmetric();
    let mut tasks: Vec<(StartKind, usize, Topology, Vec<DVector<f64>>)> = Vec::new();
    for (a, b) in coordinate_planes(dim).into_iter().take(3) {
        for w in 1..=opts.max_winding.max(1) {
            let (topology, pts) = if w == 1 && symmetric {
                (Topology::SymmetricHalf, loop_points(&unit(dim, a), &unit(dim, b), &[], opts.n, PI))
            } else {
                let count = 2 * opts.n * w;
                (
                    Topology::Closed,
                    loop_points(&unit(dim, a), &unit(dim, b), &[], count, 2.0 * PI * w as f64),
                )
            };
            tasks.push((StartKind::CoordinatePlane, w, topology, pts));
        }
    }
    for k in 0..opts.k_starts {
        if symmetric {
            let mut rng = task_rng(opts.seed, 2 * k as u64);
            let (u, v) = random_frame(&mut rng, dim);
            let terms = harmonics(&mut rng, dim, &[3, 5], 0.3, 0.5);
            tasks.push((StartKind::RandomSymmetric, 1, Topology::SymmetricHalf, loop_points(&u, &v, &terms, opts.n, PI)));
        }
        let mut rng = task_rng(opts.seed, 2 * k as u64 + 1);
        let (u, v) = random_frame(&mut rng, dim);
        let terms = harmonics(&mut rng, dim, &[0, 2], 0.2, 0.4);
        tasks.push((
            StartKind::RandomClosed,
            1,
            Topology::Closed,
            loop_points(&u, &v, &terms, 2 * opts.n, 2.0 * PI),
        ));
    }
    let starts_tried = tasks.len();
    let scale = 1.0 / sphere.body2().euclidean_bounds().1 * sphere.body1().euclidean_bounds().0;
    let hits: Vec<Option<SpectrumHit>> = tasks
        .into_par_iter()
        .enumerate()
        .map(|(start, (kind, winding, topology, pts))| {
            let coarse = minimize(sphere, topology.clone(), pts, opts.tol, opts.max_iter);
            if !coarse.converged || coarse.length < 1e-3 * scale {
                return None;
            }
            let (fine, steps) = continuation(sphere, &topology, coarse, 2, opts.tol, opts.max_iter);
            if !fine.converged {
                return None;
            }
            let (length, _) = extrapolated(&steps);
            Some(SpectrumHit {
                length,
                residual: fine.residual,
                kind,
                winding,
                start,
            })
        })
        .collect();
    let hits: Vec<SpectrumHit> = hits.into_iter().flatten().collect();
    let mut values: Vec<f64> = hits.iter().map(|h| h.length).collect();
    values.sort_by(f64::total_cmp);
    let lengths = cluster(&values, opts.cluster_tol);
    Ok(SpectrumProbe {
        lengths,
        hits,
        starts_tried,
    })
}

/// Groups sorted values whose relative gap to the running cluster mean is
/// within `tol`; returns the cluster means.
pub fn cluster(sorted: &[f64], tol: f64) -> Vec<f64> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some((sum, count)) if (v - *sum / *count as f64).abs() <= tol * v.abs() => {
                *sum += v;
                *count += 1;
            }
            _ => out.push((v, 1)),
        }
    }
    out.into_iter().map(|(s, c)| s / c as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiameterOptions {
    pub m_pairs: usize,
    pub seed: u64,
    /// Interior vertices per path.
    pub n: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DiameterOptions {
    fn default() -> Self {
        Self {
            m_pairs: 32,
            seed: 0,
            n: 32,
            tol: 1e-8,
            max_iter: 3000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiameterProbe {
    /// Largest sampled distance.
    pub diameter: f64,
    /// Shortest discrete path length for each sampled pair, in order.
    pub distances: Vec<f64>,
    pub argmax: usize,
}

fn shortest_path(sphere: &EmbeddedSphere, x: &DVector<f64>, y: &DVector<f64>, pair: u64, opts: &DiameterOptions) -> f64 {
    let dim = sphere.dim();
    let u = x / x.norm();
    let yn = y / y.norm();
    let mut w = &yn - &u * u.dot(&yn);
    if w.norm() < 1e-8 {
        // Nearly antipodal or equal: any plane through x will do.
        let mut rng = task_rng(pair, u64::MAX);
        loop {
            let g = gaussian_vector(&mut rng, dim);
            w = &g - &u * u.dot(&g);
            if w.norm() > 1e-8 {
                break;
            }
        }
    }
    let v = &w / w.norm();
    let phi = yn.dot(&v).atan2(yn.dot(&u));
    let mut best = f64::INFINITY;
    for arc in [phi, phi - 2.0 * PI] {
        let pts: Vec<DVector<f64>> = (1..=opts.n)
            .map(|j| {
                let t = arc * j as f64 / (opts.n + 1) as f64;
                &u * t.cos() + &v * t.sin()
            })
            .collect();
        let out = minimize(
            sphere,
            Topology::Path {
                start: x.clone(),
                end: y.clone(),
            },
            pts,
            opts.tol,
            opts.max_iter,
        );
        best = best.min(out.length);
    }
    best
}

/// Lower estimate of the diameter of `Σ₁`: the largest shortest-path
/// length over `m_pairs` seeded random point pairs.
pub fn diameter_probe(sphere: &EmbeddedSphere, opts: &DiameterOptions) -> Result<DiameterProbe> {
    if opts.m_pairs == 0 {
        return Err(Error::InvalidInput("m_pairs must be at least 1".into()));
    }
    if opts.n == 0 {
        return Err(Error::InvalidInput("paths need at least one interior vertex".into()));
    }
    let dim = sphere.dim();
    let body1 = sphere.body1();
    let distances: Vec<f64> = (0..opts.m_pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = task_rng(opts.seed, k as u64);
            let x = body1.project(&gaussian_vector(&mut rng, dim));
            let y = body1.project(&gaussian_vector(&mut rng, dim));
            shortest_path(sphere, &x, &y, crate::seed::sub_seed(opts.seed, k as u64), opts)
        })
        .collect();
    let (argmax, diameter) = distances
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
    Ok(DiameterProbe {
        diameter,
        distances,
        argmax,
    })
}
