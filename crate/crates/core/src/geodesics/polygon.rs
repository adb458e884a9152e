//! Discrete length and energy of polygons on `Σ₁`, and their minimizer.
//!
//! For segments `d_s = x_{s+1} − x_s` (as implied by the [`Topology`]) the
//! length is `L = Σ F₂(d_s)` and the energy is `E = M·Σ F₂(d_s)²` with `M`
//! the segment count. `E ≥ L²` with equality exactly at uniform spacing, and
//! critical points of `E` are equally spaced critical points of `L`. Pure
//! length minimization is avoided because chords shortcut arcs, so clustering
//! vertices lowers `L` without bound on the spacing.
//!
//! Minimization is L-BFGS in ambient coordinates on `y ↦ E(y / F₁(y))`
//! with Armijo backtracking and radial retraction of accepted iterates; no
//! accepted step increases `E`.

use nalgebra::DVector;

use crate::induced::EmbeddedSphere;

#[derive(Debug, Clone)]
pub enum Topology {
    /// Stored half `x₀ … x_{N−1}` of the closed curve `x, −x`.
    SymmetricHalf,
    /// Closed polygon through all stored vertices.
    Closed,
    /// Open path `start → x₀ → … → x_{N−1} → end` with fixed endpoints.
    Path { start: DVector<f64>, end: DVector<f64> },
}

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    /// Stop once the largest per-vertex length gradient is below this.
    pub tol: f64,
    pub max_iter: usize,
    pub memory: usize,
    pub record_history: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 5000,
            memory: 10,
            record_history: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub points: Vec<DVector<f64>>,
    pub length: f64,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Accepted energies, one per iteration (only when requested).
    pub history: Vec<f64>,
}

/// A vertex reference: index and sign (`−1` stands for `−x_i`).
type End = Option<(usize, f64)>;

pub struct Polygon<'a> {
    sphere: &'a EmbeddedSphere,
    topology: Topology,
}

impl<'a> Polygon<'a> {
    pub fn new(sphere: &'a EmbeddedSphere, topology: Topology) -> Self {
        Self { sphere, topology }
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Segments `(d, from, to)` of the full curve; symmetric topologies list
    /// only the stored half, each standing for two antipodal copies.
    fn segments(&self, pts: &[DVector<f64>]) -> Vec<(DVector<f64>, End, End)> {
        let n = pts.len();
        let mut out = Vec::with_capacity(n + 1);
        match &self.topology {
            Topology::SymmetricHalf => {
                for i in 0..n {
                    if i + 1 < n {
                        out.push((&pts[i + 1] - &pts[i], Some((i, 1.0)), Some((i + 1, 1.0))));
                    } else {
                        out.push((-&pts[0] - &pts[i], Some((i, 1.0)), Some((0, -1.0))));
                    }
                }
            }
            Topology::Closed => {
                for i in 0..n {
                    let j = (i + 1) % n;
                    out.push((&pts[j] - &pts[i], Some((i, 1.0)), Some((j, 1.0))));
                }
            }
            Topology::Path { start, end } => {
                if n == 0 {
                    out.push((end - start, None, None));
                    return out;
                }
                out.push((&pts[0] - start, None, Some((0, 1.0))));
                for i in 0..n - 1 {
                    out.push((&pts[i + 1] - &pts[i], Some((i, 1.0)), Some((i + 1, 1.0))));
                }
                out.push((end - &pts[n - 1], Some((n - 1, 1.0)), None));
            }
        }
        out
    }

    fn multiplicity(&self) -> f64 {
        match self.topology {
            Topology::SymmetricHalf => 2.0,
            _ => 1.0,
        }
    }

    /// Discrete length (of the full closed curve for symmetric topology).
    pub fn length(&self, pts: &[DVector<f64>]) -> f64 {
        let body2 = self.sphere.body2();
        let mut values: Vec<f64> = self.segments(pts).iter().map(|(d, _, _)| body2.value(d)).collect();
        values.sort_by(f64::total_cmp);
        self.multiplicity() * values.iter().sum::<f64>()
    }

    /// `(L, E)`.
    pub fn length_energy(&self, pts: &[DVector<f64>]) -> (f64, f64) {
        let body2 = self.sphere.body2();
        let segs = self.segments(pts);
        let w = self.multiplicity();
        let count = w * segs.len() as f64;
        let (mut l, mut e) = (0.0, 0.0);
        for (d, _, _) in &segs {
            let f = body2.value(d);
            l += f;
            e += f * f;
        }
        (w * l, count * w * e)
    }

    /// `(L, E, ∇E)` with the gradient taken with respect to unnormalized
    /// vertex variables at vertices lying on `Σ₁`.
    pub fn evaluate(&self, pts: &[DVector<f64>]) -> (f64, f64, Vec<DVector<f64>>) {
        let body2 = self.sphere.body2();
        let dim = self.sphere.dim();
        let segs = self.segments(pts);
        let w = self.multiplicity();
        let count = w * segs.len() as f64;
        let mut grad = vec![DVector::zeros(dim); pts.len()];
        let (mut l, mut e) = (0.0, 0.0);
        for (d, from, to) in &segs {
            let (f, g) = body2.first_order(d);
            l += f;
            e += f * f;
            let c = 2.0 * count * w * f;
            if let Some((i, s)) = from {
                grad[*i].axpy(-c * s, &g, 1.0);
            }
            if let Some((j, s)) = to {
                grad[*j].axpy(c * s, &g, 1.0);
            }
        }
        // Chain rule through y ↦ y / F₁(y) at F₁(y) = 1: g ← g − n⟨x, g⟩.
        let body1 = self.sphere.body1();
        for (x, g) in pts.iter().zip(grad.iter_mut()) {
            let n = body1.gradient(x);
            let c = x.dot(g);
            g.axpy(-c, &n, 1.0);
        }
        (w * l, count * w * e, grad)
    }

    /// Largest per-vertex energy gradient scaled to length units
    /// (`∇E ≈ 2L·∇L` near uniform spacing).
    pub fn residual(energy: f64, grad: &[DVector<f64>]) -> f64 {
        let g = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
        if energy > 0.0 {
            g / (2.0 * energy.sqrt())
        } else {
            g
        }
    }

    fn retract(&self, pts: &[DVector<f64>], dir: &[DVector<f64>], alpha: f64) -> Vec<DVector<f64>> {
        let body1 = self.sphere.body1();
        pts.iter()
            .zip(dir)
            .map(|(x, d)| body1.project(&(x + d * alpha)))
            .collect()
    }

    fn spacing(&self, pts: &[DVector<f64>]) -> f64 {
        let segs = self.segments(pts);
        segs.iter().map(|(d, _, _)| d.norm()).sum::<f64>() / segs.len().max(1) as f64
    }

    pub fn minimize(&self, init: Vec<DVector<f64>>, opts: &MinimizeOptions) -> MinimizeOutcome {
        let body1 = self.sphere.body1();
        let mut pts: Vec<DVector<f64>> = init.iter().map(|x| body1.project(x)).collect();
        let (_, mut energy, mut grad) = self.evaluate(&pts);
        let mut residual = Polygon::residual(energy, &grad);
        let mut history = Vec::new();
        if opts.record_history {
            history.push(energy);
        }
        let mut s_hist: Vec<Vec<DVector<f64>>> = Vec::new();
        let mut y_hist: Vec<Vec<DVector<f64>>> = Vec::new();
        let mut iterations = 0;
        let mut stalled = 0;
        while residual > opts.tol && iterations < opts.max_iter && !pts.is_empty() {
            iterations += 1;
            let mut dir = two_loop(&grad, &s_hist, &y_hist);
            let mut slope = dot(&grad, &dir);
            if !(slope < 0.0) {
                s_hist.clear();
                y_hist.clear();
                dir = grad.iter().map(|g| -g).collect();
                slope = dot(&grad, &dir);
            }
            // Keep every vertex displacement below half the vertex spacing.
            let max_step = dir.iter().map(|d| d.norm()).fold(0.0, f64::max);
            let cap = 0.5 * self.spacing(&pts);
            let mut alpha: f64 = if max_step > cap { cap / max_step } else { 1.0 };
            if s_hist.is_empty() && max_step > 0.0 {
                alpha = alpha.min(0.1 * cap / max_step);
            }
            let mut accepted = None;
            for _ in 0..60 {
                let trial = self.retract(&pts, &dir, alpha);
                let (_, trial_energy) = self.length_energy(&trial);
                if trial_energy <= energy + 1e-4 * alpha * slope {
                    let (_, _, g) = self.evaluate(&trial);
                    accepted = Some((trial, trial_energy, g));
                    break;
                }
                // Below the rounding level of E, fall back to the derivative
                // form of the sufficient-decrease test.
                if -slope * alpha <= 1e-11 * energy && trial_energy <= energy * (1.0 + 1e-14) {
                    let (_, _, g) = self.evaluate(&trial);
                    if dot(&g, &dir) <= (2.0 * 1e-4 - 1.0) * slope {
                        accepted = Some((trial, trial_energy, g));
                        break;
                    }
                }
                alpha *= 0.5;
            }
            let Some((trial, trial_energy, new_grad)) = accepted else {
                if s_hist.is_empty() {
                    break;
                }
                s_hist.clear();
                y_hist.clear();
                continue;
            };
            let s: Vec<DVector<f64>> = trial.iter().zip(&pts).map(|(a, b)| a - b).collect();
            let y: Vec<DVector<f64>> = new_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                s_hist.push(s);
                y_hist.push(y);
                if s_hist.len() > opts.memory {
                    s_hist.remove(0);
                    y_hist.remove(0);
                }
            }
            if Polygon::residual(trial_energy, &new_grad) >= 0.999 * residual {
                stalled += 1;
            } else {
                stalled = 0;
            }
            pts = trial;
            energy = trial_energy;
            grad = new_grad;
            residual = Polygon::residual(energy, &grad);
            if opts.record_history {
                history.push(energy);
            }
            if stalled >= 50 {
                break;
            }
        }
        MinimizeOutcome {
            converged: residual <= opts.tol,
            length: self.length(&pts),
            points: pts,
            energy,
            residual,
            iterations,
            history,
        }
    }
}

fn dot(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

/// L-BFGS two-loop recursion returning the search direction `−H·g`.
fn two_loop(
    grad: &[DVector<f64>],
    s_hist: &[Vec<DVector<f64>>],
    y_hist: &[Vec<DVector<f64>>],
) -> Vec<DVector<f64>> {
    let mut q: Vec<DVector<f64>> = grad.to_vec();
    let k = s_hist.len();
    let mut alphas = vec![0.0; k];
    let mut rhos = vec![0.0; k];
    for i in (0..k).rev() {
        rhos[i] = 1.0 / dot(&y_hist[i], &s_hist[i]);
        alphas[i] = rhos[i] * dot(&s_hist[i], &q);
        for (qv, yv) in q.iter_mut().zip(&y_hist[i]) {
            qv.axpy(-alphas[i], yv, 1.0);
        }
    }
    if k > 0 {
        let gamma = dot(&s_hist[k - 1], &y_hist[k - 1]) / dot(&y_hist[k - 1], &y_hist[k - 1]);
        for qv in q.iter_mut() {
            *qv *= gamma;
        }
    }
    for i in 0..k {
        let beta = rhos[i] * dot(&y_hist[i], &q);
        for (qv, sv) in q.iter_mut().zip(&s_hist[i]) {
            qv.axpy(alphas[i] - beta, sv, 1.0);
        }
    }
    q.into_iter().map(|v| -v).collect()
}

/// Inserts the projected midpoint after every vertex (doubling the count).
pub fn upsample(sphere: &EmbeddedSphere, topology: &Topology, pts: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let body1 = sphere.body1();
    let n = pts.len();
    let mut out = Vec::with_capacity(2 * n + 1);
    match topology {
        Topology::SymmetricHalf | Topology::Closed => {
            for i in 0..n {
                let next = if i + 1 < n {
                    pts[i + 1].clone()
                } else if matches!(topology, Topology::SymmetricHalf) {
                    -&pts[0]
                } else {
                    pts[0].clone()
                };
                out.push(pts[i].clone());
                out.push(body1.project(&((&pts[i] + next) * 0.5)));
            }
        }
        Topology::Path { start, end } => {
            out.push(body1.project(&((start + &pts[0]) * 0.5)));
            for i in 0..n {
                out.push(pts[i].clone());
                let next = if i + 1 < n { &pts[i + 1] } else { end };
                out.push(body1.project(&((&pts[i] + next) * 0.5)));
            }
        }
    }
    out
}
