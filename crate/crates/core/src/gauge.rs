//! Smooth quadratically convex bodies described by their gauge.
//!
//! A [`GaugeBody`] is a positively 1-homogeneous function `F` on `V \ {0}`
//! whose unit level set `{F = 1}` is a quadratically convex hypersurface
//! enclosing the origin. Every family carries analytic first and second
//! derivatives: the gradient `∇F` (a covector, 0-homogeneous) and the
//! Hessian of `½F²` (0-homogeneous, positive definite for the bodies used
//! here).
//!
//! Dual bodies are gauges on `V*`. The dual of an ellipsoid is again an
//! ellipsoid and is kept in closed form; the dual of any other body is
//! evaluated pointwise by a damped Newton solve of
//! `min_y ½F(y)² − ⟨ξ, y⟩`, whose minimizer `y` satisfies `F(y)∇F(y) = ξ`,
//! so that `F*(ξ) = F(y)` and the support point is `y / F(y)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed::{complement_basis, task_rng, unit_vector};

/// Settings for the pointwise dual-gauge solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualSettings {
    /// Stop when `|F(y)∇F(y) − ξ| ≤ tol · |ξ|`.
    pub tol: f64,
    pub max_newton: usize,
    pub max_ascent: usize,
}

impl Default for DualSettings {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_newton: 80,
            max_ascent: 20_000,
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Ellipsoid {
        a: DMatrix<f64>,
        a_inv: DMatrix<f64>,
        eig: (f64, f64),
    },
    PowerMean {
        terms: Vec<DMatrix<f64>>,
        p: u32,
        /// Inverse of the averaged term matrix, used to seed dual solves.
        seed_inv: DMatrix<f64>,
        bounds: (f64, f64),
    },
    /// `F(x) = sqrt(xᵀMx) + ⟨w, x⟩` with `‖w‖_{M⁻¹} < 1`.
    Randers {
        m: DMatrix<f64>,
        m_inv: DMatrix<f64>,
        w: DVector<f64>,
        bounds: (f64, f64),
    },
    Dual {
        primal: Arc<GaugeBody>,
        settings: DualSettings,
    },
}

/// A smooth Minkowski gauge together with its derivatives.
#[derive(Debug, Clone)]
pub struct GaugeBody {
    dim: usize,
    kind: Kind,
    symmetric: bool,
    label: String,
}

/// Output of a pointwise dual solve.
#[derive(Debug, Clone)]
pub struct DualSolution {
    /// `F*(ξ)`.
    pub value: f64,
    /// The maximizer of `⟨ξ, x⟩` on `{F = 1}`; equals `∇F*(ξ)`.
    pub support_point: DVector<f64>,
    /// `F*(ξ) · support_point`, the gradient of `½F*²` at `ξ`.
    pub scaled: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Sampled certificate of quadratic convexity for one body.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ConvexityCertificate {
    pub label: String,
    pub min_eigenvalue: f64,
    pub samples: usize,
    pub seed: u64,
    pub certified: bool,
}

fn check_square(a: &DMatrix<f64>, what: &str) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidInput(format!("{what}: matrix is not square")));
    }
    if a.nrows() < 2 {
        return Err(Error::InvalidInput(format!("{what}: dimension must be at least 2")));
    }
    Ok(a.nrows())
}

/// Validates symmetry and positive definiteness, returning the extreme eigenvalues.
fn spd_eigen_range(a: &DMatrix<f64>, what: &str) -> Result<(f64, f64)> {
    check_square(a, what)?;
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{what}: non-finite entry")));
    }
    let scale = a.amax().max(1e-300);
    if (a - a.transpose()).amax() > 1e-12 * scale {
        return Err(Error::InvalidInput(format!("{what}: matrix is not symmetric")));
    }
    let eig = SymmetricEigen::new(a.clone()).eigenvalues;
    let lo = eig.min();
    let hi = eig.max();
    if lo <= 1e-12 {
        return Err(Error::InvalidInput(format!(
            "{what}: matrix is not positive definite (least eigenvalue {lo:e})"
        )));
    }
    Ok((lo, hi))
}

impl GaugeBody {
    /// `F(x) = sqrt(xᵀ A x)` for a symmetric positive definite `A`.
    pub fn ellipsoid(a: DMatrix<f64>) -> Result<Self> {
        let eig = spd_eigen_range(&a, "ellipsoid")?;
        let a_inv = a
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidInput("ellipsoid: Cholesky factorization failed".into()))?
            .inverse();
        let dim = a.nrows();
        Ok(Self {
            dim,
            kind: Kind::Ellipsoid { a, a_inv, eig },
            symmetric: true,
            label: format!("ellipsoid{dim}"),
        })
    }

    /// `F(x) = (Σᵢ (xᵀAᵢx)^{p/2})^{1/p}` for an even exponent `p ≥ 2`.
    pub fn power_mean(terms: Vec<DMatrix<f64>>, p: u32) -> Result<Self> {
        if p < 2 || !p.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "power_mean: exponent must be even and at least 2, got {p}"
            )));
        }
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidInput("power_mean: no terms".into()))?;
        let dim = check_square(first, "power_mean")?;
        let m = f64::from(p / 2);
        let (mut lo, mut hi) = (0.0, 0.0);
        let mut sum = DMatrix::zeros(dim, dim);
        for a in &terms {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::InvalidInput("power_mean: terms differ in dimension".into()));
            }
            let (l, h) = spd_eigen_range(a, "power_mean term")?;
            lo += l.powf(m);
            hi += h.powf(m);
            sum += a;
        }
        let pf = f64::from(p);
        let seed_inv = (sum / terms.len() as f64)
            .cholesky()
            .ok_or_else(|| Error::InvalidInput("power_mean: averaged term is singular".into()))?
            .inverse();
        Ok(Self {
            dim,
            kind: Kind::PowerMean {
                terms,
                p,
                seed_inv,
                bounds: (lo.powf(1.0 / pf), hi.powf(1.0 / pf)),
            },
            symmetric: true,
            label: format!("power_mean{dim}_p{p}"),
        })
    }

    /// The non-reversible gauge `F(x) = sqrt(xᵀMx) + ⟨w, x⟩`; requires
    /// `wᵀM⁻¹w < 1` so that the unit body is quadratically convex and
    /// contains the origin in its interior.
    pub fn randers(m: DMatrix<f64>, w: DVector<f64>) -> Result<Self> {
        let (lo, hi) = spd_eigen_range(&m, "randers")?;
        let dim = m.nrows();
        if w.len() != dim {
            return Err(Error::InvalidInput("randers: drift dimension mismatch".into()));
        }
        let m_inv = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidInput("randers: Cholesky factorization failed".into()))?
            .inverse();
        let drift = w.dot(&(&m_inv * &w)).sqrt();
        if !(drift < 1.0) {
            return Err(Error::InvalidInput(format!(
                "randers: drift norm {drift} must be below 1"
            )));
        }
        let symmetric = w.iter().all(|&v| v == 0.0);
        Ok(Self {
            dim,
            kind: Kind::Randers {
                m,
                m_inv,
                w,
                bounds: (lo.sqrt() * (1.0 - drift), hi.sqrt() * (1.0 + drift)),
            },
            symmetric,
            label: format!("randers{dim}"),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_dual(&self) -> bool {
        matches!(self.kind, Kind::Dual { .. })
    }

    /// Constants `lo, hi` with `lo·|x| ≤ F(x) ≤ hi·|x|` (Euclidean `|·|`).
    pub fn euclidean_bounds(&self) -> (f64, f64) {
        match &self.kind {
            Kind::Ellipsoid { eig, .. } => (eig.0.sqrt(), eig.1.sqrt()),
            Kind::PowerMean { bounds, .. } | Kind::Randers { bounds, .. } => *bounds,
            Kind::Dual { primal, .. } => {
                let (lo, hi) = primal.euclidean_bounds();
                (1.0 / hi, 1.0 / lo)
            }
        }
    }

    /// Euclidean radius of a ball containing `{F ≤ 1}`.
    pub fn outer_radius(&self) -> f64 {
        1.0 / self.euclidean_bounds().0
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        match &self.kind {
            Kind::Ellipsoid { a, .. } => x.dot(&(a * x)).max(0.0).sqrt(),
            Kind::PowerMean { terms, p, .. } => {
                let r = x.norm();
                if r == 0.0 {
                    return 0.0;
                }
                let u = x / r;
                let m = (p / 2) as i32;
                let s: f64 = terms.iter().map(|a| u.dot(&(a * &u)).powi(m)).sum();
                r * s.powf(1.0 / f64::from(*p))
            }
            Kind::Randers { m, w, .. } => x.dot(&(m * x)).max(0.0).sqrt() + w.dot(x),
            Kind::Dual { primal, settings } => solve_dual(primal, x, settings).value,
        }
    }

    /// Value and gradient, sharing work (one solve for dual bodies).
    pub fn first_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        match &self.kind {
            Kind::Ellipsoid { a, .. } => {
                let ax = a * x;
                let f = x.dot(&ax).max(0.0).sqrt();
                (f, ax / f)
            }
            Kind::PowerMean { terms, p, .. } => {
                let r = x.norm();
                let u = x / r;
                let m = (p / 2) as i32;
                let mut s = 0.0;
                let mut ds = DVector::zeros(self.dim);
                for a in terms {
                    let au = a * &u;
                    let q = u.dot(&au);
                    s += q.powi(m);
                    ds.axpy(2.0 * f64::from(m) * q.powi(m - 1), &au, 1.0);
                }
                let fu = s.powf(1.0 / f64::from(*p));
                (r * fu, ds * (fu / (f64::from(*p) * s)))
            }
            Kind::Randers { m, w, .. } => {
                let mx = m * x;
                let alpha = x.dot(&mx).max(0.0).sqrt();
                (alpha + w.dot(x), mx / alpha + w)
            }
            Kind::Dual { primal, settings } => {
                let sol = solve_dual(primal, x, settings);
                (sol.value, sol.support_point)
            }
        }
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.first_order(x).1
    }

    /// Value, gradient and Hessian of `½F²`.
    pub fn second_order(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        match &self.kind {
            Kind::Ellipsoid { a, .. } => {
                let (f, g) = self.first_order(x);
                (f, g, a.clone())
            }
            Kind::PowerMean { terms, p, .. } => {
                let r = x.norm();
                let u = x / r;
                let mi = (p / 2) as i32;
                let m = f64::from(mi);
                let mut s = 0.0;
                let mut ds = DVector::zeros(self.dim);
                let mut dds = DMatrix::zeros(self.dim, self.dim);
                for a in terms {
                    let au = a * &u;
                    let q = u.dot(&au);
                    s += q.powi(mi);
                    ds.axpy(2.0 * m * q.powi(mi - 1), &au, 1.0);
                    dds += a * (2.0 * m * q.powi(mi - 1));
                    if mi > 1 {
                        dds.ger(4.0 * m * (m - 1.0) * q.powi(mi - 2), &au, &au, 1.0);
                    }
                }
                let pf = f64::from(*p);
                let fu = s.powf(1.0 / pf);
                let grad = &ds * (fu / (pf * s));
                // Hess(½F²) = (1/2m)[(1/m − 1)s^{1/m−2} ∇s∇sᵀ + s^{1/m−1} ∇²s], at |u| = 1.
                let inv_m = 1.0 / m;
                let mut h = dds * (s.powf(inv_m - 1.0) / (2.0 * m));
                h.ger(
                    (inv_m - 1.0) * s.powf(inv_m - 2.0) / (2.0 * m),
                    &ds,
                    &ds,
                    1.0,
                );
                (r * fu, grad, h)
            }
            Kind::Randers { m, w, .. } => {
                let mx = m * x;
                let alpha = x.dot(&mx).max(0.0).sqrt();
                let f = alpha + w.dot(x);
                let g = &mx / alpha + w;
                // Hess ½F² = ∇F∇Fᵀ + F·(M − MxxᵀM/α²)/α
                let mut h = m * (f / alpha);
                h.ger(-f / (alpha * alpha * alpha), &mx, &mx, 1.0);
                h.ger(1.0, &g, &g, 1.0);
                (f, g, h)
            }
            Kind::Dual { primal, settings } => {
                let sol = solve_dual(primal, x, settings);
                let (_, _, h) = primal.second_order(&sol.scaled);
                let h_inv = h
                    .clone()
                    .cholesky()
                    .map(|c| c.inverse())
                    .or_else(|| h.try_inverse())
                    .unwrap_or_else(|| DMatrix::from_element(self.dim, self.dim, f64::NAN));
                (sol.value, sol.support_point, h_inv)
            }
        }
    }

    /// Hessian of `½F²` at `x`.
    pub fn hessian_half_sq(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.second_order(x).2
    }

    /// Hessian of `F` itself, `(Hess ½F² − ∇F∇Fᵀ) / F`.
    pub fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let (f, g, mut h) = self.second_order(x);
        h.ger(-1.0, &g, &g, 1.0);
        h / f
    }

    /// Radial projection `x / F(x)` onto the unit level set.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        x / self.value(x)
    }

    /// The polar body on the dual space, `F*(ξ) = max{⟨ξ, x⟩ : F(x) ≤ 1}`.
    pub fn dual(&self) -> GaugeBody {
        self.dual_with(DualSettings::default())
    }

    pub fn dual_with(&self, settings: DualSettings) -> GaugeBody {
        let label = match self.label.strip_suffix('*') {
            Some(base) => base.to_string(),
            None => format!("{}*", self.label),
        };
        match &self.kind {
            Kind::Ellipsoid { a, a_inv, eig } => GaugeBody {
                dim: self.dim,
                kind: Kind::Ellipsoid {
                    a: a_inv.clone(),
                    a_inv: a.clone(),
                    eig: (1.0 / eig.1, 1.0 / eig.0),
                },
                symmetric: self.symmetric,
                label,
            },
            Kind::Dual { primal, .. } => primal.as_ref().clone(),
            Kind::PowerMean { .. } | Kind::Randers { .. } => GaugeBody {
                dim: self.dim,
                kind: Kind::Dual {
                    primal: Arc::new(self.clone()),
                    settings,
                },
                symmetric: self.symmetric,
                label,
            },
        }
    }

    /// The gauge `λ·F` (the unit body shrinks by `1/λ`).
    pub fn scaled(&self, lambda: f64) -> Result<GaugeBody> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("scale factor must be positive, got {lambda}")));
        }
        let l2 = lambda * lambda;
        let body = match &self.kind {
            Kind::Ellipsoid { a, .. } => GaugeBody::ellipsoid(a * l2)?,
            Kind::PowerMean { terms, p, .. } => {
                GaugeBody::power_mean(terms.iter().map(|a| a * l2).collect(), *p)?
            }
            Kind::Randers { m, w, .. } => GaugeBody::randers(m * l2, w * lambda)?,
            Kind::Dual { primal, settings } => primal.scaled(1.0 / lambda)?.dual_with(*settings),
        };
        Ok(body.with_label(format!("{}x{lambda}", self.label)))
    }

    /// Matrix used to seed dual solves against this body.
    fn seed_inverse(&self) -> Option<&DMatrix<f64>> {
        match &self.kind {
            Kind::Ellipsoid { a_inv, .. } => Some(a_inv),
            Kind::PowerMean { seed_inv, .. } => Some(seed_inv),
            Kind::Randers { m_inv, .. } => Some(m_inv),
            Kind::Dual { .. } => None,
        }
    }
}

fn half_sq_objective(body: &GaugeBody, xi: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let f = body.value(y);
    0.5 * f * f - xi.dot(y)
}

/// Solves `F*(ξ)` for `body`, returning the support point. Never fails; the
/// `converged` flag reports whether the stationarity tolerance was met.
pub fn solve_dual(body: &GaugeBody, xi: &DVector<f64>, settings: &DualSettings) -> DualSolution {
    let xi_norm = xi.norm();
    let dim = body.dim();
    if xi_norm == 0.0 {
        return DualSolution {
            value: 0.0,
            support_point: DVector::from_element(dim, f64::NAN),
            scaled: DVector::zeros(dim),
            iterations: 0,
            converged: false,
        };
    }
    // Seed along the ray of the quadratic model, at the optimal scale.
    let mut y = match body.seed_inverse() {
        Some(inv) => inv * xi,
        None => xi.clone(),
    };
    let fy = body.value(&y);
    y *= xi.dot(&y).max(1e-300) / (fy * fy);
    if xi.dot(&y) <= 0.0 {
        y = xi.clone() / body.value(xi).powi(2) * xi_norm * xi_norm;
    }

    let target = settings.tol * xi_norm;
    let mut iterations = 0;
    let mut converged = false;
    for it in 0..settings.max_newton {
        iterations = it + 1;
        let (f, g, h) = body.second_order(&y);
        let grad = &g * f - xi;
        let gnorm = grad.norm();
        if gnorm <= target {
            converged = true;
            break;
        }
        let step = match h.cholesky() {
            Some(c) => -c.solve(&grad),
            None => -grad.clone(),
        };
        let decrement = -grad.dot(&step);
        if decrement <= 0.0 {
            break;
        }
        if decrement <= 1e-12 * f * f {
            // Quadratic regime: objective differences are near rounding, so
            // judge the full step by the stationarity residual instead.
            let trial = &y + &step;
            let (ft, gt) = body.first_order(&trial);
            if (&gt * ft - xi).norm() < gnorm {
                y = trial;
                continue;
            }
            break;
        }
        let h0 = 0.5 * f * f - xi.dot(&y);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = &y + &step * alpha;
            if half_sq_objective(body, xi, &trial) <= h0 - 1e-4 * alpha * decrement {
                y = trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if !converged {
        // A final stationarity check catches the exits above that landed close enough.
        let (f, g) = body.first_order(&y);
        converged = (&g * f - xi).norm() <= 1e3 * target;
    }
    if !converged {
        return projected_ascent(body, xi, &y, settings, iterations);
    }
    let (f, _) = body.first_order(&y);
    let support_point = &y / f;
    DualSolution {
        value: xi.dot(&support_point),
        support_point,
        scaled: y,
        iterations,
        converged,
    }
}

/// Fallback: gradient ascent of `⟨ξ, u/F(u)⟩` with backtracking.
fn projected_ascent(
    body: &GaugeBody,
    xi: &DVector<f64>,
    start: &DVector<f64>,
    settings: &DualSettings,
    newton_iterations: usize,
) -> DualSolution {
    let objective = |u: &DVector<f64>| xi.dot(u) / body.value(u);
    let mut u = if start.iter().all(|v| v.is_finite()) && xi.dot(start) > 0.0 {
        start.clone()
    } else {
        xi.clone()
    };
    u = body.project(&u);
    let mut best = objective(&u);
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = newton_iterations;
    for _ in 0..settings.max_ascent {
        iterations += 1;
        let (f, g) = body.first_order(&u);
        let grad = (xi - &g * best) / f;
        if grad.norm() <= settings.tol * xi.norm() * 10.0 {
            converged = true;
            break;
        }
        let mut moved = false;
        for _ in 0..60 {
            let trial = body.project(&(&u + &grad * step));
            let val = objective(&trial);
            if val > best {
                u = trial;
                best = val;
                step *= 2.0;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            converged = grad.norm() <= 1e-9 * xi.norm();
            break;
        }
    }
    let value = best;
    DualSolution {
        value,
        scaled: &u * value,
        support_point: u,
        iterations,
        converged,
    }
}

/// Builds `F(x) = sqrt(xᵀAx)`.
pub fn make_ellipsoid(a: DMatrix<f64>) -> Result<GaugeBody> {
    GaugeBody::ellipsoid(a)
}

/// Builds the power mean `(Σ (xᵀAᵢx)^{p/2})^{1/p}` of ellipsoidal quadratics.
pub fn make_power_mean(terms: Vec<DMatrix<f64>>, p: u32) -> Result<GaugeBody> {
    GaugeBody::power_mean(terms, p)
}

/// Least eigenvalue of `Hess ½F²` restricted to the tangent hyperplane of
/// `{F = 1}`, minimized over `n_samples` seeded unit directions.
pub fn check_quadratic_convexity(body: &GaugeBody, n_samples: usize, seed: u64) -> f64 {
    let mut rng = task_rng(seed, 0);
    let mut least = f64::INFINITY;
    for _ in 0..n_samples.max(1) {
        let u = unit_vector(&mut rng, body.dim());
        let x = body.project(&u);
        let (_, g, h) = body.second_order(&x);
        let basis = complement_basis(&g);
        let k = basis.len();
        let b = DMatrix::from_columns(&basis);
        let restricted = b.transpose() * h * b;
        debug_assert_eq!(restricted.nrows(), k);
        let eig = SymmetricEigen::new(restricted).eigenvalues.min();
        least = least.min(eig);
    }
    least
}

/// Runs [`check_quadratic_convexity`] and packages the result.
pub fn certify(body: &GaugeBody, n_samples: usize, seed: u64) -> ConvexityCertificate {
    let min_eigenvalue = check_quadratic_convexity(body, n_samples, seed);
    ConvexityCertificate {
        label: body.label().to_string(),
        min_eigenvalue,
        samples: n_samples,
        seed,
        certified: min_eigenvalue > 0.0 && min_eigenvalue.is_finite(),
    }
}

/// The supporting covector `ξ = ∇F(q)` at a point of the unit level set.
pub fn legendre(body: &GaugeBody, q: &DVector<f64>) -> Result<DVector<f64>> {
    let (f, g) = body.first_order(q);
    if (f - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("point is off the unit sphere: F(q) = {f}")));
    }
    Ok(g)
}

/// `F*(ξ)` by Newton iteration with a projected-ascent fallback.
pub fn dual_gauge(body: &GaugeBody, xi: &DVector<f64>) -> Result<f64> {
    Ok(dual_solve_checked(body, xi)?.value)
}

fn dual_solve_checked(body: &GaugeBody, xi: &DVector<f64>) -> Result<DualSolution> {
    if xi.len() != body.dim() {
        return Err(Error::InvalidInput("covector dimension mismatch".into()));
    }
    if xi.norm() == 0.0 {
        return Err(Error::Precondition("dual gauge of the zero covector".into()));
    }
    let sol = solve_dual(body, xi, &DualSettings::default());
    if !sol.converged {
        return Err(Error::Numerical {
            what: "dual gauge solve",
            best: sol.value,
        });
    }
    Ok(sol)
}

/// The point `q ∈ {F = 1}` whose supporting covector is `ξ` (requires `F*(ξ) = 1`).
pub fn legendre_inverse(body: &GaugeBody, xi: &DVector<f64>) -> Result<DVector<f64>> {
    let sol = dual_solve_checked(body, xi)?;
    if (sol.value - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!(
            "covector is off the dual sphere: F*(ξ) = {}",
            sol.value
        )));
    }
    Ok(sol.support_point)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn diag(xs: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&v(xs))
    }

    #[test]
    fn ellipsoid_values() {
        let id = make_ellipsoid(DMatrix::identity(3, 3)).unwrap();
        assert_eq!(id.value(&v(&[1.0, 0.0, 0.0])), 1.0);
        let e = make_ellipsoid(diag(&[4.0, 1.0, 1.0])).unwrap();
        assert_eq!(e.value(&v(&[1.0, 0.0, 0.0])), 2.0);
        let a = diag(&[2.0, 3.0, 5.0]);
        let body = make_ellipsoid(a.clone()).unwrap();
        let x = v(&[0.3, -1.1, 0.4]);
        assert!((body.value(&x) - x.dot(&(&a * &x)).sqrt()).abs() < 1e-15);
        assert!(body.is_symmetric());
    }

    #[test]
    fn ellipsoid_rejects_bad_matrices() {
        let mut a = DMatrix::identity(3, 3);
        a[(0, 1)] = 0.5;
        assert!(matches!(make_ellipsoid(a), Err(Error::InvalidInput(_))));
        assert!(matches!(make_ellipsoid(diag(&[1.0, -1.0, 2.0])), Err(Error::InvalidInput(_))));
        assert!(matches!(make_ellipsoid(diag(&[1.0, 0.0, 2.0])), Err(Error::InvalidInput(_))));
        assert!(make_ellipsoid(DMatrix::identity(1, 1)).is_err());
    }

    #[test]
    fn power_mean_values() {
        let x = v(&[0.2, -0.7, 1.3]);
        for p in [2, 4, 6] {
            let single = make_power_mean(vec![DMatrix::identity(3, 3)], p).unwrap();
            assert!((single.value(&x) - x.norm()).abs() < 1e-14);
        }
        let twice = make_power_mean(vec![DMatrix::identity(3, 3); 2], 2).unwrap();
        assert!((twice.value(&x) - 2f64.sqrt() * x.norm()).abs() < 1e-14);
        let mixed =
            make_power_mean(vec![DMatrix::identity(3, 3), diag(&[4.0, 1.0, 1.0])], 4).unwrap();
        assert!((mixed.value(&v(&[1.0, 0.0, 0.0])) - 17f64.powf(0.25)).abs() < 1e-14);
        assert!((mixed.value(&v(&[1.0, 0.0, 0.0])) - 2.0305431848689307).abs() < 1e-12);
    }

    #[test]
    fn power_mean_rejects_bad_exponent() {
        let id = DMatrix::identity(3, 3);
        assert!(make_power_mean(vec![id.clone()], 3).is_err());
        assert!(make_power_mean(vec![id.clone()], 0).is_err());
        assert!(make_power_mean(vec![], 4).is_err());
        assert!(make_power_mean(vec![id, DMatrix::identity(2, 2)], 4).is_err());
    }

    #[test]
    fn round_sphere_convexity_is_one() {
        let id = make_ellipsoid(DMatrix::identity(3, 3)).unwrap();
        let least = check_quadratic_convexity(&id, 50, 3);
        assert!((least - 1.0).abs() < 1e-12);
        let e = make_ellipsoid(diag(&[1.0, 0.64, 0.36])).unwrap();
        assert!(check_quadratic_convexity(&e, 200, 1) > 0.0);
    }

    #[test]
    fn legendre_round_and_ellipsoid() {
        let id = make_ellipsoid(DMatrix::identity(3, 3)).unwrap();
        let xi = legendre(&id, &v(&[0.0, 0.0, 1.0])).unwrap();
        assert!((xi - v(&[0.0, 0.0, 1.0])).norm() < 1e-15);
        let a = diag(&[2.0, 3.0, 5.0]);
        let body = make_ellipsoid(a.clone()).unwrap();
        let q = body.project(&v(&[1.0, 1.0, -0.5]));
        let xi = legendre(&body, &q).unwrap();
        assert!((xi - &a * &q).norm() < 1e-14);
        assert!(matches!(legendre(&body, &v(&[1.0, 1.0, 1.0])), Err(Error::Precondition(_))));
    }

    #[test]
    fn dual_gauge_of_ellipsoid_matches_closed_form() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, -0.2, 0.0, -0.2, 0.5]);
        let body = make_ellipsoid(a.clone()).unwrap();
        let a_inv = a.try_inverse().unwrap();
        let xi = v(&[0.4, -1.0, 2.0]);
        let exact = xi.dot(&(&a_inv * &xi)).sqrt();
        assert!((dual_gauge(&body, &xi).unwrap() - exact).abs() < 1e-12 * exact);
        assert!((dual_gauge(&body, &(-&xi)).unwrap() - exact).abs() < 1e-12 * exact);
        assert!((body.dual().value(&xi) - exact).abs() < 1e-12 * exact);
        assert!(matches!(dual_gauge(&body, &DVector::zeros(3)), Err(Error::Precondition(_))));
    }

    #[test]
    fn legendre_inverse_examples() {
        let id = make_ellipsoid(DMatrix::identity(3, 3)).unwrap();
        let q = legendre_inverse(&id, &v(&[1.0, 0.0, 0.0])).unwrap();
        assert!((q - v(&[1.0, 0.0, 0.0])).norm() < 1e-14);
        let a = diag(&[2.0, 3.0, 5.0]);
        let body = make_ellipsoid(a.clone()).unwrap();
        let dual = body.dual();
        let xi = dual.project(&v(&[0.3, 0.2, -0.9]));
        let q = legendre_inverse(&body, &xi).unwrap();
        let expected = a.try_inverse().unwrap() * &xi;
        assert!((q - expected).norm() < 1e-12);
        assert!(legendre_inverse(&body, &(xi * 2.0)).is_err());
    }

    #[test]
    fn dual_of_dual_is_primal() {
        let pm = make_power_mean(vec![DMatrix::identity(3, 3), diag(&[4.0, 1.0, 1.0])], 4).unwrap();
        let dd = pm.dual().dual();
        let x = v(&[0.5, 0.1, -0.3]);
        assert_eq!(dd.value(&x), pm.value(&x));
        assert_eq!(dd.label(), pm.label());
        assert!(pm.dual().is_dual());
    }

    #[test]
    fn scaled_body_multiplies_gauge() {
        let pm = make_power_mean(vec![DMatrix::identity(3, 3), diag(&[4.0, 1.0, 2.0])], 4).unwrap();
        let x = v(&[0.5, 0.1, -0.3]);
        let s = pm.scaled(1.7).unwrap();
        assert!((s.value(&x) - 1.7 * pm.value(&x)).abs() < 1e-13);
        let ds = pm.dual().scaled(1.7).unwrap();
        assert!((ds.value(&x) - 1.7 * pm.dual().value(&x)).abs() < 1e-12);
        assert!(pm.scaled(-1.0).is_err());
    }

    #[test]
    fn randers_body() {
        let w = v(&[0.3, 0.0, -0.1]);
        let body = GaugeBody::randers(DMatrix::identity(3, 3), w.clone()).unwrap();
        assert!(!body.is_symmetric());
        let x = v(&[1.0, 0.0, 0.0]);
        assert!((body.value(&x) - 1.3).abs() < 1e-15);
        assert!((body.value(&(-&x)) - 0.7).abs() < 1e-15);
        assert!(check_quadratic_convexity(&body, 500, 2) > 0.0);
        assert!(GaugeBody::randers(DMatrix::identity(3, 3), v(&[1.0, 0.0, 0.0])).is_err());
        let sym = GaugeBody::randers(DMatrix::identity(3, 3), DVector::zeros(3)).unwrap();
        assert!(sym.is_symmetric());
    }

    #[test]
    fn euclidean_bounds_hold_on_samples() {
        let pm = make_power_mean(vec![diag(&[1.0, 2.0, 0.5]), diag(&[4.0, 1.0, 1.0])], 6).unwrap();
        let mut rng = task_rng(9, 0);
        let rd = GaugeBody::randers(diag(&[1.0, 2.0, 0.5]), v(&[0.2, -0.3, 0.1])).unwrap();
        for body in [pm.clone(), pm.dual(), rd.clone(), rd.dual()] {
            let (lo, hi) = body.euclidean_bounds();
            for _ in 0..200 {
                let u = unit_vector(&mut rng, 3);
                let f = body.value(&u);
                assert!(f >= lo * (1.0 - 1e-12) && f <= hi * (1.0 + 1e-12));
            }
        }
    }
}
