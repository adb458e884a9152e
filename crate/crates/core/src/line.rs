//! One-dimensional convex searches along affine lines `t ↦ F(base + t·dir)`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::gauge::GaugeBody;

#[derive(Debug, Clone)]
pub struct LineMinimum {
    pub t: f64,
    pub value: f64,
    /// `F(base + t·dir)` second derivative in `t` at the minimizer (0 at a kink).
    pub curvature: f64,
}

struct LineEval {
    value: f64,
    slope: f64,
    curvature: f64,
}

fn eval(body: &GaugeBody, base: &DVector<f64>, dir: &DVector<f64>, t: f64) -> LineEval {
    let x = base + dir * t;
    let (f, g, h) = body.second_order(&x);
    let slope = g.dot(dir);
    // dᵀ Hess F d = (dᵀ H½ d − (∇F·d)²) / F
    let curvature = ((dir.dot(&(h * dir)) - slope * slope) / f).max(0.0);
    LineEval {
        value: f,
        slope,
        curvature,
    }
}

fn slope_only(body: &GaugeBody, base: &DVector<f64>, dir: &DVector<f64>, t: f64) -> (f64, f64) {
    let x = base + dir * t;
    let (f, g) = body.first_order(&x);
    (f, g.dot(dir))
}

/// Minimizes the convex function `t ↦ F(base + t·dir)` by bracketed Newton.
///
/// `tol` is an absolute tolerance on `t` relative to the scale `1 + |t|`.
pub fn minimize_along(
    body: &GaugeBody,
    base: &DVector<f64>,
    dir: &DVector<f64>,
    t0: f64,
    tol: f64,
) -> Result<LineMinimum> {
    let dnorm = dir.norm();
    if dnorm == 0.0 {
        return Err(Error::Precondition("line direction is zero".into()));
    }
    // Base on the line itself: the minimum is the kink at the origin.
    let along = base.dot(dir) / (dnorm * dnorm);
    if (base - dir * along).norm() <= 1e-14 * base.norm().max(1e-300) || base.norm() == 0.0 {
        return Ok(LineMinimum {
            t: -along,
            value: 0.0,
            curvature: 0.0,
        });
    }

    let mut t = t0;
    let mut e = eval(body, base, dir, t);
    if e.slope == 0.0 {
        return Ok(LineMinimum {
            t,
            value: e.value,
            curvature: e.curvature,
        });
    }
    // Bracket the sign change of the slope.
    let scale = (base.norm() / dnorm).max(1e-3);
    let mut step = if e.curvature > 0.0 {
        (e.slope / e.curvature).abs().max(1e-6 * scale)
    } else {
        scale
    };
    let dirn = if e.slope > 0.0 { -1.0 } else { 1.0 };
    let (mut lo, mut hi);
    let mut far = t;
    let mut found = false;
    for _ in 0..200 {
        far = t + dirn * step;
        let (_, s) = slope_only(body, base, dir, far);
        if s * dirn >= 0.0 {
            found = true;
            break;
        }
        step *= 2.0;
    }
    if !found {
        return Err(Error::Numerical {
            what: "line minimization bracketing",
            best: e.value,
        });
    }
    if dirn > 0.0 {
        lo = t;
        hi = far;
    } else {
        lo = far;
        hi = t;
    }

    for _ in 0..200 {
        let newton = if e.curvature > 0.0 {
            t - e.slope / e.curvature
        } else {
            f64::NAN
        };
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let done = (next - t).abs() <= tol * (1.0 + next.abs()) || (hi - lo) <= tol * (1.0 + t.abs());
        t = next;
        e = eval(body, base, dir, t);
        if e.slope > 0.0 {
            hi = t;
        } else if e.slope < 0.0 {
            lo = t;
        } else {
            break;
        }
        if done {
            break;
        }
    }
    Ok(LineMinimum {
        t,
        value: e.value,
        curvature: e.curvature,
    })
}

/// Finds `t` on the side `sign` (±1) of `t_min` where `F(base + t·dir) = level`.
/// Requires `F(base + t_min·dir) ≤ level`.
pub fn level_crossing(
    body: &GaugeBody,
    base: &DVector<f64>,
    dir: &DVector<f64>,
    t_min: f64,
    sign: f64,
    level: f64,
) -> Result<f64> {
    let g0 = body.value(&(base + dir * t_min));
    if g0 > level {
        return Err(Error::Precondition("line minimum lies above the level".into()));
    }
    if g0 == level {
        return Ok(t_min);
    }
    let dnorm = dir.norm();
    let mut step = (level / (body.euclidean_bounds().1 * dnorm)).max(1e-12);
    let mut near = t_min;
    let mut far = t_min + sign * step;
    let mut found = false;
    for _ in 0..200 {
        if body.value(&(base + dir * far)) >= level {
            found = true;
            break;
        }
        near = far;
        step *= 2.0;
        far = t_min + sign * step;
    }
    if !found {
        return Err(Error::Numerical {
            what: "level crossing bracketing",
            best: far,
        });
    }
    // Newton from the far side descends monotonically onto the root of a convex function.
    let mut t = far;
    for _ in 0..200 {
        let (f, s) = slope_only(body, base, dir, t);
        let r = f - level;
        if r == 0.0 {
            return Ok(t);
        }
        if r > 0.0 {
            far = t;
        } else {
            near = t;
        }
        let newton = if s != 0.0 { t - r / s } else { f64::NAN };
        let inside = if sign > 0.0 {
            newton > near && newton < far
        } else {
            newton < near && newton > far
        };
        let next = if newton.is_finite() && inside {
            newton
        } else {
            0.5 * (near + far)
        };
        if (next - t).abs() <= 1e-15 * (1.0 + t.abs()) || (far - near).abs() <= 1e-15 * (1.0 + t.abs()) {
            return Ok(next);
        }
        t = next;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn euclidean_line_minimum_is_orthogonal_foot() {
        let id = GaugeBody::ellipsoid(DMatrix::identity(3, 3)).unwrap();
        let base = DVector::from_vec(vec![1.0, 2.0, 0.0]);
        let dir = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let m = minimize_along(&id, &base, &dir, 0.0, 1e-13).unwrap();
        assert!((m.t + 2.0).abs() < 1e-12);
        assert!((m.value - 1.0).abs() < 1e-14);
        let up = level_crossing(&id, &base, &dir, m.t, 1.0, 2.0).unwrap();
        assert!((up - (-2.0 + 3f64.sqrt())).abs() < 1e-14);
        let down = level_crossing(&id, &base, &dir, m.t, -1.0, 2.0).unwrap();
        assert!((down - (-2.0 - 3f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn line_through_origin_hits_the_kink() {
        let id = GaugeBody::ellipsoid(DMatrix::identity(3, 3)).unwrap();
        let dir = DVector::from_vec(vec![0.0, 0.0, 2.0]);
        let m = minimize_along(&id, &DVector::zeros(3), &dir, 0.3, 1e-12).unwrap();
        assert_eq!(m.value, 0.0);
        let base = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        let m = minimize_along(&id, &base, &dir, 0.0, 1e-12).unwrap();
        assert!((m.t + 0.5).abs() < 1e-14 && m.value == 0.0);
    }
}
