use std::f64::consts::PI;

use nalgebra::DVector;
use serde_json::json;

use super::config::{Experiment, ExperimentConfig};
use super::{Check, ExperimentReport, Table};
use crate::error::Result;
use crate::geodesics::{
    diameter_probe, dual_girth, girth, length_spectrum_probe, DiameterOptions, GirthOptions, GirthResult,
    SpectrumOptions,
};
use crate::induced::{restrict_with, CoSpherePoint, EmbeddedSphere};
use crate::maps::{boundary_map, interior_map, symmetric_boundary_map};
use crate::measures::{action, crofton_line_measure, ht_volume, CroftonOptions, VolumeOptions};
use crate::seed::{gaussian_vector, task_rng};

pub(super) fn dispatch(cfg: &ExperimentConfig, sphere: &EmbeddedSphere, report: &mut ExperimentReport) -> Result<()> {
    match cfg.experiment {
        Experiment::Girth => run_girth(cfg, sphere, report),
        Experiment::DualCheck => run_dual_check(cfg, sphere, report),
        Experiment::Spectrum => run_spectrum(cfg, sphere, report),
        Experiment::Volume => run_volume(cfg, sphere, report),
        Experiment::Crofton => run_crofton(cfg, sphere, report),
        Experiment::MapsVerify => run_maps(cfg, sphere, report),
        Experiment::Diameter => run_diameter(cfg, sphere, report),
    }
}

fn girth_options(cfg: &ExperimentConfig) -> GirthOptions {
    let s = &cfg.solver;
    GirthOptions {
        n: s.n,
        starts: s.starts,
        seed: cfg.seed,
        tol: s.tol,
        levels: s.levels,
        refine: s.refine,
        max_iter: s.max_iter,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn girth_json(r: &GirthResult) -> serde_json::Value {
    json!({
        "girth": r.girth,
        "polygon_length": r.polygon_length,
        "half_points": r.curve.n(),
        "certificate": r.certificate,
    })
}

fn continuation_table(name: &str, r: &GirthResult) -> Table {
    let mut t = Table::new(name, &["N", "length", "richardson_estimate"]);
    for step in &r.certificate.continuation {
        t.rows
            .push(vec![step.half_points as f64, step.length, step.richardson.unwrap_or(f64::NAN)]);
    }
    t
}

fn run_girth(cfg: &ExperimentConfig, sphere: &EmbeddedSphere, report: &mut ExperimentReport) -> Result<()> {
    let r = girth(sphere, &girth_options(cfg))?;
    report.checks.push(Check::holds("girth certified", r.certificate.certified));
    if let Some(expected) = cfg.expected.girth {
        report
            .checks
            .push(Check::at_most("girth relative error", rel(r.girth, expected), cfg.tolerances.girth_rel));
    }
    report.tables.push(continuation_table("continuation", &r));
    report.results = json!({ "girth": girth_json(&r) });
    Ok(())
}

fn run_dual_check(cfg: &ExperimentConfig, sphere: &EmbeddedSphere, report: &mut ExperimentReport) -> Result<()> {
    let opts = girth_options(cfg);
    let primal = girth(sphere, &opts)?;
    let dual = dual_girth(sphere, &opts)?;
    let gap = rel(dual.girth, primal.girth);
    let tol = &cfg.tolerances;
    report.checks.push(Check::holds("girth certified", primal.certificate.certified));
    report.checks.push(Check::holds("dual girth certified", dual.certificate.certified));
    report.checks.push(Check::at_most("girth duality gap", gap, tol.duality_gap));
    if let Some(expected) = cfg.expected.girth {
        report
            .checks
            .push(Check::at_most("girth relative error", rel(primal.girth, expected), tol.girth_rel));
    }
    if let Some(expected) = cfg.expected.dual_girth.or(cfg.expected.girth) {
        report
            .checks
            .push(Check::at_most("dual girth relative error", rel(dual.girth, expected), tol.girth_rel));
    }
    report.tables.push(continuation_table("girth_continuation", &primal));
    report.tables.push(continuation_table("dual_girth_continuation", &dual));
    report.results = json!({
        "girth": girth_json(&primal),
        "dual_girth": girth_json(&dual),
        "relative_gap": gap,
    });
    Ok(())
}

/// Largest relative distance from each value to its nearest partner.
fn worst_match(values: &[f64], partners: &[f64]) -> f64 {
    values
        .iter()
        .map(|v| partners.iter().map(|p| rel(*p, *v)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn run_spectrum(cfg: &ExperimentConfig, sphere: &EmbeddedSphere, report: &mut ExperimentReport) -> Result<()> {
    let s = &cfg.solver;
    let opts = SpectrumOptions {
        k_starts: s.k_starts,
        seed: cfg.seed,
        n: s.n,
        max_winding: s.max_winding,
        tol: s.tol.max(1e-8),
        max_iter: s.max_iter,
        ..Default::default()
    };
    let primal = length_spectrum_probe(sphere, &opts)?;
    let dual = length_spectrum_probe(&sphere.swapped(), &opts)?;
    report
        .checks
        .push(Check::holds("both probes found lengths", !primal.lengths.is_empty() && !dual.lengths.is_empty()));
    let mismatch = worst_match(&primal.lengths, &dual.lengths).max(worst_match(&dual.lengths, &primal.lengths));
    report
        .checks
        .push(Check::at_most("spectrum cross-side mismatch", mismatch, cfg.tolerances.spectrum_match));
    let mut t = Table::new("matched", &["primal", "dual"]);
    for v in &primal.lengths {
        let partner = dual
            .lengths
            .iter()
            .copied()
            .min_by(|a, b| (a - v).abs().total_cmp(&(b - v).abs()))
            .unwrap_or(f64::NAN);
        t.rows.push(vec![*v, partner]);
    }
    report.tables.push(t);
    report.results = json!({ "primal": primal, "dual": dual, "worst_mismatch": mismatch });
    Ok(())
}

fn volume_options(cfg: &ExperimentConfig) -> VolumeOptions {
    VolumeOptions {
        n_polar: cfg.solver.n_polar,
        n_fiber: cfg.solver.n_fiber,
        ..Default::default()
    }
}

fn run_volume(cfg: &ExperimentConfig, sphere: &EmbeddedSphere, report: &mut ExperimentReport) -> Result<()> {
    let opts = volume_options(cfg);
    let primal = ht_volume(sphere, &opts)?;
    let dual = ht_volume(&sphere.swapped(), &opts)?;
    let gap = rel(dual.value, primal.value);
    let tol = &cfg.tolerances;
    report.checks.push(Check::holds("quadrature converged", primal.converged && dual.converged));
    report.checks.push(Check::at_most("volume relative gap", gap, tol.volume_rel));
    if let Some(expected) = cfg.expected.ht_volume {
        report
            .checks
            .push(Check::at_most("volume relative error", rel(primal.value, expected), tol.ht_rel));
    }
    report.results = json!({
        "primal": primal,
        "dual": dual,
        "relative_gap": gap,
        "combined_error": primal.error_estimate + dual.error_estimate,
    });
    Ok(())
}

fn run_crofton(cfg: &ExperimentConfig, sphere: &EmbeddedSphere, report: &mut ExperimentReport) -> Result<()> {
    let s = &cfg.solver;
    let tol = &cfg.tolerances;
    let volume = ht_volume(sphere, &volume_options(cfg))?;
    let opts = CroftonOptions {
        n_samples: s.samples,
        seed: cfg.seed,
        chunk: s.chunk,
        ..Default::default()
    };
    let measure = crofton_line_measure(sphere, &opts)?;
    let ratio = measure.value / (volume.value * PI);
    report.checks.push(Check::at_most("crofton ratio deviation", (ratio - 1.0).abs(), tol.crofton_rel));
    if let Some(expected) = cfg.expected.ht_volume {
        report
            .checks
            .push(Check::at_most("volume relative error", rel(volume.value, expected), tol.ht_rel));
    }
    let mut sweep = Table::new("sweep", &["samples", "estimate", "stderr"]);
    for &n in &s.sample_sweep {
        let r = crofton_line_measure(sphere, &CroftonOptions { n_samples: n, ..opts })?;
        sweep.rows.push(vec![n as f64, r.value, r.error_estimate]);
    }
    sweep.rows.push(vec![measure.samples as f64, measure.value, measure.error_estimate]);
    report.tables.push(sweep);

    let mut stability = Vec::new();
    if s.stability_seeds > 0 {
        for k in 0..s.stability_seeds {
            let seed = cfg.seed.wrapping_add(1 + k as u64);
            let r = crofton_line_measure(
                sphere,
                &CroftonOptions {
                    n_samples: s.stability_samples,
                    seed,
                    ..opts
                },
            )?;
            stability.push(r);
        }
        let mean = stability.iter().map(|r| r.value).sum::<f64>() / stability.len() as f64;
        let worst = stability
            .iter()
            .map(|r| (r.value - mean).abs() / r.error_estimate)
            .fold(0.0, f64::max);
        report
            .checks
            .push(Check::at_most("seed spread in standard errors", worst, tol.stability_sigmas));
    }
    report.results = json!({
        "ht_volume": volume,
        "line_measure": measure,
        "ratio": ratio,
        "stability": stability,
    });
    Ok(())
}

/// A random co-sphere point scaled to `G = level`.
fn random_cosphere(sphere: &EmbeddedSphere, seed: u64, task: u64, level: f64) -> Result<CoSpherePoint> {
    let mut rng = task_rng(seed, task);
    let dim = sphere.dim();
    let q = sphere.body1().project(&gaussian_vector(&mut rng, dim));
    let n = sphere.body1().gradient(&q);
    loop {
        let p = restrict_with(&gaussian_vector(&mut rng, dim), &q, &n);
        if p.norm() > 1e-6 {
            let g = sphere.induced_hamiltonian(&q, &p)?;
            return Ok(CoSpherePoint {
                q: q.clone(),
                p: p * (level / g),
                level,
            });
        }
    }
}

fn pair_distance(a: &CoSpherePoint, b: &CoSpherePoint) -> f64 {
    (&a.q - &b.q).norm().max((&a.p - &b.p).norm())
}

/// Legendre lift of the section of `Σ₁` by the first coordinate plane.
fn closed_loop(sphere: &EmbeddedSphere, count: usize) -> Result<Vec<CoSpherePoint>> {
    let dim = sphere.dim();
    let body1 = sphere.body1();
    (0..count)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / count as f64;
            let mut c = DVector::zeros(dim);
            c[0] = t.cos();
            c[1] = t.sin();
            let mut dc = DVector::zeros(dim);
            dc[0] = -t.sin();
            dc[1] = t.cos();
            sphere.lift(&body1.project(&c), &dc)
        })
        .collect()
}

fn run_maps(cfg: &ExperimentConfig, sphere: &EmbeddedSphere, report: &mut ExperimentReport) -> Result<()> {
    let s = &cfg.solver;
    let tol = &cfg.tolerances;
    let swapped = sphere.swapped();
    let symmetric = sphere.is_symmetric();
    let (mut phi_level, mut phi_restrict) = (0.0_f64, 0.0_f64);
    let (mut psi_level, mut psi_restrict, mut antipodal) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut round_trip = 0.0_f64;
    for k in 0..s.map_samples {
        let x = random_cosphere(sphere, cfg.seed, k as u64, 1.0)?;
        let img = boundary_map(sphere, &x.q, &x.p)?;
        phi_level = phi_level.max((sphere.dual2().value(&img.q) - 1.0).abs());
        let n = sphere.body1().gradient(&x.q);
        phi_restrict = phi_restrict.max((restrict_with(&img.q, &x.q, &n) - &x.p).norm());
        if symmetric {
            let img = symmetric_boundary_map(sphere, &x.q, &x.p)?;
            psi_level = psi_level.max((sphere.dual2().value(&img.q) - 1.0).abs());
            psi_restrict = psi_restrict.max((restrict_with(&img.q, &x.q, &n) + &x.p).norm());
            let anti = symmetric_boundary_map(sphere, &(-&x.q), &(-&x.p))?;
            antipodal = antipodal.max((&anti.q + &img.q).norm().max((&anti.p + &img.p).norm()));
        }
        let level = 0.1 + 0.8 * ((k as f64 + 0.5) / s.map_samples as f64);
        let y = random_cosphere(sphere, cfg.seed ^ 0x5eed, k as u64, level)?;
        let img = interior_map(sphere, &y.q, &y.p)?;
        let back = interior_map(&swapped, &img.q, &img.p)?;
        round_trip = round_trip.max(pair_distance(&back, &y));
    }
    report.checks.push(Check::at_most("phi dual-sphere residual", phi_level, tol.map_residual));
    report.checks.push(Check::at_most("phi restriction residual", phi_restrict, tol.map_residual));
    report.checks.push(Check::at_most("Phi round trip", round_trip, tol.round_trip));

    let curve = closed_loop(sphere, s.loop_points)?;
    let a = action(&curve, true);
    let phi_img = curve
        .iter()
        .map(|x| boundary_map(sphere, &x.q, &x.p))
        .collect::<Result<Vec<_>>>()?;
    let a_phi = action(&phi_img, true);
    let scale = a.abs().max(1.0);
    report
        .checks
        .push(Check::at_most("phi action preservation", (a_phi + a).abs() / scale, tol.action));
    let mut results = json!({
        "samples": s.map_samples,
        "phi": { "dual_sphere_residual": phi_level, "restriction_residual": phi_restrict },
        "Phi_round_trip": round_trip,
        "loop": { "points": s.loop_points, "action": a, "phi_action": a_phi },
    });
    if symmetric {
        let psi_img = curve
            .iter()
            .map(|x| symmetric_boundary_map(sphere, &x.q, &x.p))
            .collect::<Result<Vec<_>>>()?;
        let a_psi = action(&psi_img, true);
        report.checks.push(Check::at_most("psi dual-sphere residual", psi_level, tol.map_residual));
        report.checks.push(Check::at_most("psi restriction residual", psi_restrict, tol.map_residual));
        report.checks.push(Check::at_most("psi antipodal equivariance", antipodal, tol.antipodal));
        report
            .checks
            .push(Check::at_most("psi action preservation", (a_psi - a).abs() / scale, tol.action));
        results["psi"] = json!({
            "dual_sphere_residual": psi_level,
            "restriction_residual": psi_restrict,
            "antipodal": antipodal,
        });
        results["loop"]["psi_action"] = json!(a_psi);
    }
    report.results = results;
    Ok(())
}

fn run_diameter(cfg: &ExperimentConfig, sphere: &EmbeddedSphere, report: &mut ExperimentReport) -> Result<()> {
    let opts = DiameterOptions {
        m_pairs: cfg.solver.m_pairs,
        seed: cfg.seed,
        n: cfg.solver.n,
        tol: cfg.solver.tol.max(1e-8),
        max_iter: cfg.solver.max_iter,
    };
    let primal = diameter_probe(sphere, &opts)?;
    let dual = diameter_probe(&sphere.swapped(), &opts)?;
    let finite = |d: f64| d.is_finite() && d > 0.0;
    report
        .checks
        .push(Check::holds("diameters positive and finite", finite(primal.diameter) && finite(dual.diameter)));
    let mut t = Table::new("distances", &["pair", "primal", "dual"]);
    for (k, (a, b)) in primal.distances.iter().zip(&dual.distances).enumerate() {
        t.rows.push(vec![k as f64, *a, *b]);
    }
    report.tables.push(t);
    report.results = json!({ "primal": primal, "dual": dual });
    Ok(())
}
