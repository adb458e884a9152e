//! Runs an experiment config through the harness, like the CLI does.
//!
//! `cargo run --release --example experiment -- crates/core/examples/configs/ellipsoid_dual_check.json`

use finsler_duality::harness::{emit_plot_data, run, ExperimentConfig};

fn main() -> finsler_duality::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/ellipsoid_dual_check.json").into());
    let cfg = ExperimentConfig::load(path.as_ref())?;
    let report = run(&cfg)?;
    for c in &report.checks {
        println!("{:5} {} = {:.3e} (≤ {:.1e})", if c.passed { "ok" } else { "FAIL" }, c.name, c.value, c.tolerance);
    }
    println!("results: {}", report.results);
    let dir = std::env::temp_dir().join("finsler-duality-plots");
    for p in emit_plot_data(&report, &dir)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
