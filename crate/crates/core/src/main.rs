use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use finsler_duality::harness::{self, Experiment, ExperimentConfig, Format};

#[derive(Parser)]
#[command(name = "finsler-duality", version, about = "Girth, volume and duality experiments for Minkowski unit spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shortest centrally symmetric closed geodesic of Σ₁.
    Girth(RunArgs),
    /// Girth of Σ₁ and of the swapped pair, and their relative gap.
    DualCheck(RunArgs),
    /// Closed-geodesic lengths found on both sides of the duality.
    Spectrum(RunArgs),
    /// Holmes–Thompson area of Σ₁ and of the swapped pair.
    Volume(RunArgs),
    /// Monte Carlo measure of lines meeting norm1's body against its area.
    Crofton(RunArgs),
    /// Property battery for the duality maps.
    MapsVerify(RunArgs),
    /// Sampled diameter of both spheres.
    Diameter(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment config (JSON); defaults to the round sphere in ℝ³.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    /// Report destination; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    /// Worker threads (defaults to all cores).
    #[arg(long, value_name = "INT")]
    jobs: Option<usize>,
    /// Directory for plot tables.
    #[arg(long, value_name = "PATH")]
    plot_dir: Option<PathBuf>,
    /// Include wall time in the report (makes it non-reproducible).
    #[arg(long)]
    timing: bool,
}

fn execute(experiment: Experiment, args: RunArgs) -> Result<bool, finsler_duality::Error> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(experiment),
    };
    cfg.experiment = experiment;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.display().to_string());
    }
    if let Some(f) = args.format {
        cfg.output.format = match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        };
    }
    if let Some(dir) = &args.plot_dir {
        cfg.output.plot_dir = Some(dir.display().to_string());
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| finsler_duality::Error::Config(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let mut report = pool.install(|| harness::run(&cfg))?;
    if args.timing {
        report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }

    let text = report.render(cfg.output.format)?;
    match &cfg.output.path {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let Some(dir) = &cfg.output.plot_dir {
        harness::emit_plot_data(&report, dir.as_ref())?;
    }
    for e in &report.errors {
        eprintln!("error: {e}");
    }
    for c in &report.checks {
        let mark = if c.passed { "pass" } else { "FAIL" };
        eprintln!("{mark}  {}: {:e} (tolerance {:e})", c.name, c.value, c.tolerance);
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::Girth(a) => (Experiment::Girth, a),
        Command::DualCheck(a) => (Experiment::DualCheck, a),
        Command::Spectrum(a) => (Experiment::Spectrum, a),
        Command::Volume(a) => (Experiment::Volume, a),
        Command::Crofton(a) => (Experiment::Crofton, a),
        Command::MapsVerify(a) => (Experiment::MapsVerify, a),
        Command::Diameter(a) => (Experiment::Diameter, a),
    };
    match execute(experiment, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
