//! Experiment configuration (JSON, versioned schema).

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::GaugeBody;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Girth,
    DualCheck,
    Spectrum,
    Volume,
    Crofton,
    MapsVerify,
    Diameter,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Girth => "girth",
            Experiment::DualCheck => "dual-check",
            Experiment::Spectrum => "spectrum",
            Experiment::Volume => "volume",
            Experiment::Crofton => "crofton",
            Experiment::MapsVerify => "maps-verify",
            Experiment::Diameter => "diameter",
        }
    }
}

/// A gauge family with its parameters; matrices are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormSpec {
    Euclidean,
    Ellipsoid {
        #[serde(rename = "A")]
        a: Vec<f64>,
    },
    PowerMean {
        terms: Vec<Vec<f64>>,
        p: u32,
    },
    Randers {
        #[serde(rename = "M")]
        m: Vec<f64>,
        w: Vec<f64>,
    },
}

fn matrix(dim: usize, data: &[f64], what: &str) -> Result<DMatrix<f64>> {
    if data.len() != dim * dim {
        return Err(Error::Config(format!(
            "{what}: expected {} entries for a {dim}x{dim} matrix, got {}",
            dim * dim,
            data.len()
        )));
    }
    Ok(DMatrix::from_row_slice(dim, dim, data))
}

impl NormSpec {
    pub fn build(&self, dim: usize) -> Result<GaugeBody> {
        match self {
            NormSpec::Euclidean => GaugeBody::ellipsoid(DMatrix::identity(dim, dim)).map(|b| b.with_label("euclidean")),
            NormSpec::Ellipsoid { a } => GaugeBody::ellipsoid(matrix(dim, a, "ellipsoid.A")?),
            NormSpec::PowerMean { terms, p } => {
                let terms = terms
                    .iter()
                    .map(|t| matrix(dim, t, "power_mean.terms"))
                    .collect::<Result<Vec<_>>>()?;
                GaugeBody::power_mean(terms, *p)
            }
            NormSpec::Randers { m, w } => {
                if w.len() != dim {
                    return Err(Error::Config(format!("randers.w: expected {dim} entries, got {}", w.len())));
                }
                GaugeBody::randers(matrix(dim, m, "randers.M")?, DVector::from_column_slice(w))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub dim: usize,
    pub norm1: NormSpec,
    /// Defaults to `norm1` (the intrinsic metric of the unit sphere).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm2: Option<NormSpec>,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            norm1: NormSpec::Euclidean,
            norm2: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Half points at the coarsest girth level.
    pub n: usize,
    pub starts: usize,
    pub tol: f64,
    pub levels: usize,
    pub refine: usize,
    pub max_iter: usize,
    /// Monte Carlo samples for the line measure.
    pub samples: usize,
    pub chunk: usize,
    /// Extra seeds for the Crofton stability check (0 disables it).
    pub stability_seeds: usize,
    pub stability_samples: usize,
    /// Sample counts for the Crofton convergence table.
    pub sample_sweep: Vec<usize>,
    pub k_starts: usize,
    pub max_winding: usize,
    pub m_pairs: usize,
    pub n_polar: usize,
    pub n_fiber: usize,
    /// Random co-sphere samples for the map battery.
    pub map_samples: usize,
    /// Points on the closed loop used for action preservation.
    pub loop_points: usize,
    pub convexity_samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 32,
            starts: 6,
            tol: 1e-9,
            levels: 3,
            refine: 2,
            max_iter: 5000,
            samples: 1_000_000,
            chunk: 4096,
            stability_seeds: 0,
            stability_samples: 100_000,
            sample_sweep: Vec::new(),
            k_starts: 4,
            max_winding: 1,
            m_pairs: 32,
            n_polar: 16,
            n_fiber: 32,
            map_samples: 1000,
            loop_points: 20_000,
            convexity_samples: 500,
        }
    }
}

/// Pass/fail thresholds; defaults match the acceptance targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub girth_rel: f64,
    pub duality_gap: f64,
    pub spectrum_match: f64,
    pub volume_rel: f64,
    pub ht_rel: f64,
    pub crofton_rel: f64,
    pub stability_sigmas: f64,
    pub map_residual: f64,
    pub antipodal: f64,
    pub round_trip: f64,
    pub action: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            girth_rel: 1e-3,
            duality_gap: 5e-3,
            spectrum_match: 5e-4,
            volume_rel: 1e-2,
            ht_rel: 5e-3,
            crofton_rel: 1e-2,
            stability_sigmas: 3.0,
            map_residual: 1e-10,
            antipodal: 1e-9,
            round_trip: 1e-7,
            action: 1e-6,
        }
    }
}

/// Optional reference values checked against the results.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Expected {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub girth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_girth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ht_volume: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub format: Format,
    /// Directory for plot tables.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: Experiment,
    #[serde(default)]
    pub space: SpaceConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub expected: Expected,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment,
            space: SpaceConfig::default(),
            solver: SolverConfig::default(),
            tolerances: Tolerances::default(),
            expected: Expected::default(),
            seed: 0,
            output: OutputConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.space.dim < 2 {
            return Err(Error::Config("space.dim must be at least 2".into()));
        }
        let needs_three = matches!(
            self.experiment,
            Experiment::Girth | Experiment::DualCheck | Experiment::Volume | Experiment::Crofton
        );
        if needs_three && self.space.dim < 3 {
            return Err(Error::Config(format!("{} needs space.dim ≥ 3", self.experiment.name())));
        }
        if matches!(self.experiment, Experiment::Volume | Experiment::Crofton) && self.space.dim != 3 {
            return Err(Error::Config(format!("{} is implemented for space.dim = 3", self.experiment.name())));
        }
        Ok(())
    }

    /// `(norm1, norm2)` as gauge bodies.
    pub fn bodies(&self) -> Result<(GaugeBody, GaugeBody)> {
        let b1 = self.space.norm1.build(self.space.dim)?.with_label("norm1");
        let b2 = match &self.space.norm2 {
            Some(spec) => spec.build(self.space.dim)?.with_label("norm2"),
            None => b1.clone().with_label("norm2"),
        };
        Ok((b1, b2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config_with_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "experiment": "dual-check",
                "space": {"dim": 3, "norm1": {"type": "ellipsoid", "A": [1,0,0, 0,2,0, 0,0,3]}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::DualCheck);
        assert_eq!(cfg.solver, SolverConfig::default());
        let (b1, b2) = cfg.bodies().unwrap();
        assert_eq!(b1.dim(), 3);
        assert!(b2.is_symmetric());
    }

    #[test]
    fn rejects_schema_violations() {
        let bad = [
            r#"{"schema_version": 2, "experiment": "girth"}"#,
            r#"{"schema_version": 1, "experiment": "girth", "bogus": 1}"#,
            r#"{"schema_version": 1, "experiment": "orbit"}"#,
            r#"{"schema_version": 1, "experiment": "volume", "space": {"dim": 4, "norm1": {"type": "euclidean"}}}"#,
        ];
        for text in bad {
            assert!(matches!(ExperimentConfig::from_json(text), Err(Error::Config(_))), "{text}");
        }
        let cfg = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "experiment": "girth",
                "space": {"dim": 3, "norm1": {"type": "ellipsoid", "A": [1, 0, 0, 1]}}}"#,
        )
        .unwrap();
        assert!(matches!(cfg.bodies(), Err(Error::Config(_))));
    }

    #[test]
    fn round_trips_through_json() {
        let mut cfg = ExperimentConfig::new(Experiment::Crofton);
        cfg.space.norm2 = Some(NormSpec::PowerMean {
            terms: vec![vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]],
            p: 4,
        });
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }
}
