//! JSON experiment configuration shared by the `coarray` binary and the
//! examples.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "task": "identify",
//!   "geometry": {"gna": {"n_tx": 3, "n_rx": 2, "delta": 1}},
//!   "waveform": {"catalog": "ex3a"},
//!   "grid": {"sin_uniform": 8}
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{gna, ArrayPair};
use crate::linalg::RankPolicy;
use crate::manifold::AngularGrid;
use crate::recovery::RecoveryConfig;
use crate::reproduce::Scenario;
use crate::waveform::{example_waveform, gna_matched, ExampleWaveform, WaveformMatrix};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GnaParams {
    pub n_tx: usize,
    pub n_rx: usize,
    pub delta: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeometrySpec {
    Gna { gna: GnaParams },
    Explicit(ArrayPair),
}

impl GeometrySpec {
    pub fn resolve(&self) -> Result<ArrayPair> {
        match self {
            Self::Gna { gna: p } => gna(p.n_tx, p.n_rx, p.delta),
            Self::Explicit(arrays) => Ok(arrays.clone()),
        }
    }

    pub fn gna_params(&self) -> Option<GnaParams> {
        match self {
            Self::Gna { gna } => Some(*gna),
            Self::Explicit(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WaveformSpec {
    /// Matched construction; needs a GNA geometry. `t` defaults to `n_s`.
    Matched {
        n_s: usize,
        t: Option<usize>,
    },
    Catalog(ExampleWaveform),
    Matrix(WaveformMatrix),
    /// Unit-modulus orthogonal waveforms; `t` defaults to `N_tx`.
    Orthogonal {
        t: Option<usize>,
    },
}

impl WaveformSpec {
    pub fn resolve(&self, geometry: &GeometrySpec) -> Result<WaveformMatrix> {
        let n_tx = geometry.resolve()?.n_tx();
        match self {
            Self::Matched { n_s, t } => {
                let p = geometry.gna_params().ok_or_else(|| {
                    Error::InvalidArgument("matched waveform requires a gna geometry".into())
                })?;
                gna_matched(p.n_tx, p.n_rx, p.delta, *n_s, t.unwrap_or(*n_s))
            }
            Self::Catalog(which) => Ok(example_waveform(*which)),
            Self::Matrix(s) => Ok(s.clone()),
            Self::Orthogonal { t } => WaveformMatrix::orthogonal(t.unwrap_or(n_tx), n_tx),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    SinUniform { sin_uniform: usize },
    ThetaUniform { theta_uniform: usize },
    Angles(AngularGrid),
}

impl GridSpec {
    pub fn resolve(&self) -> Result<AngularGrid> {
        match self {
            Self::SinUniform { sin_uniform } => AngularGrid::sin_uniform(*sin_uniform),
            Self::ThetaUniform { theta_uniform } => AngularGrid::theta_uniform(*theta_uniform),
            Self::Angles(grid) => Ok(grid.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Krank,
    Identify,
    Recover,
    Beampattern,
    Reproduce,
    Geometry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waveform: Option<WaveformSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub krank_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovery: Option<RecoveryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
}

impl ExperimentConfig {
    pub fn new(task: Task) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            task,
            geometry: None,
            waveform: None,
            grid: None,
            rank_tol: None,
            krank_budget: None,
            output: None,
            recovery: None,
            scenario: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Checks the schema version and that the task's inputs are present
    /// and resolvable.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported config schema {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        self.policy()?;
        let missing = |what: &str| {
            Error::InvalidArgument(format!("task {:?} needs a \"{what}\" section", self.task))
        };
        match self.task {
            Task::Krank | Task::Identify | Task::Beampattern => {
                let geometry = self.geometry.as_ref().ok_or_else(|| missing("geometry"))?;
                let waveform = self.waveform.as_ref().ok_or_else(|| missing("waveform"))?;
                let arrays = geometry.resolve()?;
                let s = waveform.resolve(geometry)?;
                if s.n_tx() != arrays.n_tx() {
                    return Err(Error::DimensionMismatch {
                        context: "config waveform columns vs Tx sensors",
                        expected: arrays.n_tx(),
                        found: s.n_tx(),
                    });
                }
                if self.task != Task::Beampattern {
                    self.grid
                        .as_ref()
                        .ok_or_else(|| missing("grid"))?
                        .resolve()?;
                }
            }
            Task::Geometry => {
                self.geometry
                    .as_ref()
                    .ok_or_else(|| missing("geometry"))?
                    .resolve()?;
            }
            Task::Recover => {
                self.recovery.as_ref().ok_or_else(|| missing("recovery"))?;
            }
            Task::Reproduce => {
                self.scenario.ok_or_else(|| missing("scenario"))?;
            }
        }
        if let Some(grid) = &self.grid {
            grid.resolve()?;
        }
        Ok(())
    }

    pub fn policy(&self) -> Result<RankPolicy> {
        let default = RankPolicy::default();
        RankPolicy::new(
            self.rank_tol.unwrap_or(default.relative_tolerance),
            self.krank_budget.unwrap_or(default.max_subset_budget),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_gna_catalog_config() {
        let text = r#"{
            "schema": 1,
            "task": "identify",
            "geometry": {"gna": {"n_tx": 3, "n_rx": 2, "delta": 1}},
            "waveform": {"catalog": "ex3b"},
            "grid": {"sin_uniform": 8},
            "rank_tol": 1e-10
        }"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(c.task, Task::Identify);
        let geometry = c.geometry.as_ref().unwrap();
        assert_eq!(geometry.resolve().unwrap().tx(), &[0, 1, 2]);
        let s = c.waveform.as_ref().unwrap().resolve(geometry).unwrap();
        assert_eq!(s, example_waveform(ExampleWaveform::Ex3b));
        assert_eq!(c.grid.as_ref().unwrap().resolve().unwrap().len(), 8);
        assert_eq!(c.policy().unwrap().relative_tolerance, 1e-10);
    }

    #[test]
    fn explicit_geometry_and_angles() {
        let text = r#"{
            "schema": 1,
            "task": "beampattern",
            "geometry": {"tx": [0, 5], "rx": [0, 1]},
            "waveform": {"orthogonal": {"t": 4}},
            "grid": [-0.5, 0.0, 0.5]
        }"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        let geometry = c.geometry.as_ref().unwrap();
        assert_eq!(geometry.gna_params(), None);
        let s = c.waveform.as_ref().unwrap().resolve(geometry).unwrap();
        assert_eq!((s.t(), s.n_tx()), (4, 2));
    }

    #[test]
    fn rejects_bad_configs() {
        let no_schema = r#"{"schema": 2, "task": "geometry", "geometry": {"tx": [0], "rx": [0]}}"#;
        assert!(ExperimentConfig::from_json(no_schema).is_err());
        let missing = r#"{"schema": 1, "task": "identify", "geometry": {"tx": [0], "rx": [0]}}"#;
        assert!(ExperimentConfig::from_json(missing).is_err());
        let matched_explicit = r#"{"schema": 1, "task": "identify",
            "geometry": {"tx": [0, 1], "rx": [0, 1]},
            "waveform": {"matched": {"n_s": 1}}, "grid": {"sin_uniform": 4}}"#;
        assert!(ExperimentConfig::from_json(matched_explicit).is_err());
        let unknown =
            r#"{"schema": 1, "task": "geometry", "geometry": {"tx": [0], "rx": [0]}, "extra": 1}"#;
        assert!(ExperimentConfig::from_json(unknown).is_err());
        let bad_tol = r#"{"schema": 1, "task": "geometry", "geometry": {"tx": [0], "rx": [0]}, "rank_tol": 0.5}"#;
        assert!(ExperimentConfig::from_json(bad_tol).is_err());
    }

    #[test]
    fn round_trips() {
        let mut c = ExperimentConfig::new(Task::Krank);
        c.geometry = Some(GeometrySpec::Gna {
            gna: GnaParams {
                n_tx: 3,
                n_rx: 2,
                delta: 2,
            },
        });
        c.waveform = Some(WaveformSpec::Matched { n_s: 2, t: None });
        c.grid = Some(GridSpec::SinUniform { sin_uniform: 8 });
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"schema\":1"));
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }
}
