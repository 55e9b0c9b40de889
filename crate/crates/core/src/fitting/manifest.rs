//! Multi-run ingestion: a JSON manifest listing curve files and their metadata.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{fit_curve, median_slope, variation_from_slopes, CurveFitReport};
use crate::curve::{CurveState, ForceDeflectionCurve};
use crate::error::{FjmError, Result};
use crate::mechanics::MAX_VACUUM_KPA;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunEntry {
    pub path: PathBuf,
    pub state: CurveState,
    pub config_id: String,
    #[serde(default)]
    pub vacuum_pressure_kpa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub runs: Vec<RunEntry>,
}

impl RunManifest {
    pub fn from_json(text: &str) -> Result<Self> {
        let manifest: RunManifest = serde_json::from_str(text)?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for run in &self.runs {
            if !seen.insert(&run.path) {
                return Err(FjmError::invalid(format!(
                    "manifest lists {} more than once",
                    run.path.display()
                )));
            }
            if let Some(p) = run.vacuum_pressure_kpa {
                if !(0.0..=MAX_VACUUM_KPA).contains(&p) {
                    return Err(FjmError::invalid(format!(
                        "{}: vacuum pressure {p} kPa out of range",
                        run.path.display()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Reads a manifest; relative curve paths are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut manifest = Self::from_json(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for run in &mut manifest.runs {
            if run.path.is_relative() {
                run.path = base.join(&run.path);
            }
        }
        Ok(manifest)
    }
}

/// Fit of one run in a manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunFit {
    pub path: PathBuf,
    pub config_id: String,
    pub vacuum_pressure_kpa: Option<f64>,
    pub report: CurveFitReport,
}

/// Median stiffness per configuration across its repeated runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSummary {
    pub config_id: String,
    pub jammed_runs: usize,
    pub unjammed_runs: usize,
    pub over_fed_runs: usize,
    pub k_jammed: Option<f64>,
    pub k_unjammed: Option<f64>,
    pub zeta: Option<f64>,
}

pub fn fit_runs(manifest: &RunManifest) -> Result<Vec<RunFit>> {
    manifest
        .runs
        .iter()
        .map(|run| {
            let curve = ForceDeflectionCurve::read_csv(&run.path)
                .map_err(|e| match e {
                    FjmError::MalformedCurve(m) => {
                        FjmError::MalformedCurve(format!("{}: {m}", run.path.display()))
                    }
                    other => other,
                })?
                .with_state(run.state, run.vacuum_pressure_kpa)
                .with_config_id(run.config_id.clone());
            Ok(RunFit {
                path: run.path.clone(),
                config_id: run.config_id.clone(),
                vacuum_pressure_kpa: run.vacuum_pressure_kpa,
                report: fit_curve(&curve)?,
            })
        })
        .collect()
}

/// Aggregates run fits by configuration id (sorted by id).
pub fn summarize(fits: &[RunFit]) -> Result<Vec<ConfigSummary>> {
    let mut by_config: BTreeMap<&str, (Vec<CurveFitReport>, Vec<CurveFitReport>)> = BTreeMap::new();
    for fit in fits {
        let entry = by_config.entry(&fit.config_id).or_default();
        match fit.report.state {
            CurveState::Jammed => entry.0.push(fit.report.clone()),
            CurveState::Unjammed => entry.1.push(fit.report.clone()),
        }
    }
    by_config
        .into_iter()
        .map(|(id, (jammed, unjammed))| {
            let k_jammed = (!jammed.is_empty())
                .then(|| median_slope(&jammed))
                .transpose()?;
            let k_unjammed = (!unjammed.is_empty())
                .then(|| median_slope(&unjammed))
                .transpose()?;
            let zeta = match (k_jammed, k_unjammed) {
                (Some(j), Some(u)) => Some(variation_from_slopes(j, u)?),
                _ => None,
            };
            Ok(ConfigSummary {
                config_id: id.to_string(),
                jammed_runs: jammed.len(),
                unjammed_runs: unjammed.len(),
                over_fed_runs: unjammed.iter().filter(|r| r.over_fed).count(),
                k_jammed,
                k_unjammed,
                zeta,
            })
        })
        .collect()
}
