use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{FjmError, Result};

/// Exact CSV header for force–deflection curves.
pub const CURVE_CSV_HEADER: &str = "deflection_mm,force_N";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveState {
    Jammed,
    Unjammed,
}

impl std::str::FromStr for CurveState {
    type Err = FjmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jammed" => Ok(CurveState::Jammed),
            "unjammed" => Ok(CurveState::Unjammed),
            other => Err(FjmError::invalid(format!(
                "state must be 'jammed' or 'unjammed', got '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for CurveState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CurveState::Jammed => "jammed",
            CurveState::Unjammed => "unjammed",
        })
    }
}

/// Ordered (deflection mm, force N) samples plus run metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceDeflectionCurve {
    samples: Vec<(f64, f64)>,
    pub state: Option<CurveState>,
    pub config_id: Option<String>,
    pub vacuum_pressure_kpa: Option<f64>,
}

impl ForceDeflectionCurve {
    /// Validates ordering and finiteness of the samples.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(FjmError::MalformedCurve("curve has no samples".into()));
        }
        for (i, &(y, f)) in samples.iter().enumerate() {
            if !y.is_finite() || !f.is_finite() {
                return Err(FjmError::MalformedCurve(format!(
                    "non-finite sample at row {i}"
                )));
            }
        }
        if samples[0].0 < 0.0 {
            return Err(FjmError::MalformedCurve(format!(
                "first deflection {} is negative",
                samples[0].0
            )));
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(FjmError::MalformedCurve(format!(
                "deflection not strictly increasing at row {}",
                i + 1
            )));
        }
        Ok(ForceDeflectionCurve {
            samples,
            state: None,
            config_id: None,
            vacuum_pressure_kpa: None,
        })
    }

    pub fn with_state(mut self, state: CurveState, vacuum_pressure_kpa: Option<f64>) -> Self {
        self.state = Some(state);
        self.vacuum_pressure_kpa = vacuum_pressure_kpa;
        self
    }

    pub fn with_config_id(mut self, id: impl Into<String>) -> Self {
        self.config_id = Some(id.into());
        self
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn deflections(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.0).collect()
    }

    pub fn forces(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(24 * (self.samples.len() + 1));
        out.push_str(CURVE_CSV_HEADER);
        out.push('\n');
        for (y, f) in &self.samples {
            let _ = writeln!(out, "{y},{f}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| FjmError::MalformedCurve(e.to_string()))?
            .iter()
            .collect::<Vec<_>>()
            .join(",");
        if header != CURVE_CSV_HEADER {
            return Err(FjmError::MalformedCurve(format!(
                "expected header '{CURVE_CSV_HEADER}', found '{header}'"
            )));
        }
        let mut samples = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| FjmError::MalformedCurve(e.to_string()))?;
            if record.len() != 2 {
                return Err(FjmError::MalformedCurve(format!(
                    "row {} has {} fields",
                    i + 1,
                    record.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    FjmError::MalformedCurve(format!("row {}: bad number '{s}'", i + 1))
                })
            };
            samples.push((parse(&record[0])?, parse(&record[1])?));
        }
        Self::new(samples)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}
