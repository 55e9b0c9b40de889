//! Tool configuration file: JSON, validated field by field so every problem is
//! reported with its path before anything runs.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use fjm_core::explorer::{
    DEFAULT_BUNDLE_FRACTIONS, DEFAULT_DENSITIES, DEFAULT_FIBER_DIAMETERS_MM, DEFAULT_FILL_FACTOR,
};
use fjm_core::geometry::HEX_DENSITY;
use fjm_core::mechanics::{
    MembraneSpec, PhaseParams, DEFAULT_EFFECTIVE_LENGTH_MM, DEFAULT_LOAD_CONSTANT,
    DEFAULT_WALL_THICKNESS_MM, DEFAULT_YOUNGS_MODULUS_MPA,
};

pub const DEFAULT_MEMBRANE_DIAMETER_MM: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembraneConfig {
    pub inner_diameter_mm: f64,
    pub wall_thickness_mm: f64,
    pub effective_length_mm: f64,
}

impl MembraneConfig {
    pub fn spec(&self) -> MembraneSpec {
        MembraneSpec {
            inner_radius_mm: self.inner_diameter_mm / 2.0,
            wall_thickness_mm: self.wall_thickness_mm,
            effective_length_mm: self.effective_length_mm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_mm: Option<f64>,
    pub youngs_modulus_mpa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAxes {
    pub fiber_diameters_mm: Vec<f64>,
    pub densities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableAxes {
    pub bundle_fractions: Vec<f64>,
    pub fiber_diameters_mm: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolConfig {
    pub membrane: MembraneConfig,
    pub fiber: FiberConfig,
    pub load_constant: f64,
    pub phases: PhaseParams,
    pub fill_factor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub friction_calibration: Option<PathBuf>,
    pub seed: u64,
    pub sweep: SweepAxes,
    pub table: TableAxes,
}

impl Default for ToolConfig {
    fn default() -> Self {
        ToolConfig {
            membrane: MembraneConfig {
                inner_diameter_mm: DEFAULT_MEMBRANE_DIAMETER_MM,
                wall_thickness_mm: DEFAULT_WALL_THICKNESS_MM,
                effective_length_mm: DEFAULT_EFFECTIVE_LENGTH_MM,
            },
            fiber: FiberConfig {
                radius_mm: None,
                youngs_modulus_mpa: DEFAULT_YOUNGS_MODULUS_MPA,
            },
            load_constant: DEFAULT_LOAD_CONSTANT,
            phases: PhaseParams::default(),
            fill_factor: DEFAULT_FILL_FACTOR,
            friction_calibration: None,
            seed: 0,
            sweep: SweepAxes {
                fiber_diameters_mm: DEFAULT_FIBER_DIAMETERS_MM.to_vec(),
                densities: DEFAULT_DENSITIES.to_vec(),
            },
            table: TableAxes {
                bundle_fractions: DEFAULT_BUNDLE_FRACTIONS.to_vec(),
                fiber_diameters_mm: DEFAULT_FIBER_DIAMETERS_MM.to_vec(),
            },
        }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io(PathBuf, std::io::Error),
    Invalid(Vec<Violation>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(path, e) => write!(f, "cannot read {}: {e}", path.display()),
            ConfigError::Invalid(violations) => {
                write!(f, "invalid configuration:")?;
                for v in violations {
                    write!(f, "\n  {v}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// Reads and validates a config file. The calibration path, if relative, is
/// resolved against the config file's directory.
pub fn validate_config(path: &Path) -> Result<ToolConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_owned(), e))?;
    let mut config = parse_config(&text).map_err(ConfigError::Invalid)?;
    if let Some(cal) = &config.friction_calibration {
        if cal.is_relative() {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            config.friction_calibration = Some(base.join(cal));
        }
    }
    Ok(config)
}

pub fn parse_config(text: &str) -> Result<ToolConfig, Vec<Violation>> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        vec![Violation {
            path: "$".into(),
            message: format!("not valid JSON: {e}"),
        }]
    })?;
    let mut v = Validator::default();
    let config = v.config(&value);
    if v.violations.is_empty() {
        Ok(config)
    } else {
        Err(v.violations)
    }
}

#[derive(Default)]
struct Validator {
    violations: Vec<Violation>,
}

#[derive(Clone, Copy)]
enum Bound {
    Positive,
    NonNegative,
    /// (0, hi]
    UpTo(f64, &'static str),
}

impl Validator {
    fn fail(&mut self, path: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn object<'a>(
        &mut self,
        path: &str,
        value: &'a Value,
        keys: &[&str],
    ) -> Option<&'a Map<String, Value>> {
        let Some(obj) = value.as_object() else {
            self.fail(path, "expected an object");
            return None;
        };
        for key in obj.keys() {
            if !keys.contains(&key.as_str()) {
                self.fail(&join(path, key), "unknown key");
            }
        }
        Some(obj)
    }

    fn check(&mut self, path: &str, x: f64, bound: Bound) -> f64 {
        match bound {
            Bound::Positive if x <= 0.0 => self.fail(path, format!("must be positive, got {x}")),
            Bound::NonNegative if x < 0.0 => {
                self.fail(path, format!("must be non-negative, got {x}"))
            }
            Bound::UpTo(hi, what) if !(x > 0.0 && x <= hi) => {
                self.fail(path, format!("{x} outside (0, {hi}]; {what}"))
            }
            _ => {}
        }
        x
    }

    fn number(
        &mut self,
        obj: &Map<String, Value>,
        parent: &str,
        key: &str,
        bound: Bound,
    ) -> Option<f64> {
        let path = join(parent, key);
        match obj.get(key)? {
            Value::Number(n) => n.as_f64().map(|x| self.check(&path, x, bound)),
            _ => {
                self.fail(&path, "expected a number");
                None
            }
        }
    }

    fn list(
        &mut self,
        obj: &Map<String, Value>,
        parent: &str,
        key: &str,
        bound: Bound,
    ) -> Option<Vec<f64>> {
        let path = join(parent, key);
        let Some(Value::Array(items)) = obj.get(key) else {
            if obj.contains_key(key) {
                self.fail(&path, "expected an array of numbers");
            }
            return None;
        };
        if items.is_empty() {
            self.fail(&path, "must not be empty");
        }
        let mut out = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            let item_path = format!("{path}[{i}]");
            match item.as_f64() {
                Some(x) => out.push(self.check(&item_path, x, bound)),
                None => self.fail(&item_path, "expected a number"),
            }
        }
        Some(out)
    }

    fn config(&mut self, value: &Value) -> ToolConfig {
        let mut config = ToolConfig::default();
        let keys = [
            "membrane",
            "fiber",
            "load_constant",
            "phases",
            "fill_factor",
            "friction_calibration",
            "seed",
            "sweep",
            "table",
        ];
        let Some(root) = self.object("$", value, &keys) else {
            return config;
        };

        match root.get("membrane") {
            None => self.fail("membrane", "missing required key"),
            Some(m) => {
                if let Some(m) = self.object(
                    "membrane",
                    m,
                    &[
                        "inner_diameter_mm",
                        "wall_thickness_mm",
                        "effective_length_mm",
                    ],
                ) {
                    match self.number(m, "membrane", "inner_diameter_mm", Bound::Positive) {
                        Some(d) => config.membrane.inner_diameter_mm = d,
                        None if !m.contains_key("inner_diameter_mm") => {
                            self.fail("membrane.inner_diameter_mm", "missing required key")
                        }
                        None => {}
                    }
                    if let Some(w) =
                        self.number(m, "membrane", "wall_thickness_mm", Bound::Positive)
                    {
                        config.membrane.wall_thickness_mm = w;
                    }
                    if let Some(l) =
                        self.number(m, "membrane", "effective_length_mm", Bound::Positive)
                    {
                        config.membrane.effective_length_mm = l;
                    }
                }
            }
        }

        if let Some(f) = root.get("fiber") {
            if let Some(f) = self.object("fiber", f, &["radius_mm", "youngs_modulus_mpa"]) {
                config.fiber.radius_mm = self.number(f, "fiber", "radius_mm", Bound::Positive);
                if let Some(e) = self.number(f, "fiber", "youngs_modulus_mpa", Bound::Positive) {
                    config.fiber.youngs_modulus_mpa = e;
                }
            }
        }
        if let (Some(r), d) = (config.fiber.radius_mm, config.membrane.inner_diameter_mm) {
            if r > 0.0 && 2.0 * r >= d {
                self.fail(
                    "fiber.radius_mm",
                    format!(
                        "fiber diameter {} mm does not fit the {d} mm membrane",
                        2.0 * r
                    ),
                );
            }
        }

        if let Some(c) = self.number(root, "", "load_constant", Bound::Positive) {
            config.load_constant = c;
        }

        if let Some(p) = root.get("phases") {
            if let Some(p) = self.object("phases", p, &["slip_onset_mm", "transition_window_mm"]) {
                if let Some(y) = self.number(p, "phases", "slip_onset_mm", Bound::NonNegative) {
                    config.phases.slip_onset_mm = y;
                }
                if let Some(w) =
                    self.number(p, "phases", "transition_window_mm", Bound::NonNegative)
                {
                    config.phases.transition_window_mm = w;
                }
            }
        }

        let hex = Bound::UpTo(
            HEX_DENSITY,
            "exceeds the hexagonal packing bound π/√12 ≈ 0.9069",
        );
        if let Some(ff) = self.number(root, "", "fill_factor", hex) {
            config.fill_factor = ff;
        }

        match root.get("friction_calibration") {
            None => {}
            Some(Value::String(s)) if !s.is_empty() => {
                config.friction_calibration = Some(PathBuf::from(s))
            }
            Some(_) => self.fail("friction_calibration", "expected a non-empty path string"),
        }

        match root.get("seed") {
            None => {}
            Some(s) => match s.as_u64() {
                Some(seed) => config.seed = seed,
                None => self.fail("seed", "expected a non-negative integer"),
            },
        }

        let diameter_bound = Bound::UpTo(
            config.membrane.inner_diameter_mm,
            "fibers must fit the membrane",
        );
        if let Some(s) = root.get("sweep") {
            if let Some(s) = self.object("sweep", s, &["fiber_diameters_mm", "densities"]) {
                if let Some(d) = self.list(s, "sweep", "fiber_diameters_mm", diameter_bound) {
                    config.sweep.fiber_diameters_mm = d;
                }
                if let Some(d) = self.list(s, "sweep", "densities", hex) {
                    config.sweep.densities = d;
                }
            }
        }
        if let Some(t) = root.get("table") {
            if let Some(t) = self.object("table", t, &["bundle_fractions", "fiber_diameters_mm"]) {
                if let Some(f) = self.list(
                    t,
                    "table",
                    "bundle_fractions",
                    Bound::UpTo(1.0, "a fraction of the membrane"),
                ) {
                    config.table.bundle_fractions = f;
                }
                if let Some(d) = self.list(t, "table", "fiber_diameters_mm", diameter_bound) {
                    config.table.fiber_diameters_mm = d;
                }
            }
        }

        if config.membrane.wall_thickness_mm >= config.membrane.inner_diameter_mm / 2.0 {
            self.fail(
                "membrane.wall_thickness_mm",
                "must be below the inner radius",
            );
        }
        config
    }
}

fn join(parent: &str, key: &str) -> String {
    if parent.is_empty() || parent == "$" {
        key.to_string()
    } else {
        format!("{parent}.{key}")
    }
}
