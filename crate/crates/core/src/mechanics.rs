//! Analytic stiffness model of a fiber jamming module treated as a cantilever.
//!
//! A jammed bundle bends as one solid beam of radius `R`; an unjammed bundle bends
//! as `N` independent fibers whose inter-fiber friction stiffens the response by
//! `1 / (1 - ε)`. All lengths are mm, forces N, moduli MPa (N/mm²).

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::curve::{CurveState, ForceDeflectionCurve};
use crate::error::{FjmError, Result};
use crate::geometry::{packing_density, HEX_DENSITY};

/// Typical nylon 66 modulus. Absolute stiffness outputs scale linearly with it.
pub const DEFAULT_YOUNGS_MODULUS_MPA: f64 = 3000.0;
/// Point load at the free tip of a cantilever: y = F L³ / (3 E I).
pub const DEFAULT_LOAD_CONSTANT: f64 = 1.0 / 3.0;
pub const DEFAULT_EFFECTIVE_LENGTH_MM: f64 = 100.0;
pub const DEFAULT_WALL_THICKNESS_MM: f64 = 0.17;
/// Upper clamp on ε keeping the unjammed stiffness finite.
pub const EPSILON_CEILING: f64 = 1.0 - 1e-6;
/// Standard atmosphere; the largest admissible vacuum.
pub const MAX_VACUUM_KPA: f64 = 101.325;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSpec {
    pub fiber_radius_mm: f64,
    #[serde(default = "default_modulus")]
    pub youngs_modulus_mpa: f64,
}

fn default_modulus() -> f64 {
    DEFAULT_YOUNGS_MODULUS_MPA
}

impl FiberSpec {
    pub fn new(fiber_radius_mm: f64, youngs_modulus_mpa: f64) -> Result<Self> {
        let spec = FiberSpec {
            fiber_radius_mm,
            youngs_modulus_mpa,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        positive("fiber_radius_mm", self.fiber_radius_mm)?;
        positive("youngs_modulus_mpa", self.youngs_modulus_mpa)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembraneSpec {
    pub inner_radius_mm: f64,
    #[serde(default = "default_wall")]
    pub wall_thickness_mm: f64,
    #[serde(default = "default_length")]
    pub effective_length_mm: f64,
}

fn default_wall() -> f64 {
    DEFAULT_WALL_THICKNESS_MM
}

fn default_length() -> f64 {
    DEFAULT_EFFECTIVE_LENGTH_MM
}

impl MembraneSpec {
    /// Membrane of the given inner radius with default wall and length.
    pub fn with_radius(inner_radius_mm: f64) -> Self {
        MembraneSpec {
            inner_radius_mm,
            wall_thickness_mm: DEFAULT_WALL_THICKNESS_MM,
            effective_length_mm: DEFAULT_EFFECTIVE_LENGTH_MM,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("inner_radius_mm", self.inner_radius_mm)?;
        positive("wall_thickness_mm", self.wall_thickness_mm)?;
        positive("effective_length_mm", self.effective_length_mm)?;
        if self.wall_thickness_mm >= self.inner_radius_mm {
            return Err(FjmError::invalid(format!(
                "wall thickness {} mm must be well below the inner radius {} mm",
                self.wall_thickness_mm, self.inner_radius_mm
            )));
        }
        Ok(())
    }
}

/// Complete description of one module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FjmConfig {
    pub fiber: FiberSpec,
    pub fiber_count: usize,
    pub bundle_radius_mm: f64,
    pub membrane: MembraneSpec,
    #[serde(default = "default_load_constant")]
    pub load_constant: f64,
}

fn default_load_constant() -> f64 {
    DEFAULT_LOAD_CONSTANT
}

impl FjmConfig {
    pub fn validate(&self) -> Result<()> {
        self.fiber.validate()?;
        self.membrane.validate()?;
        positive("bundle_radius_mm", self.bundle_radius_mm)?;
        positive("load_constant", self.load_constant)?;
        if self.fiber_count == 0 {
            return Err(FjmError::invalid("fiber_count must be at least 1"));
        }
        if self.bundle_radius_mm > self.membrane.inner_radius_mm {
            return Err(FjmError::invalid(format!(
                "bundle radius {} mm exceeds membrane inner radius {} mm",
                self.bundle_radius_mm, self.membrane.inner_radius_mm
            )));
        }
        let density = packing_density(
            self.fiber_count,
            self.fiber.fiber_radius_mm,
            self.membrane.inner_radius_mm,
        )?;
        if density > HEX_DENSITY {
            return Err(FjmError::invalid(format!(
                "packing density {density:.4} exceeds the hexagonal bound π/√12"
            )));
        }
        Ok(())
    }

    pub fn packing_density(&self) -> Result<f64> {
        packing_density(
            self.fiber_count,
            self.fiber.fiber_radius_mm,
            self.membrane.inner_radius_mm,
        )
    }

    pub fn inertia_jammed(&self) -> f64 {
        inertia_jammed(self.bundle_radius_mm)
    }

    pub fn inertia_unjammed(&self) -> f64 {
        inertia_unjammed(self.fiber_count, self.fiber.fiber_radius_mm)
    }

    pub fn k_jammed(&self) -> Result<f64> {
        tip_stiffness(
            self.fiber.youngs_modulus_mpa,
            self.inertia_jammed(),
            self.membrane.effective_length_mm,
            self.load_constant,
            0.0,
        )
    }

    pub fn k_unjammed(&self, epsilon: f64) -> Result<f64> {
        tip_stiffness(
            self.fiber.youngs_modulus_mpa,
            self.inertia_unjammed(),
            self.membrane.effective_length_mm,
            self.load_constant,
            epsilon,
        )
    }

    /// Jammed/unjammed stiffness and their ratio at friction coefficient `epsilon`.
    pub fn stiffness_report(&self, epsilon: f64) -> Result<StiffnessReport> {
        let k_jammed = self.k_jammed()?;
        let k_unjammed = self.k_unjammed(epsilon)?;
        let zeta = variation_ratio(
            self.bundle_radius_mm,
            self.fiber_count,
            self.fiber.fiber_radius_mm,
            epsilon,
        )?;
        Ok(StiffnessReport {
            k_jammed,
            k_unjammed,
            zeta,
            epsilon,
        })
    }
}

/// Jammed and unjammed tip stiffness (N/mm) plus the variation ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessReport {
    pub k_jammed: f64,
    pub k_unjammed: f64,
    pub zeta: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum JammingState {
    /// Vacuum applied; the pressure is carried as metadata only.
    Jammed {
        vacuum_pressure_kpa: f64,
    },
    Unjammed,
}

impl JammingState {
    pub fn jammed(vacuum_pressure_kpa: f64) -> Result<Self> {
        if !(0.0..=MAX_VACUUM_KPA).contains(&vacuum_pressure_kpa) {
            return Err(FjmError::invalid(format!(
                "vacuum pressure {vacuum_pressure_kpa} kPa outside [0, {MAX_VACUUM_KPA}]"
            )));
        }
        Ok(JammingState::Jammed {
            vacuum_pressure_kpa,
        })
    }

    pub fn curve_state(&self) -> CurveState {
        match self {
            JammingState::Jammed { .. } => CurveState::Jammed,
            JammingState::Unjammed => CurveState::Unjammed,
        }
    }

    pub fn vacuum_pressure_kpa(&self) -> Option<f64> {
        match *self {
            JammingState::Jammed {
                vacuum_pressure_kpa,
            } => Some(vacuum_pressure_kpa),
            JammingState::Unjammed => None,
        }
    }
}

/// Where the jammed bundle starts slipping and how wide the transition is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseParams {
    pub slip_onset_mm: f64,
    pub transition_window_mm: f64,
}

impl Default for PhaseParams {
    fn default() -> Self {
        PhaseParams {
            slip_onset_mm: 1.0,
            transition_window_mm: 1.0,
        }
    }
}

impl PhaseParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("slip_onset_mm", self.slip_onset_mm),
            ("transition_window_mm", self.transition_window_mm),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(FjmError::invalid(format!("{name} must be ≥ 0, got {v}")));
            }
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(FjmError::invalid(format!(
            "{name} must be positive, got {v}"
        )));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(FjmError::invalid(format!(
            "ε must be in [0, 1), got {epsilon}"
        )));
    }
    if epsilon >= 1.0 {
        return Err(FjmError::invalid(format!(
            "ε = {epsilon} makes the unjammed stiffness singular"
        )));
    }
    Ok(())
}

/// Second moment of area of `n` independent fibers, mm⁴.
pub fn inertia_unjammed(n: usize, fiber_radius: f64) -> f64 {
    n as f64 * FRAC_PI_4 * fiber_radius.powi(4)
}

/// Second moment of area of a solid circular bundle, mm⁴.
pub fn inertia_jammed(bundle_radius: f64) -> f64 {
    FRAC_PI_4 * bundle_radius.powi(4)
}

/// Tip stiffness `E I / (C1 L³ (1 - ε))` in N/mm.
pub fn tip_stiffness(
    youngs_modulus: f64,
    inertia: f64,
    length: f64,
    load_constant: f64,
    epsilon: f64,
) -> Result<f64> {
    positive("youngs modulus", youngs_modulus)?;
    positive("moment of inertia", inertia)?;
    positive("length", length)?;
    positive("load constant", load_constant)?;
    check_epsilon(epsilon)?;
    Ok(youngs_modulus * inertia / (load_constant * length.powi(3) * (1.0 - epsilon)))
}

/// Jammed-to-unjammed stiffness ratio ζ = R⁴ / (N r⁴) · (1 - ε).
pub fn variation_ratio(
    bundle_radius: f64,
    n: usize,
    fiber_radius: f64,
    epsilon: f64,
) -> Result<f64> {
    positive("bundle radius", bundle_radius)?;
    positive("fiber radius", fiber_radius)?;
    if n == 0 {
        return Err(FjmError::invalid("fiber count must be at least 1"));
    }
    check_epsilon(epsilon)?;
    Ok(frictionless_ratio(bundle_radius, n, fiber_radius) * (1.0 - epsilon))
}

fn frictionless_ratio(bundle_radius: f64, n: usize, fiber_radius: f64) -> f64 {
    (bundle_radius / fiber_radius).powi(4) / n as f64
}

/// ε recovered from an observed variation ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonEstimate {
    /// ε clamped to `[0, EPSILON_CEILING]`.
    pub epsilon: f64,
    /// Unclamped inverse.
    pub raw: f64,
    /// Set when `raw` fell outside the physical range.
    pub clamped: bool,
}

pub fn estimate_epsilon(
    zeta_observed: f64,
    bundle_radius: f64,
    n: usize,
    fiber_radius: f64,
) -> Result<EpsilonEstimate> {
    positive("observed ζ", zeta_observed)?;
    positive("bundle radius", bundle_radius)?;
    positive("fiber radius", fiber_radius)?;
    if n == 0 {
        return Err(FjmError::invalid("fiber count must be at least 1"));
    }
    let raw = 1.0 - zeta_observed / frictionless_ratio(bundle_radius, n, fiber_radius);
    if raw >= 1.0 {
        return Err(FjmError::OutOfModel(format!(
            "ζ = {zeta_observed} implies ε ≥ 1"
        )));
    }
    let epsilon = raw.clamp(0.0, EPSILON_CEILING);
    let clamped = epsilon != raw;
    if clamped {
        log::warn!("ε estimate {raw:.6} clamped to {epsilon:.6}");
    }
    Ok(EpsilonEstimate {
        epsilon,
        raw,
        clamped,
    })
}

/// Linear ε(N) = a + b·N fitted for one packing-density group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrictionGroup {
    pub density: f64,
    pub intercept: f64,
    pub slope_per_fiber: f64,
}

/// Per-density linear friction models.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrictionModel {
    pub groups: Vec<FrictionGroup>,
}

const BUNDLED_CALIBRATION: &str = include_str!("../data/friction_calibration.json");

impl FrictionModel {
    /// Calibration reproducing ζ = 34 at (N = 56, r = 0.2 mm) and ζ = 42 at
    /// (N = 100, r = 0.15 mm), both with a 1.7 mm bundle in a 4 mm membrane.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_CALIBRATION).expect("bundled calibration parses")
    }

    /// Model with ε ≡ `epsilon` at every density.
    pub fn constant(epsilon: f64) -> Self {
        FrictionModel {
            groups: vec![FrictionGroup {
                density: 0.5,
                intercept: epsilon,
                slope_per_fiber: 0.0,
            }],
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: FrictionModel = serde_json::from_str(text)?;
        for g in &model.groups {
            if !(g.density.is_finite() && g.intercept.is_finite() && g.slope_per_fiber.is_finite())
            {
                return Err(FjmError::Configuration(
                    "non-finite friction coefficient".into(),
                ));
            }
        }
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Group whose density is closest to `density`; ties go to the lower density.
    pub fn group_for(&self, density: f64) -> Option<&FrictionGroup> {
        self.groups.iter().min_by(|a, b| {
            (a.density - density)
                .abs()
                .total_cmp(&(b.density - density).abs())
                .then(a.density.total_cmp(&b.density))
        })
    }
}

/// ε predicted by the friction model for `n` fibers at `density`, clamped to the
/// physical range.
pub fn epsilon_model(n: usize, density: f64, model: &FrictionModel) -> Result<f64> {
    let group = model
        .group_for(density)
        .ok_or_else(|| FjmError::Configuration("friction model has no groups".into()))?;
    let eps = group.intercept + group.slope_per_fiber * n as f64;
    Ok(eps.clamp(0.0, EPSILON_CEILING))
}

/// Three-phase force–deflection prediction sampled every `step` mm up to
/// `max_deflection` (always included as the last sample).
pub fn predict_curve(
    config: &FjmConfig,
    state: JammingState,
    phases: PhaseParams,
    epsilon: f64,
    max_deflection: f64,
    step: f64,
) -> Result<ForceDeflectionCurve> {
    config.validate()?;
    phases.validate()?;
    positive("max_deflection", max_deflection)?;
    positive("step", step)?;
    if step > max_deflection {
        return Err(FjmError::invalid(format!(
            "step {step} mm exceeds max deflection {max_deflection} mm"
        )));
    }
    let k_full = config.k_unjammed(epsilon)?;
    let force: Box<dyn Fn(f64) -> f64> = match state {
        JammingState::Unjammed => Box::new(move |y| k_full * y),
        JammingState::Jammed { .. } => {
            let k_pre = config.k_jammed()?;
            let onset = phases.slip_onset_mm;
            let window = phases.transition_window_mm;
            Box::new(move |y| {
                if y <= onset {
                    return k_pre * y;
                }
                let at_onset = k_pre * onset;
                let t = y - onset;
                if t <= window {
                    at_onset + k_pre * t + (k_full - k_pre) * t * t / (2.0 * window)
                } else {
                    at_onset + 0.5 * (k_pre + k_full) * window + k_full * (t - window)
                }
            })
        }
    };

    let mut deflections = Vec::new();
    let mut k = 0usize;
    loop {
        let y = k as f64 * step;
        if y >= max_deflection * (1.0 - 1e-12) {
            break;
        }
        deflections.push(y);
        k += 1;
    }
    deflections.push(max_deflection);
    let samples = deflections.into_iter().map(|y| (y, force(y))).collect();
    ForceDeflectionCurve::new(samples)
        .map(|c| c.with_state(state.curve_state(), state.vacuum_pressure_kpa()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn worked_config() -> FjmConfig {
        FjmConfig {
            fiber: FiberSpec::new(0.2, 3000.0).unwrap(),
            fiber_count: 56,
            bundle_radius_mm: 1.7,
            membrane: MembraneSpec::with_radius(2.0),
            load_constant: DEFAULT_LOAD_CONSTANT,
        }
    }

    #[test]
    fn inertia_values() {
        assert_eq!(inertia_unjammed(1, 0.37), inertia_jammed(0.37));
        assert!((inertia_unjammed(56, 0.2) - 0.070372).abs() < 1e-6);
        // (π/4)·128·0.15⁴ = 0.0508938
        assert!((inertia_unjammed(128, 0.15) - 0.050_893_8).abs() < 1e-6);
        assert_eq!(inertia_jammed(0.0), 0.0);
        assert!((inertia_jammed(1.0) - 0.785398).abs() < 1e-6);
        assert!((inertia_jammed(1.7) - 6.5596).abs() < 1e-3);
    }

    #[test]
    fn tip_stiffness_values() {
        let k = tip_stiffness(3000.0, 6.5596, 100.0, 1.0 / 3.0, 0.0).unwrap();
        assert!((k - 0.059036).abs() < 1e-5);
        let k = tip_stiffness(3000.0, 0.070372, 100.0, 1.0 / 3.0, 0.6353).unwrap();
        assert!((k - 0.0017367).abs() < 1e-6);
        assert!(tip_stiffness(3000.0, 1.0, 100.0, 1.0 / 3.0, 1.0).is_err());
        assert!(tip_stiffness(-1.0, 1.0, 100.0, 1.0 / 3.0, 0.0).is_err());
    }

    #[test]
    fn variation_ratio_values() {
        assert_eq!(variation_ratio(0.3, 1, 0.3, 0.0).unwrap(), 1.0);
        assert!((variation_ratio(1.7, 56, 0.2, 0.0).unwrap() - 93.22).abs() < 0.01);
        assert!((variation_ratio(1.7, 56, 0.2, 0.6353).unwrap() - 34.0).abs() < 0.1);
    }

    #[test]
    fn epsilon_inverse_values() {
        let frictionless = 1.7f64.powi(4) / (56.0 * 0.2f64.powi(4));
        assert!(
            estimate_epsilon(frictionless, 1.7, 56, 0.2)
                .unwrap()
                .epsilon
                .abs()
                < 1e-12
        );
        let e = estimate_epsilon(34.0, 1.7, 56, 0.2).unwrap();
        assert!((e.epsilon - 0.6353).abs() < 1e-3 && !e.clamped);
        let e = estimate_epsilon(42.0, 1.7, 100, 0.15).unwrap();
        assert!((e.epsilon - 0.7454).abs() < 1e-3);
    }

    #[test]
    fn epsilon_clamping_and_errors() {
        let e = estimate_epsilon(200.0, 1.7, 56, 0.2).unwrap();
        assert!(e.clamped && e.epsilon == 0.0 && e.raw < 0.0);
        let e = estimate_epsilon(1e-9, 1.7, 56, 0.2).unwrap();
        assert!(e.clamped && e.epsilon == EPSILON_CEILING);
        assert!(estimate_epsilon(0.0, 1.7, 56, 0.2).is_err());
        assert!(estimate_epsilon(-3.0, 1.7, 56, 0.2).is_err());
    }

    #[test]
    fn friction_model_lookup() {
        let zero = FrictionModel {
            groups: vec![FrictionGroup {
                density: 0.4,
                intercept: 0.0,
                slope_per_fiber: 0.0,
            }],
        };
        assert_eq!(epsilon_model(80, 0.9, &zero).unwrap(), 0.0);
        assert!(epsilon_model(10, 0.5, &FrictionModel::default()).is_err());

        let bundled = FrictionModel::bundled();
        assert!((epsilon_model(56, 0.56, &bundled).unwrap() - 0.635).abs() < 0.01);
        assert!((epsilon_model(100, 0.56, &bundled).unwrap() - 0.745).abs() < 0.01);

        let saturating = FrictionModel {
            groups: vec![FrictionGroup {
                density: 0.5,
                intercept: 0.9,
                slope_per_fiber: 0.01,
            }],
        };
        assert_eq!(
            epsilon_model(100, 0.5, &saturating).unwrap(),
            EPSILON_CEILING
        );
    }

    #[test]
    fn nearest_group_wins() {
        let model = FrictionModel {
            groups: vec![
                FrictionGroup {
                    density: 0.25,
                    intercept: 0.1,
                    slope_per_fiber: 0.0,
                },
                FrictionGroup {
                    density: 0.75,
                    intercept: 0.3,
                    slope_per_fiber: 0.0,
                },
            ],
        };
        assert_eq!(epsilon_model(10, 0.40, &model).unwrap(), 0.1);
        assert_eq!(epsilon_model(10, 0.60, &model).unwrap(), 0.3);
        assert_eq!(epsilon_model(10, 0.5, &model).unwrap(), 0.1);
    }

    #[test]
    fn curve_examples() {
        let cfg = worked_config();
        let k_j = cfg.k_jammed().unwrap();
        assert_relative_eq!(k_j, 0.059036, max_relative = 2e-4);
        let jammed = predict_curve(
            &cfg,
            JammingState::jammed(90.5).unwrap(),
            PhaseParams::default(),
            0.6353,
            25.0,
            0.5,
        )
        .unwrap();
        assert_eq!(jammed.samples()[0], (0.0, 0.0));
        assert!((jammed.samples()[1].1 - 0.029518).abs() < 1e-5);

        let unjammed = predict_curve(
            &cfg,
            JammingState::Unjammed,
            PhaseParams::default(),
            0.6353,
            25.0,
            0.5,
        )
        .unwrap();
        let at10 = unjammed.samples().iter().find(|s| s.0 == 10.0).unwrap();
        assert!((at10.1 - 0.017367).abs() < 1e-5);
    }

    #[test]
    fn curve_is_continuous_and_monotone() {
        let cfg = worked_config();
        let phases = PhaseParams {
            slip_onset_mm: 1.3,
            transition_window_mm: 0.7,
        };
        let curve = predict_curve(
            &cfg,
            JammingState::jammed(90.0).unwrap(),
            phases,
            0.6,
            6.0,
            0.001,
        )
        .unwrap();
        let s = curve.samples();
        let mut last_slope = f64::INFINITY;
        for w in s.windows(2) {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            assert!(slope > 0.0);
            assert!(slope <= last_slope * (1.0 + 1e-9));
            last_slope = slope;
        }
        // no jump anywhere: increments bounded by k_j·step
        let k_j = cfg.k_jammed().unwrap();
        assert!(s
            .windows(2)
            .all(|w| w[1].1 - w[0].1 <= k_j * (w[1].0 - w[0].0) * (1.0 + 1e-9)));
    }

    #[test]
    fn zero_window_gives_sharp_knee() {
        let cfg = worked_config();
        let phases = PhaseParams {
            slip_onset_mm: 2.0,
            transition_window_mm: 0.0,
        };
        let curve = predict_curve(
            &cfg,
            JammingState::jammed(90.0).unwrap(),
            phases,
            0.5,
            4.0,
            1.0,
        )
        .unwrap();
        let k_j = cfg.k_jammed().unwrap();
        let k_uj = cfg.k_unjammed(0.5).unwrap();
        let last = curve.samples().last().unwrap().1;
        assert_relative_eq!(last, 2.0 * k_j + 2.0 * k_uj, max_relative = 1e-12);
    }

    #[test]
    fn curve_argument_errors() {
        let cfg = worked_config();
        let p = PhaseParams::default();
        assert!(predict_curve(&cfg, JammingState::Unjammed, p, 0.5, 1.0, 2.0).is_err());
        assert!(predict_curve(&cfg, JammingState::Unjammed, p, 0.5, 0.0, 0.1).is_err());
        assert!(predict_curve(&cfg, JammingState::Unjammed, p, 1.0, 1.0, 0.1).is_err());
        assert!(JammingState::jammed(120.0).is_err());
        assert!(JammingState::jammed(-1.0).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = worked_config();
        cfg.validate().unwrap();
        cfg.bundle_radius_mm = 2.5;
        assert!(cfg.validate().is_err());
        let mut cfg = worked_config();
        cfg.fiber_count = 95; // 95 · 0.04 / 4 = 0.95 > π/√12
        assert!(cfg.validate().is_err());
        let mut cfg = worked_config();
        cfg.fiber_count = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_uses_unit_suffixes() {
        let text = serde_json::to_string(&worked_config()).unwrap();
        for key in [
            "fiber_radius_mm",
            "youngs_modulus_mpa",
            "bundle_radius_mm",
            "inner_radius_mm",
            "effective_length_mm",
        ] {
            assert!(text.contains(key), "{key} missing from {text}");
        }
        let back: FjmConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, worked_config());
        let bad = text.replace("fiber_count", "fibre_count");
        assert!(serde_json::from_str::<FjmConfig>(&bad).is_err());
    }
}
