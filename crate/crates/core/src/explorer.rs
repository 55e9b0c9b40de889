//! Configuration tables, design-space sweeps and constrained selection.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{FjmError, Result};
use crate::geometry::{
    fiber_count_for_density, max_fibers_in_circle_with, packing_density, PackingOptions,
    HEX_DENSITY,
};
use crate::mechanics::{
    epsilon_model, FiberSpec, FjmConfig, FrictionModel, MembraneSpec, StiffnessReport,
};

pub const DEFAULT_BUNDLE_FRACTIONS: [f64; 4] = [0.95, 0.85, 0.75, 0.65];
pub const DEFAULT_FIBER_DIAMETERS_MM: [f64; 4] = [0.3, 0.4, 0.5, 0.6];
pub const DEFAULT_DENSITIES: [f64; 4] = [0.33, 0.45, 0.56, 0.72];
/// Fraction of the bundle cross-section occupied by fibers.
pub const DEFAULT_FILL_FACTOR: f64 = 0.79;
/// Densities below this lie outside the range the bundled friction calibration covers.
pub const CALIBRATED_DENSITY_FLOOR: f64 = 0.45;

pub const TABLE_CSV_HEADER: &str =
    "bundle_diameter_mm,bundle_fraction,fiber_diameter_mm,fiber_count,packing_density";
pub const SWEEP_CSV_HEADER: &str = "fiber_diameter_mm,density,fiber_count,k_jammed_n_per_mm,k_unjammed_n_per_mm,zeta,epsilon,feasible";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub bundle_fraction: f64,
    pub bundle_diameter_mm: f64,
    pub fiber_diameter_mm: f64,
    pub fiber_count: usize,
    pub packing_density: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ConfigTable {
    pub rows: Vec<TableRow>,
    /// Skipped (fraction, diameter) pairs with the reason.
    pub warnings: Vec<String>,
}

impl ConfigTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(TABLE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.bundle_diameter_mm,
                r.bundle_fraction,
                r.fiber_diameter_mm,
                r.fiber_count,
                r.packing_density
            );
        }
        out
    }
}

/// Fiber counts that fit each bundle fraction of the membrane, fraction-major.
pub fn generate_table(
    membrane: &MembraneSpec,
    bundle_fractions: &[f64],
    fiber_diameters: &[f64],
    opts: &PackingOptions,
) -> Result<ConfigTable> {
    membrane.validate()?;
    let membrane_diameter = 2.0 * membrane.inner_radius_mm;
    for &f in bundle_fractions {
        if !(f > 0.0 && f <= 1.0) {
            return Err(FjmError::invalid(format!(
                "bundle fraction {f} outside (0, 1]"
            )));
        }
    }
    for &d in fiber_diameters {
        if !(d > 0.0 && d < membrane_diameter) {
            return Err(FjmError::invalid(format!(
                "fiber diameter {d} mm must be positive and below the membrane diameter {membrane_diameter} mm"
            )));
        }
    }
    let mut table = ConfigTable::default();
    for &fraction in bundle_fractions {
        let bundle_radius = fraction * membrane.inner_radius_mm;
        for &diameter in fiber_diameters {
            let fiber_radius = diameter / 2.0;
            if fiber_radius > bundle_radius {
                let msg = format!(
                    "skipped {diameter} mm fibers: larger than the {:.3} mm bundle",
                    2.0 * bundle_radius
                );
                log::warn!("{msg}");
                table.warnings.push(msg);
                continue;
            }
            let packing = max_fibers_in_circle_with(bundle_radius, fiber_radius, opts)?;
            table.rows.push(TableRow {
                bundle_fraction: fraction,
                bundle_diameter_mm: 2.0 * bundle_radius,
                fiber_diameter_mm: diameter,
                fiber_count: packing.count,
                packing_density: packing_density(
                    packing.count,
                    fiber_radius,
                    membrane.inner_radius_mm,
                )?,
            });
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub fiber_diameters_mm: Vec<f64>,
    pub densities: Vec<f64>,
    pub membrane: MembraneSpec,
    pub youngs_modulus_mpa: f64,
    pub friction: FrictionModel,
    pub fill_factor: f64,
}

impl SweepGrid {
    /// Default diameters/densities in a membrane of the given radius with the bundled friction model.
    pub fn standard(membrane: MembraneSpec, youngs_modulus_mpa: f64) -> Self {
        SweepGrid {
            fiber_diameters_mm: DEFAULT_FIBER_DIAMETERS_MM.to_vec(),
            densities: DEFAULT_DENSITIES.to_vec(),
            membrane,
            youngs_modulus_mpa,
            friction: FrictionModel::bundled(),
            fill_factor: DEFAULT_FILL_FACTOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fiber_diameters_mm.is_empty() || self.densities.is_empty() {
            return Err(FjmError::invalid("sweep grid axes must be non-empty"));
        }
        self.membrane.validate()?;
        if self
            .fiber_diameters_mm
            .iter()
            .any(|d| !(d.is_finite() && *d > 0.0))
        {
            return Err(FjmError::invalid("fiber diameters must be positive"));
        }
        if self.densities.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(FjmError::invalid("densities must be positive"));
        }
        if !(self.youngs_modulus_mpa.is_finite() && self.youngs_modulus_mpa > 0.0) {
            return Err(FjmError::invalid("youngs modulus must be positive"));
        }
        if !(self.fill_factor > 0.0 && self.fill_factor <= HEX_DENSITY) {
            return Err(FjmError::invalid(format!(
                "fill factor {} outside (0, π/√12]",
                self.fill_factor
            )));
        }
        if self.friction.groups.is_empty() {
            return Err(FjmError::Configuration(
                "friction model has no groups".into(),
            ));
        }
        Ok(())
    }
}

/// One evaluated grid cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignPoint {
    pub fiber_diameter_mm: f64,
    pub density: f64,
    pub config: Option<FjmConfig>,
    pub report: Option<StiffnessReport>,
    pub infeasible_reason: Option<String>,
    pub outside_calibration: bool,
}

impl DesignPoint {
    pub fn is_feasible(&self) -> bool {
        self.report.is_some()
    }

    pub fn fiber_count(&self) -> Option<usize> {
        self.config.as_ref().map(|c| c.fiber_count)
    }

    fn infeasible(
        fiber_diameter_mm: f64,
        density: f64,
        config: Option<FjmConfig>,
        why: String,
    ) -> Self {
        DesignPoint {
            fiber_diameter_mm,
            density,
            config,
            report: None,
            infeasible_reason: Some(why),
            outside_calibration: density < CALIBRATED_DENSITY_FLOOR,
        }
    }
}

fn evaluate_cell(
    grid: &SweepGrid,
    diameter: f64,
    density: f64,
    length: f64,
    load_constant: f64,
) -> Result<DesignPoint> {
    if density > HEX_DENSITY {
        return Ok(DesignPoint::infeasible(
            diameter,
            density,
            None,
            "density above hexagonal bound".into(),
        ));
    }
    let fiber_radius = diameter / 2.0;
    let membrane = MembraneSpec {
        effective_length_mm: length,
        ..grid.membrane
    };
    let n = match fiber_count_for_density(density, fiber_radius, membrane.inner_radius_mm) {
        Ok(n) => n,
        Err(e) => {
            return Ok(DesignPoint::infeasible(
                diameter,
                density,
                None,
                e.to_string(),
            ))
        }
    };
    let bundle_radius = membrane.inner_radius_mm * (density / grid.fill_factor).sqrt();
    let config = FjmConfig {
        fiber: FiberSpec::new(fiber_radius, grid.youngs_modulus_mpa)?,
        fiber_count: n,
        bundle_radius_mm: bundle_radius,
        membrane,
        load_constant,
    };
    if fiber_radius > bundle_radius {
        return Ok(DesignPoint::infeasible(
            diameter,
            density,
            Some(config),
            "fiber wider than bundle".into(),
        ));
    }
    if let Err(e) = config.validate() {
        return Ok(DesignPoint::infeasible(
            diameter,
            density,
            Some(config),
            e.to_string(),
        ));
    }
    let epsilon = epsilon_model(n, density, &grid.friction)?;
    let report = config.stiffness_report(epsilon)?;
    Ok(DesignPoint {
        fiber_diameter_mm: diameter,
        density,
        config: Some(config),
        report: Some(report),
        infeasible_reason: None,
        outside_calibration: density < CALIBRATED_DENSITY_FLOOR,
    })
}

/// Evaluates every (density, diameter) cell; density-major, then diameter.
pub fn sweep(grid: &SweepGrid, length: f64, load_constant: f64) -> Result<Vec<DesignPoint>> {
    grid.validate()?;
    if !(length.is_finite() && length > 0.0) {
        return Err(FjmError::invalid(format!(
            "length must be positive, got {length}"
        )));
    }
    if !(load_constant.is_finite() && load_constant > 0.0) {
        return Err(FjmError::invalid(format!(
            "load constant must be positive, got {load_constant}"
        )));
    }
    let mut points = Vec::with_capacity(grid.densities.len() * grid.fiber_diameters_mm.len());
    for &density in &grid.densities {
        for &diameter in &grid.fiber_diameters_mm {
            points.push(evaluate_cell(
                grid,
                diameter,
                density,
                length,
                load_constant,
            )?);
        }
    }
    Ok(points)
}

pub fn sweep_to_csv(points: &[DesignPoint]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for p in points {
        let count = p.fiber_count().map(|n| n.to_string()).unwrap_or_default();
        match &p.report {
            Some(r) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},true",
                    p.fiber_diameter_mm,
                    p.density,
                    count,
                    r.k_jammed,
                    r.k_unjammed,
                    r.zeta,
                    r.epsilon
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "{},{},{},,,,,false",
                    p.fiber_diameter_mm, p.density, count
                );
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraints {
    pub min_jammed_stiffness: Option<f64>,
    pub min_variation_ratio: Option<f64>,
    pub max_density: Option<f64>,
}

impl Constraints {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named() {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(FjmError::invalid(format!(
                        "{name} must be positive, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, Option<f64>); 3] {
        [
            ("min_jammed_stiffness", self.min_jammed_stiffness),
            ("min_variation_ratio", self.min_variation_ratio),
            ("max_density", self.max_density),
        ]
    }

    fn rejects(name: &str, bound: f64, p: &DesignPoint, r: &StiffnessReport) -> bool {
        match name {
            "min_jammed_stiffness" => r.k_jammed < bound,
            "min_variation_ratio" => r.zeta < bound,
            _ => p.density > bound,
        }
    }

    pub fn admits(&self, p: &DesignPoint) -> bool {
        let Some(r) = &p.report else { return false };
        self.named()
            .iter()
            .all(|(name, bound)| bound.is_none_or(|b| !Self::rejects(name, b, p, r)))
    }
}

/// Feasible point with the largest ζ meeting every constraint; ties go to the larger
/// jammed stiffness, then to fewer fibers.
pub fn select_optimal(points: &[DesignPoint], constraints: &Constraints) -> Result<DesignPoint> {
    constraints.validate()?;
    let feasible: Vec<&DesignPoint> = points.iter().filter(|p| p.is_feasible()).collect();
    if feasible.is_empty() {
        return Err(FjmError::NoFeasibleDesign {
            binding: vec!["no feasible grid cells".into()],
        });
    }
    let best = feasible
        .iter()
        .filter(|p| constraints.admits(p))
        .copied()
        .reduce(|a, b| if better(b, a) { b } else { a });
    match best {
        Some(p) => Ok(p.clone()),
        None => {
            let binding = constraints
                .named()
                .iter()
                .filter_map(|(name, bound)| {
                    let b = (*bound)?;
                    let rejected = feasible
                        .iter()
                        .filter(|p| point_rejects(name, b, p))
                        .count();
                    (rejected > 0)
                        .then(|| format!("{name} = {b} rejects {rejected}/{}", feasible.len()))
                })
                .collect();
            Err(FjmError::NoFeasibleDesign { binding })
        }
    }
}

fn point_rejects(name: &str, bound: f64, p: &DesignPoint) -> bool {
    p.report
        .as_ref()
        .is_none_or(|r| Constraints::rejects(name, bound, p, r))
}

/// Strict preference of `a` over `b`.
fn better(a: &DesignPoint, b: &DesignPoint) -> bool {
    let (ra, rb) = (a.report.as_ref().unwrap(), b.report.as_ref().unwrap());
    ra.zeta
        .total_cmp(&rb.zeta)
        .then(ra.k_jammed.total_cmp(&rb.k_jammed))
        .then(b.fiber_count().cmp(&a.fiber_count()))
        .is_gt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanics::{variation_ratio, FrictionGroup};

    fn grid() -> SweepGrid {
        SweepGrid::standard(MembraneSpec::with_radius(2.0), 3000.0)
    }

    #[test]
    fn standard_grid_is_fully_feasible() {
        let points = sweep(&grid(), 100.0, 1.0 / 3.0).unwrap();
        assert_eq!(points.len(), 16);
        assert!(points.iter().all(DesignPoint::is_feasible));
        // density-major ordering
        assert_eq!(
            (points[0].density, points[0].fiber_diameter_mm),
            (0.33, 0.3)
        );
        assert_eq!(
            (points[1].density, points[1].fiber_diameter_mm),
            (0.33, 0.4)
        );
        assert_eq!(
            (points[4].density, points[4].fiber_diameter_mm),
            (0.45, 0.3)
        );
        let cell = points
            .iter()
            .find(|p| p.density == 0.56 && p.fiber_diameter_mm == 0.4)
            .unwrap();
        assert_eq!(cell.fiber_count(), Some(56));
        let zeta = cell.report.unwrap().zeta;
        assert!((zeta / 34.0 - 1.0).abs() < 0.05, "ζ = {zeta}");
    }

    #[test]
    fn points_are_self_consistent() {
        for p in sweep(&grid(), 100.0, 1.0 / 3.0).unwrap() {
            let c = p.config.as_ref().unwrap();
            let r = p.report.unwrap();
            let z = variation_ratio(
                c.bundle_radius_mm,
                c.fiber_count,
                c.fiber.fiber_radius_mm,
                r.epsilon,
            )
            .unwrap();
            assert!((r.zeta / z - 1.0).abs() < 1e-9);
            assert!((r.k_jammed / r.k_unjammed / r.zeta - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_cell_matches_direct_mechanics() {
        let mut g = grid();
        g.fiber_diameters_mm = vec![0.4];
        g.densities = vec![0.56];
        let p = &sweep(&g, 100.0, 1.0 / 3.0).unwrap()[0];
        let c = p.config.as_ref().unwrap();
        let eps = epsilon_model(56, 0.56, &FrictionModel::bundled()).unwrap();
        assert_eq!(p.report.unwrap(), c.stiffness_report(eps).unwrap());
    }

    #[test]
    fn infeasible_cells_are_kept() {
        let mut g = grid();
        g.densities = vec![0.56, 0.85, 0.95];
        let points = sweep(&g, 100.0, 1.0 / 3.0).unwrap();
        assert_eq!(points.len(), 12);
        // 0.85 needs a bundle wider than the membrane at fill 0.79; 0.95 exceeds π/√12
        assert!(points[4..].iter().all(|p| !p.is_feasible()));
        let csv = sweep_to_csv(&points);
        assert_eq!(csv.lines().count(), 13);
        assert!(csv.lines().last().unwrap().ends_with(",,,,,false"));
    }

    #[test]
    fn empty_axis_rejected() {
        let mut g = grid();
        g.densities.clear();
        assert!(sweep(&g, 100.0, 1.0 / 3.0).is_err());
    }

    #[test]
    fn unconstrained_optimum_is_global_max() {
        let points = sweep(&grid(), 100.0, 1.0 / 3.0).unwrap();
        let best = select_optimal(&points, &Constraints::default()).unwrap();
        let max = points
            .iter()
            .map(|p| p.report.unwrap().zeta)
            .fold(0.0, f64::max);
        assert_eq!(best.report.unwrap().zeta, max);
        assert_eq!(best.fiber_diameter_mm, 0.3);
    }

    #[test]
    fn impossible_constraint_reports_binding() {
        let points = sweep(&grid(), 100.0, 1.0 / 3.0).unwrap();
        let c = Constraints {
            min_variation_ratio: Some(1e6),
            ..Default::default()
        };
        match select_optimal(&points, &c) {
            Err(FjmError::NoFeasibleDesign { binding }) => {
                assert_eq!(binding.len(), 1);
                assert!(binding[0].starts_with("min_variation_ratio"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(select_optimal(
            &points,
            &Constraints {
                max_density: Some(-1.0),
                ..Default::default()
            }
        )
        .is_err());
    }

    #[test]
    fn ties_prefer_stiffer_then_fewer() {
        let points = sweep(&grid(), 100.0, 1.0 / 3.0).unwrap();
        let mut a = points[0].clone();
        let mut b = points[1].clone();
        let mut ra = a.report.unwrap();
        let mut rb = b.report.unwrap();
        ra.zeta = 10.0;
        rb.zeta = 10.0;
        ra.k_jammed = 1.0;
        rb.k_jammed = 2.0;
        a.report = Some(ra);
        b.report = Some(rb);
        let pick = select_optimal(&[a.clone(), b.clone()], &Constraints::default()).unwrap();
        assert_eq!(pick, b);
        rb.k_jammed = 1.0;
        b.report = Some(rb);
        // equal ζ and k_j: fewer fibers wins (0.4 mm cell has fewer than 0.3 mm)
        let pick = select_optimal(&[a, b.clone()], &Constraints::default()).unwrap();
        assert_eq!(pick, b);
    }

    #[test]
    fn table_examples() {
        let m = MembraneSpec::with_radius(2.0);
        let opts = PackingOptions::default();
        let t = generate_table(&m, &[0.85], &[0.4], &opts).unwrap();
        let row = &t.rows[0];
        assert!(
            (row.fiber_count as f64 / 56.0 - 1.0).abs() <= 0.05,
            "{row:?}"
        );
        assert!((row.packing_density - 0.56).abs() <= 0.03);
        let t = generate_table(&m, &[0.65], &[0.6], &opts).unwrap();
        assert!(t.rows[0].fiber_count.abs_diff(15) <= 1, "{:?}", t.rows[0]);
    }

    #[test]
    fn oversize_fiber_skipped_with_warning() {
        let m = MembraneSpec::with_radius(2.0);
        let t = generate_table(&m, &[0.1], &[0.3, 0.5], &PackingOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.warnings.len(), 1);
        assert!(generate_table(&m, &[1.2], &[0.3], &PackingOptions::default()).is_err());
        assert!(generate_table(&m, &[0.5], &[4.0], &PackingOptions::default()).is_err());
    }

    #[test]
    fn zero_friction_prefers_small_fibers() {
        let mut g = grid();
        g.friction = FrictionModel {
            groups: vec![FrictionGroup {
                density: 0.5,
                intercept: 0.0,
                slope_per_fiber: 0.0,
            }],
        };
        let points = sweep(&g, 100.0, 1.0 / 3.0).unwrap();
        for row in points.chunks(4) {
            for w in row.windows(2) {
                assert!(w[0].report.unwrap().zeta > w[1].report.unwrap().zeta);
            }
        }
    }
}
