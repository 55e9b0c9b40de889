use super::HEX_DENSITY;
use crate::error::{FjmError, Result};

/// Cross-sectional area fraction of `n` fibers inside the membrane chamber.
pub fn packing_density(n: usize, fiber_radius: f64, membrane_radius: f64) -> Result<f64> {
    for (name, v) in [
        ("fiber radius", fiber_radius),
        ("membrane radius", membrane_radius),
    ] {
        if !v.is_finite() || v <= 0.0 {
            return Err(FjmError::invalid(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    let q = fiber_radius / membrane_radius;
    let density = n as f64 * q * q;
    if density > 1.0 {
        return Err(FjmError::invalid(format!(
            "{n} fibers of radius {fiber_radius} mm exceed the chamber area (density {density:.4})"
        )));
    }
    Ok(density)
}

/// Fiber count whose packing density is closest to `target_density`.
pub fn fiber_count_for_density(
    target_density: f64,
    fiber_radius: f64,
    membrane_radius: f64,
) -> Result<usize> {
    if !(target_density > 0.0 && target_density <= HEX_DENSITY) {
        return Err(FjmError::invalid(format!(
            "target density {target_density} outside (0, π/√12]"
        )));
    }
    for (name, v) in [
        ("fiber radius", fiber_radius),
        ("membrane radius", membrane_radius),
    ] {
        if !v.is_finite() || v <= 0.0 {
            return Err(FjmError::invalid(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    let q = membrane_radius / fiber_radius;
    let n = (target_density * q * q).round();
    if n < 1.0 {
        return Err(FjmError::invalid(format!(
            "density {target_density} rounds to zero fibers of radius {fiber_radius} mm"
        )));
    }
    Ok(n as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_densities() {
        assert!((packing_density(56, 0.2, 2.0).unwrap() - 0.560).abs() < 1e-12);
        assert_eq!(packing_density(0, 0.2, 2.0).unwrap(), 0.0);
        assert!((packing_density(128, 0.15, 2.0).unwrap() - 0.720).abs() < 1e-12);
        // printed as 71.9% in the source table; the formula gives exactly 72%
        assert!((packing_density(72, 0.2, 2.0).unwrap() - 0.720).abs() < 1e-12);
    }

    #[test]
    fn overfull_chamber_rejected() {
        assert!(packing_density(101, 0.2, 2.0).is_err());
        assert!(packing_density(1, 0.0, 2.0).is_err());
    }

    #[test]
    fn counts_for_density() {
        assert_eq!(fiber_count_for_density(0.56, 0.2, 2.0).unwrap(), 56);
        assert_eq!(fiber_count_for_density(0.45, 0.3, 2.0).unwrap(), 20);
        assert_eq!(fiber_count_for_density(0.72, 0.25, 2.0).unwrap(), 46);
    }

    #[test]
    fn count_errors() {
        assert!(fiber_count_for_density(0.0, 0.2, 2.0).is_err());
        assert!(fiber_count_for_density(0.95, 0.2, 2.0).is_err());
        assert!(fiber_count_for_density(0.01, 1.9, 2.0).is_err());
    }
}
