use serde::{Deserialize, Serialize};

use crate::error::{FjmError, Result};

/// Relative tolerance used when certifying containment and non-overlap.
pub const CERT_TOL: f64 = 1e-9;

/// Equal circles placed inside a circular container centred at the origin.
///
/// Serializes as `{"container_radius": .., "circle_radius": .., "centers": [[x, y], ..]}`
/// with all lengths in millimetres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CirclePackingLayout {
    pub container_radius: f64,
    pub circle_radius: f64,
    pub centers: Vec<[f64; 2]>,
}

/// Outcome of a certification pass over a layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    /// Largest `|c| - (R - r)` over all centers; positive means protruding.
    pub worst_containment: f64,
    /// Largest `2r - |a - b|` over all pairs; positive means overlapping.
    pub worst_overlap: f64,
    pub tolerance: f64,
}

impl Certificate {
    pub fn is_valid(&self) -> bool {
        self.worst_containment <= self.tolerance && self.worst_overlap <= self.tolerance
    }
}

impl CirclePackingLayout {
    pub fn count(&self) -> usize {
        self.centers.len()
    }

    /// Largest distance from the container centre to a circle centre.
    pub fn max_center_norm(&self) -> f64 {
        self.centers
            .iter()
            .map(|c| c[0].hypot(c[1]))
            .fold(0.0, f64::max)
    }

    /// Radius of the smallest origin-centred container holding every circle.
    pub fn enclosing_radius(&self) -> f64 {
        if self.centers.is_empty() {
            0.0
        } else {
            self.max_center_norm() + self.circle_radius
        }
    }

    pub fn certify(&self) -> Certificate {
        let tol = CERT_TOL * self.container_radius.max(self.circle_radius);
        let reach = self.container_radius - self.circle_radius;
        let worst_containment = self
            .centers
            .iter()
            .map(|c| c[0].hypot(c[1]) - reach)
            .fold(f64::NEG_INFINITY, f64::max);
        let min_dist = 2.0 * self.circle_radius;
        let mut worst_overlap = f64::NEG_INFINITY;
        for (i, a) in self.centers.iter().enumerate() {
            for b in &self.centers[i + 1..] {
                let d = (a[0] - b[0]).hypot(a[1] - b[1]);
                worst_overlap = worst_overlap.max(min_dist - d);
            }
        }
        Certificate {
            worst_containment,
            worst_overlap,
            tolerance: tol,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.certify().is_valid()
    }

    /// Returns an error describing the first violated invariant, if any.
    pub fn validate(&self) -> Result<()> {
        if !(self.container_radius.is_finite() && self.circle_radius.is_finite())
            || self.circle_radius <= 0.0
            || self.container_radius < self.circle_radius
        {
            return Err(FjmError::invalid(format!(
                "layout radii out of range: container {}, circle {}",
                self.container_radius, self.circle_radius
            )));
        }
        let cert = self.certify();
        if cert.worst_containment > cert.tolerance {
            return Err(FjmError::invalid(format!(
                "circle protrudes from container by {:.3e} mm",
                cert.worst_containment
            )));
        }
        if cert.worst_overlap > cert.tolerance {
            return Err(FjmError::invalid(format!(
                "circles overlap by {:.3e} mm",
                cert.worst_overlap
            )));
        }
        Ok(())
    }

    /// Rescales both radii and every centre by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        CirclePackingLayout {
            container_radius: self.container_radius * factor,
            circle_radius: self.circle_radius * factor,
            centers: self
                .centers
                .iter()
                .map(|c| [c[0] * factor, c[1] * factor])
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let layout: Self = serde_json::from_str(text)?;
        layout.validate()?;
        Ok(layout)
    }
}

/// A certified packing together with its density inside the container.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingResult {
    pub count: usize,
    pub layout: CirclePackingLayout,
    pub achieved_density: f64,
}

impl PackingResult {
    pub fn from_layout(layout: CirclePackingLayout) -> Self {
        let count = layout.count();
        let ratio = layout.circle_radius / layout.container_radius;
        PackingResult {
            count,
            achieved_density: count as f64 * ratio * ratio,
            layout,
        }
    }
}
