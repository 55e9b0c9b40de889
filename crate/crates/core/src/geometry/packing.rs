use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::construct::best_construction;
use super::known::best_known_ratio;
use super::layout::{CirclePackingLayout, PackingResult};
use super::relax::{biggest_hole, Budget, Relaxer, INFLATION};
use super::HEX_DENSITY;
use crate::error::{FjmError, Result};

/// Search effort and seed for the packing heuristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackingOptions {
    pub seed: u64,
    /// Random restarts per decision (in addition to the warm start).
    pub starts: usize,
    /// Basin-hopping kicks per restart.
    pub hops: usize,
    pub max_iters: usize,
}

impl Default for PackingOptions {
    fn default() -> Self {
        PackingOptions {
            seed: 0,
            starts: 6,
            hops: 40,
            max_iters: 3000,
        }
    }
}

impl PackingOptions {
    pub fn with_seed(seed: u64) -> Self {
        PackingOptions {
            seed,
            ..Default::default()
        }
    }

    fn budget(&self) -> Budget {
        Budget {
            starts: self.starts,
            hops: self.hops,
            max_iters: self.max_iters,
        }
    }

    fn rng(&self, stream: u64, n: usize) -> ChaCha8Rng {
        let key = self
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
            ^ n as u64;
        ChaCha8Rng::seed_from_u64(key)
    }
}

fn check_radius(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(FjmError::invalid(format!(
            "{name} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}

/// Upper bound on how many unit circles fit at this ratio.
fn count_cap(ratio: f64) -> usize {
    if ratio < 2.0 {
        return 1;
    }
    (HEX_DENSITY * ratio * ratio + 1e-9).floor() as usize
}

fn provably_too_many(n: usize, ratio: f64) -> bool {
    match best_known_ratio(n) {
        // table entries are rounded, allow a little slack before ruling out
        Some(known) => ratio < known * (1.0 - 1e-6),
        None => n > count_cap(ratio),
    }
}

fn flatten(centers: &[[f64; 2]]) -> Vec<f64> {
    centers.iter().flat_map(|c| [c[0], c[1]]).collect()
}

fn max_norm(centers: &[[f64; 2]]) -> f64 {
    centers.iter().map(|c| c[0].hypot(c[1])).fold(0.0, f64::max)
}

/// Largest number of fibers of radius `fiber_radius` the solver can place, with a
/// certified layout, inside a circle of radius `container_radius`.
pub fn max_fibers_in_circle(container_radius: f64, fiber_radius: f64) -> Result<PackingResult> {
    max_fibers_in_circle_with(container_radius, fiber_radius, &PackingOptions::default())
}

pub fn max_fibers_in_circle_with(
    container_radius: f64,
    fiber_radius: f64,
    opts: &PackingOptions,
) -> Result<PackingResult> {
    check_radius("container radius", container_radius)?;
    check_radius("fiber radius", fiber_radius)?;
    if container_radius < fiber_radius {
        return Err(FjmError::invalid(format!(
            "container radius {container_radius} is smaller than fiber radius {fiber_radius}"
        )));
    }
    let ratio = container_radius / fiber_radius;
    let unit = best_unit_packing(ratio, opts);
    let layout = CirclePackingLayout {
        container_radius: 1.0,
        circle_radius: 1.0,
        centers: unit,
    }
    .scaled(fiber_radius);
    let layout = CirclePackingLayout {
        container_radius,
        ..layout
    };
    debug_assert!(layout.is_valid());
    Ok(PackingResult::from_layout(layout))
}

/// Unit-circle centres of the best packing found for a container of radius `ratio`.
fn best_unit_packing(ratio: f64, opts: &PackingOptions) -> Vec<[f64; 2]> {
    let constructed = best_construction(ratio);
    let mut current = constructed.clone();
    let budget = opts.budget();
    loop {
        let target = current.len() + 1;
        if provably_too_many(target, ratio) {
            break;
        }
        let mut rng = opts.rng(1, target);
        let mut warm = current.clone();
        warm.push(biggest_hole(&current, ratio, &mut rng));
        let relax = Relaxer::new(target, ratio);
        match relax.solve(Some(&flatten(&warm)), budget, &mut rng) {
            Some(found) => current = found,
            None => break,
        }
        log::debug!("ratio {ratio:.6}: placed {target}");
    }
    // equal counts: keep the more compact layout
    if constructed.len() == current.len() && max_norm(&constructed) <= max_norm(&current) {
        constructed
    } else {
        current
    }
}

/// Smallest container-to-circle radius ratio the solver achieves for `n` equal circles.
pub fn min_enclosing_ratio(n: usize) -> Result<f64> {
    Ok(min_enclosing_layout_with(n, &PackingOptions::default())?.0)
}

pub fn min_enclosing_ratio_with(n: usize, opts: &PackingOptions) -> Result<f64> {
    Ok(min_enclosing_layout_with(n, opts)?.0)
}

/// Smallest ratio found for `n` unit circles together with the witnessing layout.
///
/// The reported ratio carries a relative slack of `3·INFLATION` over the layout's
/// tight enclosing radius so that the packing decision at that ratio stays feasible
/// for the inflated relaxation.
pub fn min_enclosing_layout_with(
    n: usize,
    opts: &PackingOptions,
) -> Result<(f64, CirclePackingLayout)> {
    if n == 0 {
        return Err(FjmError::invalid("circle count must be at least 1"));
    }
    let unit_layout = |ratio: f64, centers: Vec<[f64; 2]>| CirclePackingLayout {
        container_radius: ratio,
        circle_radius: 1.0,
        centers,
    };
    match n {
        1 => return Ok((1.0, unit_layout(1.0, vec![[0.0, 0.0]]))),
        2 => return Ok((2.0, unit_layout(2.0, vec![[-1.0, 0.0], [1.0, 0.0]]))),
        _ => {}
    }

    // feasible starting point from the closed-form constructions
    let mut ratio = 1.0 + (n as f64 / HEX_DENSITY).sqrt();
    let mut best = loop {
        let mut pts = best_construction(ratio);
        if pts.len() >= n {
            pts.sort_by(|a, b| a[0].hypot(a[1]).total_cmp(&b[0].hypot(b[1])));
            pts.truncate(n);
            break pts;
        }
        ratio *= 1.05;
    };
    let mut best_ratio = max_norm(&best) + 1.0;

    let budget = opts.budget();
    let mut rng = opts.rng(2, n);
    let floor = best_known_ratio(n).unwrap_or((n as f64 / HEX_DENSITY).sqrt());
    let mut shrink = 0.02;
    while shrink > 2e-7 && best_ratio > floor * (1.0 + 4.0 * INFLATION) {
        let trial = (best_ratio * (1.0 - shrink)).max(floor * (1.0 + 4.0 * INFLATION));
        let squeeze = (trial - 1.0) / (best_ratio - 1.0);
        let warm: Vec<f64> = best
            .iter()
            .flat_map(|c| [c[0] * squeeze, c[1] * squeeze])
            .collect();
        let relax = Relaxer::new(n, trial);
        match relax.solve(Some(&warm), budget, &mut rng) {
            Some(found) => {
                best_ratio = max_norm(&found) + 1.0;
                best = found;
                shrink = (shrink * 1.5).min(0.05);
            }
            None => shrink *= 0.4,
        }
    }

    let reported = (best_ratio * (1.0 + 3.0 * INFLATION)).max(best_known_ratio(n).unwrap_or(0.0));
    Ok((reported, unit_layout(reported, best)))
}
