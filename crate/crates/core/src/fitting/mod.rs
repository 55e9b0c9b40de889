//! Stiffness extraction from measured force–deflection curves.
//!
//! A jammed curve is stiff up to the slip knee and soft afterwards; its stiffness
//! is the slope of the initial linear region. An unjammed curve is a single soft
//! line, unless the module is over-fed: crowding then makes it start out nearly
//! as stiff as the jammed state, and that initial segment is discarded.

mod lsq;
pub mod manifest;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::curve::{CurveState, ForceDeflectionCurve};
use crate::error::{FjmError, Result};
use crate::mechanics::{estimate_epsilon, FjmConfig, FrictionGroup, FrictionModel};

pub const MIN_SEGMENT_SAMPLES: usize = 8;
/// A knee is reported only if the two-segment fit cuts the single-line SSE by this fraction.
pub const KNEE_SSE_REDUCTION: f64 = 0.20;
/// Initial-to-later slope ratio at which an unjammed curve counts as over-fed.
pub const OVER_FED_RATIO: f64 = 5.0;
/// Quadratic-vs-linear F statistic above which a region is considered curved (p ≈ 0.001).
const CURVATURE_F_CRIT: f64 = 10.83;
const POINTS_PER_SEGMENT: usize = 4;
/// Largest residual, in noise standard deviations, tolerated inside a linear region.
const RESIDUAL_Z: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFitReport {
    pub state: CurveState,
    pub primary_slope: f64,
    pub secondary_slope: Option<f64>,
    pub knee_deflection: Option<f64>,
    pub over_fed: bool,
    pub residual_rms: f64,
    pub region_used: (f64, f64),
    pub samples_used: usize,
}

/// Sum-of-squares level that counts as exact for data of this magnitude.
fn sse_floor(ys: &[f64]) -> f64 {
    let base = ys[0];
    let scale = ys.iter().fold(0.0f64, |m, y| m.max((y - base).abs()));
    ys.len() as f64 * (1e-9 * scale.max(f64::MIN_POSITIVE)).powi(2)
}

/// Breakpoint of the best continuous two-segment fit, or `None` when a single
/// line explains the curve about as well.
pub fn detect_knee(curve: &ForceDeflectionCurve) -> Result<Option<f64>> {
    if curve.len() < MIN_SEGMENT_SAMPLES {
        return Err(FjmError::InsufficientData(format!(
            "knee detection needs at least {MIN_SEGMENT_SAMPLES} samples, got {}",
            curve.len()
        )));
    }
    let xs = curve.deflections();
    let ys = curve.forces();
    Ok(knee_of(&xs, &ys))
}

fn knee_of(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    let single = lsq::line(xs, ys).sse;
    if single <= sse_floor(ys) {
        return None;
    }
    let lo = POINTS_PER_SEGMENT - 1;
    let hi = n - POINTS_PER_SEGMENT;
    let sse_at = |k: f64| lsq::hinge(xs, ys, k).map_or(f64::INFINITY, |h| h.2);
    let (best_i, _) = (lo..=hi)
        .map(|i| (i, sse_at(xs[i])))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))?;

    // the optimum may sit between samples
    let a = xs[best_i.saturating_sub(1).max(lo)];
    let b = xs[(best_i + 1).min(hi)];
    let (knee, sse) = golden_min(a, b, xs[best_i], &sse_at);
    (sse <= (1.0 - KNEE_SSE_REDUCTION) * single).then_some(knee)
}

/// Golden-section search on [a, b]; `seed` is a known good point kept if nothing beats it.
fn golden_min(a: f64, b: f64, seed: f64, f: &impl Fn(f64) -> f64) -> (f64, f64) {
    let mut best = (seed, f(seed));
    if b <= a {
        return best;
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
        if hi - lo <= 1e-12 * (b - a) {
            break;
        }
    }
    for cand in [(c, fc), (d, fd)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

/// Whether a region is explained by a line as well as by a parabola.
fn looks_linear(xs: &[f64], ys: &[f64]) -> bool {
    let m = xs.len();
    if m <= 3 {
        return true;
    }
    let floor = sse_floor(ys);
    let lin = lsq::line(xs, ys).sse;
    if lin <= floor {
        return true;
    }
    let quad = match lsq::quadratic_sse(xs, ys) {
        Some(q) => q,
        None => return true,
    };
    let f = (lin - quad) / (quad.max(floor) / (m - 3) as f64);
    if f > CURVATURE_F_CRIT {
        return false;
    }
    // a kink near the end of the region escapes the quadratic test
    let fit = lsq::line(xs, ys);
    let limit = (RESIDUAL_Z * noise_scale(xs, ys)).max((floor / m as f64).sqrt());
    xs.iter()
        .zip(ys)
        .all(|(x, y)| (y - fit.intercept - fit.slope * x).abs() <= limit)
}

/// Robust noise level: median deviation of each interior sample from the chord
/// through its neighbours, rescaled to a Gaussian standard deviation.
fn noise_scale(xs: &[f64], ys: &[f64]) -> f64 {
    let mut dev: Vec<f64> = xs
        .windows(3)
        .zip(ys.windows(3))
        .map(|(x, y)| {
            let t = (x[1] - x[0]) / (x[2] - x[0]);
            (y[1] - y[0] - t * (y[2] - y[0])).abs()
        })
        .collect();
    if dev.is_empty() {
        return 0.0;
    }
    dev.sort_by(f64::total_cmp);
    dev[dev.len() / 2] / (0.6745 * 1.5f64.sqrt())
}

/// Longest linear prefix of `[0, end)`, at least `POINTS_PER_SEGMENT` long.
fn linear_prefix(xs: &[f64], ys: &[f64], end: usize) -> usize {
    let min = POINTS_PER_SEGMENT.min(end);
    (min..=end)
        .rev()
        .find(|&m| looks_linear(&xs[..m], &ys[..m]))
        .unwrap_or(min)
}

/// Start of the longest linear suffix of `[start, n)`.
fn linear_suffix(xs: &[f64], ys: &[f64], start: usize) -> usize {
    let n = xs.len();
    let max_start = n.saturating_sub(POINTS_PER_SEGMENT).max(start);
    (start..=max_start)
        .find(|&s| looks_linear(&xs[s..], &ys[s..]))
        .unwrap_or(max_start)
}

struct Region {
    start: usize,
    end: usize,
    fit: lsq::LineFit,
}

impl Region {
    fn new(xs: &[f64], ys: &[f64], start: usize, end: usize) -> Self {
        Region {
            start,
            end,
            fit: lsq::line(&xs[start..end], &ys[start..end]),
        }
    }

    fn rms(&self) -> f64 {
        (self.fit.sse / (self.end - self.start) as f64).sqrt()
    }
}

/// Index split around a knee: `[0, pre_end)` lies at or before it, `[post_start, n)` at or after.
fn split_at_knee(xs: &[f64], knee: f64) -> (usize, usize) {
    let pre_end = xs.partition_point(|&x| x <= knee);
    let post_start = xs.partition_point(|&x| x < knee);
    (
        pre_end.max(POINTS_PER_SEGMENT),
        post_start.min(xs.len() - POINTS_PER_SEGMENT),
    )
}

fn check_state(curve: &ForceDeflectionCurve, expected: CurveState) -> Result<()> {
    match curve.state {
        Some(s) if s != expected => Err(FjmError::invalid(format!(
            "curve is marked {s}, expected {expected}"
        ))),
        _ => Ok(()),
    }
}

fn non_negative(slope: f64, what: &str) -> Result<f64> {
    if slope < 0.0 {
        return Err(FjmError::DegenerateCurve(format!(
            "{what} slope is negative ({slope:.3e})"
        )));
    }
    Ok(slope)
}

fn report(
    state: CurveState,
    xs: &[f64],
    primary: &Region,
    secondary: Option<f64>,
    knee: Option<f64>,
    over_fed: bool,
) -> Result<CurveFitReport> {
    Ok(CurveFitReport {
        state,
        primary_slope: non_negative(primary.fit.slope, "primary")?,
        secondary_slope: secondary.map(|s| s.max(0.0)),
        knee_deflection: knee,
        over_fed,
        residual_rms: primary.rms(),
        region_used: (xs[primary.start], xs[primary.end - 1]),
        samples_used: primary.end - primary.start,
    })
}

/// Pre-slip stiffness of a jammed curve, plus the post-knee slope when a knee exists.
pub fn fit_jammed(curve: &ForceDeflectionCurve) -> Result<CurveFitReport> {
    check_state(curve, CurveState::Jammed)?;
    let knee = detect_knee(curve)?;
    let xs = curve.deflections();
    let ys = curve.forces();
    let n = xs.len();
    match knee {
        None => {
            let whole = Region::new(&xs, &ys, 0, n);
            report(CurveState::Jammed, &xs, &whole, None, None, false)
        }
        Some(k) => {
            let (pre_end, post_start) = split_at_knee(&xs, k);
            let pre = Region::new(&xs, &ys, 0, linear_prefix(&xs, &ys, pre_end));
            let post = Region::new(&xs, &ys, linear_suffix(&xs, &ys, post_start), n);
            report(
                CurveState::Jammed,
                &xs,
                &pre,
                Some(post.fit.slope),
                Some(k),
                false,
            )
        }
    }
}

/// Full-slip stiffness of an unjammed curve, skipping an over-fed initial segment.
pub fn fit_unjammed(curve: &ForceDeflectionCurve) -> Result<CurveFitReport> {
    check_state(curve, CurveState::Unjammed)?;
    let knee = detect_knee(curve)?;
    let xs = curve.deflections();
    let ys = curve.forces();
    let n = xs.len();
    if let Some(k) = knee {
        let (pre_end, post_start) = split_at_knee(&xs, k);
        let pre = Region::new(&xs, &ys, 0, linear_prefix(&xs, &ys, pre_end));
        let post = Region::new(&xs, &ys, linear_suffix(&xs, &ys, post_start), n);
        if post.fit.slope > 0.0 && pre.fit.slope >= OVER_FED_RATIO * post.fit.slope {
            return report(
                CurveState::Unjammed,
                &xs,
                &post,
                Some(pre.fit.slope),
                Some(k),
                true,
            );
        }
    }
    let whole = Region::new(&xs, &ys, 0, n);
    report(CurveState::Unjammed, &xs, &whole, None, knee, false)
}

/// Dispatches on the curve's state marker.
pub fn fit_curve(curve: &ForceDeflectionCurve) -> Result<CurveFitReport> {
    match curve.state {
        Some(CurveState::Jammed) => fit_jammed(curve),
        Some(CurveState::Unjammed) => fit_unjammed(curve),
        None => Err(FjmError::invalid("curve has no jammed/unjammed marker")),
    }
}

/// Stiffness variation ratio from a jammed and an unjammed fit.
pub fn compute_variation(jammed: &CurveFitReport, unjammed: &CurveFitReport) -> Result<f64> {
    variation_from_slopes(jammed.primary_slope, unjammed.primary_slope)
}

pub fn variation_from_slopes(k_jammed: f64, k_unjammed: f64) -> Result<f64> {
    if k_unjammed.is_nan() || k_unjammed <= 0.0 {
        return Err(FjmError::DegenerateCurve(format!(
            "unjammed stiffness {k_unjammed} is not positive"
        )));
    }
    if k_jammed.is_nan() || k_jammed <= 0.0 {
        return Err(FjmError::DegenerateCurve(format!(
            "jammed stiffness {k_jammed} is not positive"
        )));
    }
    Ok(k_jammed / k_unjammed)
}

/// Median primary slope over repeated runs of one configuration.
pub fn median_slope(reports: &[CurveFitReport]) -> Result<f64> {
    if reports.is_empty() {
        return Err(FjmError::InsufficientData("no runs to aggregate".into()));
    }
    let mut slopes: Vec<f64> = reports.iter().map(|r| r.primary_slope).collect();
    slopes.sort_by(f64::total_cmp);
    let mid = slopes.len() / 2;
    Ok(if slopes.len() % 2 == 1 {
        slopes[mid]
    } else {
        0.5 * (slopes[mid - 1] + slopes[mid])
    })
}

/// Density group key: packing density rounded to the nearest percent.
fn density_group(config: &FjmConfig) -> Result<i64> {
    Ok((config.packing_density()? * 100.0).round() as i64)
}

/// Fits ε = a + b·N per packing-density group from measured variation ratios.
pub fn calibrate_friction(pairs: &[(FjmConfig, f64)]) -> Result<FrictionModel> {
    let mut groups: BTreeMap<i64, Vec<(f64, f64)>> = BTreeMap::new();
    for (config, zeta) in pairs {
        config.validate()?;
        let eps = estimate_epsilon(
            *zeta,
            config.bundle_radius_mm,
            config.fiber_count,
            config.fiber.fiber_radius_mm,
        )?;
        groups
            .entry(density_group(config)?)
            .or_default()
            .push((config.fiber_count as f64, eps.epsilon));
    }
    if groups.is_empty() {
        return Err(FjmError::InsufficientData("no calibration pairs".into()));
    }
    let mut model = FrictionModel::default();
    for (key, points) in groups {
        if points.len() < 2 {
            return Err(FjmError::InsufficientData(format!(
                "density group {key}% has {} pair(s), need at least 2",
                points.len()
            )));
        }
        let (ns, eps): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        if ns.iter().all(|&n| n == ns[0]) {
            return Err(FjmError::InsufficientData(format!(
                "density group {key}% needs at least two distinct fiber counts"
            )));
        }
        let fit = lsq::line(&ns, &eps);
        model.groups.push(FrictionGroup {
            density: key as f64 / 100.0,
            intercept: fit.intercept,
            slope_per_fiber: fit.slope,
        });
    }
    Ok(model)
}
