//! Closed-form layouts of unit circles: concentric rings and clipped hexagonal lattices.
//! Both are exact (no iterative relaxation) and serve as certified lower bounds.

use std::f64::consts::PI;

/// Slack admitted when a construction lands exactly on a tight configuration.
const EXACT_SLACK: f64 = 1e-12;

/// Concentric rings working inwards from the container wall, radial gap 2.
pub fn rings(ratio: f64) -> Vec<[f64; 2]> {
    let mut centers = Vec::new();
    let mut orbit = ratio - 1.0;
    let mut ring_index = 0usize;
    while orbit >= -EXACT_SLACK {
        if orbit < 1.0 - EXACT_SLACK {
            centers.push([0.0, 0.0]);
            break;
        }
        let half_angle = (1.0 / orbit).min(1.0).asin();
        let k = (PI / half_angle + 1e-9).floor() as usize;
        // stagger alternate rings; the radial gap alone guarantees separation
        let phase = if ring_index.is_multiple_of(2) {
            0.0
        } else {
            PI / k as f64
        };
        for j in 0..k {
            let a = phase + 2.0 * PI * j as f64 / k as f64;
            centers.push([orbit * a.cos(), orbit * a.sin()]);
        }
        orbit -= 2.0;
        ring_index += 1;
    }
    centers
}

/// Best clipped hexagonal lattice over a few canonical lattice offsets,
/// sorted by distance from the container centre.
pub fn hex_lattice(ratio: f64) -> Vec<[f64; 2]> {
    let reach = ratio - 1.0 + EXACT_SLACK;
    if reach < 0.0 {
        return Vec::new();
    }
    let h = 3f64.sqrt();
    let offsets = [
        [0.0, 0.0],
        [1.0, 0.0],
        [1.0, 1.0 / h],
        [0.5, h / 2.0 - 1.0 / h],
    ];
    let span = (reach / 2.0).ceil() as i64 + 2;
    let mut best: Vec<[f64; 2]> = Vec::new();
    for off in offsets {
        let mut pts = Vec::new();
        for j in -span..=span {
            for i in -2 * span..=2 * span {
                let x = 2.0 * i as f64 + j as f64 - off[0];
                let y = h * j as f64 - off[1];
                if x.hypot(y) <= reach {
                    pts.push([x, y]);
                }
            }
        }
        if pts.len() > best.len() {
            best = pts;
        }
    }
    best.sort_by(|a, b| {
        a[0].hypot(a[1])
            .total_cmp(&b[0].hypot(b[1]))
            .then(a[1].total_cmp(&b[1]))
            .then(a[0].total_cmp(&b[0]))
    });
    best
}

/// The larger of the two constructions.
pub fn best_construction(ratio: f64) -> Vec<[f64; 2]> {
    let r = rings(ratio);
    let h = hex_lattice(ratio);
    if h.len() > r.len() {
        h
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::layout::CirclePackingLayout;

    fn check(ratio: f64, centers: Vec<[f64; 2]>) -> usize {
        let layout = CirclePackingLayout {
            container_radius: ratio,
            circle_radius: 1.0,
            centers,
        };
        layout.validate().unwrap();
        layout.count()
    }

    #[test]
    fn tight_small_cases() {
        assert_eq!(check(1.0, rings(1.0)), 1);
        assert_eq!(check(2.0, rings(2.0)), 2);
        assert_eq!(check(3.0, rings(3.0)), 7);
        assert_eq!(check(3.0, hex_lattice(3.0)), 7);
        assert_eq!(
            check(1.0 + 2.0 / 3f64.sqrt(), rings(1.0 + 2.0 / 3f64.sqrt())),
            3
        );
    }

    #[test]
    fn constructions_are_valid_over_a_range() {
        let mut ratio = 1.0;
        while ratio < 14.0 {
            check(ratio, rings(ratio));
            check(ratio, hex_lattice(ratio));
            ratio += 0.137;
        }
    }
}
