//! Small dense least-squares fits used by the curve analysis.

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub sse: f64,
}

pub fn line(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    LineFit {
        intercept,
        slope,
        sse,
    }
}

/// Residual sum of squares of the least-squares fit on the given basis columns.
/// Returns the coefficients as well; `None` when the normal matrix is singular.
pub fn basis_fit<const P: usize>(
    xs: &[f64],
    ys: &[f64],
    basis: impl Fn(f64) -> [f64; P],
) -> Option<([f64; P], f64)> {
    let mut ata = [[0.0; P]; P];
    let mut aty = [0.0; P];
    for (&x, &y) in xs.iter().zip(ys) {
        let row = basis(x);
        for i in 0..P {
            aty[i] += row[i] * y;
            for j in 0..P {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let coef = solve(ata, aty)?;
    let sse = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let row = basis(x);
            let pred: f64 = row.iter().zip(&coef).map(|(a, c)| a * c).sum();
            (y - pred) * (y - pred)
        })
        .sum();
    Some((coef, sse))
}

/// Gaussian elimination with partial pivoting.
fn solve<const P: usize>(mut a: [[f64; P]; P], mut b: [f64; P]) -> Option<[f64; P]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..P {
        let pivot = (col..P).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..P {
            let f = a[row][col] / a[col][col];
            for k in col..P {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; P];
    for row in (0..P).rev() {
        let tail: f64 = (row + 1..P).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Continuous two-segment fit with a hinge at `knee`; coordinates are shifted and
/// scaled internally for conditioning.
pub fn hinge(xs: &[f64], ys: &[f64], knee: f64) -> Option<(f64, f64, f64)> {
    let (x0, span) = frame(xs);
    let k = (knee - x0) / span;
    let (c, sse) = basis_fit(xs, ys, |x| {
        let u = (x - x0) / span;
        [1.0, u, (u - k).max(0.0)]
    })?;
    let before = c[1] / span;
    let after = (c[1] + c[2]) / span;
    Some((before, after, sse))
}

/// SSE of a quadratic fit.
pub fn quadratic_sse(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (x0, span) = frame(xs);
    basis_fit(xs, ys, |x| {
        let u = (x - x0) / span;
        [1.0, u, u * u]
    })
    .map(|(_, sse)| sse)
}

fn frame(xs: &[f64]) -> (f64, f64) {
    let lo = xs.first().copied().unwrap_or(0.0);
    let hi = xs.last().copied().unwrap_or(1.0);
    let span = if hi > lo { hi - lo } else { 1.0 };
    (lo, span)
}
