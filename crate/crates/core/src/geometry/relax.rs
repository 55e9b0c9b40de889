//! Penalty relaxation for the decision problem "do `n` unit circles fit in a
//! container of radius `ratio`?".
//!
//! Overlaps and protrusions are penalised quadratically and minimised with
//! L-BFGS; stuck configurations are kicked by relocating the worst offenders
//! (monotonic basin hopping). Circles are inflated by [`INFLATION`] during the
//! search so an accepted configuration clears the exact constraints with margin.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const INFLATION: f64 = 1e-7;

/// Energy below which the relaxed configuration counts as overlap-free.
const FEASIBLE_ENERGY: f64 = 1e-24;
const LBFGS_MEMORY: usize = 8;

/// Effort spent on one decision.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub starts: usize,
    pub hops: usize,
    pub max_iters: usize,
}

pub struct Relaxer {
    n: usize,
    radius: f64,
    reach: f64,
    ratio: f64,
}

impl Relaxer {
    pub fn new(n: usize, ratio: f64) -> Self {
        let radius = 1.0 + INFLATION;
        Relaxer {
            n,
            radius,
            reach: ratio - radius,
            ratio,
        }
    }

    /// Penalty energy and its gradient; `x` holds interleaved coordinates.
    pub fn energy(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let diam = 2.0 * self.radius;
        let diam2 = diam * diam;
        let mut e = 0.0;
        for i in 0..self.n {
            let (xi, yi) = (x[2 * i], x[2 * i + 1]);
            let norm = xi.hypot(yi);
            let out = norm - self.reach;
            if out > 0.0 {
                e += out * out;
                let s = 2.0 * out / norm;
                grad[2 * i] += s * xi;
                grad[2 * i + 1] += s * yi;
            }
            for j in (i + 1)..self.n {
                let dx = xi - x[2 * j];
                if dx.abs() >= diam {
                    continue;
                }
                let dy = yi - x[2 * j + 1];
                let d2 = dx * dx + dy * dy;
                if d2 >= diam2 {
                    continue;
                }
                let d = d2.sqrt().max(1e-300);
                let o = diam - d;
                e += o * o;
                let s = 2.0 * o / d;
                grad[2 * i] -= s * dx;
                grad[2 * i + 1] -= s * dy;
                grad[2 * j] += s * dx;
                grad[2 * j + 1] += s * dy;
            }
        }
        e
    }

    /// Per-circle violation used to pick which circles to relocate.
    fn violations(&self, x: &[f64]) -> Vec<f64> {
        let diam = 2.0 * self.radius;
        let mut v = vec![0.0; self.n];
        for i in 0..self.n {
            let norm = x[2 * i].hypot(x[2 * i + 1]);
            v[i] += (norm - self.reach).max(0.0);
            for j in (i + 1)..self.n {
                let d = (x[2 * i] - x[2 * j]).hypot(x[2 * i + 1] - x[2 * j + 1]);
                let o = (diam - d).max(0.0);
                v[i] += o;
                v[j] += o;
            }
        }
        v
    }

    /// Minimises the penalty in place with L-BFGS and returns the final energy.
    pub fn minimize(&self, x: &mut [f64], max_iters: usize) -> f64 {
        let dim = x.len();
        let mut g = vec![0.0; dim];
        let mut e = self.energy(x, &mut g);
        let mut s_hist: Vec<Vec<f64>> = Vec::with_capacity(LBFGS_MEMORY);
        let mut y_hist: Vec<Vec<f64>> = Vec::with_capacity(LBFGS_MEMORY);
        let mut rho_hist: Vec<f64> = Vec::with_capacity(LBFGS_MEMORY);
        let mut dir = vec![0.0; dim];
        let mut x_new = vec![0.0; dim];
        let mut g_new = vec![0.0; dim];
        let mut alpha = [0.0; LBFGS_MEMORY];
        let mut stall = 0usize;

        for _ in 0..max_iters {
            if e <= FEASIBLE_ENERGY {
                break;
            }
            // two-loop recursion
            dir.copy_from_slice(&g);
            let m = s_hist.len();
            for k in (0..m).rev() {
                alpha[k] = rho_hist[k] * dot(&s_hist[k], &dir);
                axpy(-alpha[k], &y_hist[k], &mut dir);
            }
            let gamma = if m > 0 {
                dot(&s_hist[m - 1], &y_hist[m - 1]) / dot(&y_hist[m - 1], &y_hist[m - 1])
            } else {
                0.1 / norm_inf(&g).max(1e-12)
            };
            dir.iter_mut().for_each(|d| *d *= gamma);
            for k in 0..m {
                let beta = rho_hist[k] * dot(&y_hist[k], &dir);
                axpy(alpha[k] - beta, &s_hist[k], &mut dir);
            }
            dir.iter_mut().for_each(|d| *d = -*d);
            let mut slope = dot(&g, &dir);
            if slope >= 0.0 {
                // not a descent direction; restart from steepest descent
                s_hist.clear();
                y_hist.clear();
                rho_hist.clear();
                let scale = 0.1 / norm_inf(&g).max(1e-12);
                for (d, gi) in dir.iter_mut().zip(&g) {
                    *d = -scale * gi;
                }
                slope = dot(&g, &dir);
            }

            let mut step = 1.0;
            let mut accepted = false;
            let mut e_new = e;
            for _ in 0..40 {
                for k in 0..dim {
                    x_new[k] = x[k] + step * dir[k];
                }
                e_new = self.energy(&x_new, &mut g_new);
                if e_new <= e + 1e-4 * step * slope {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }

            if s_hist.len() == LBFGS_MEMORY {
                s_hist.remove(0);
                y_hist.remove(0);
                rho_hist.remove(0);
            }
            let s: Vec<f64> = x_new.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g_new.iter().zip(g.iter()).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-20 {
                rho_hist.push(1.0 / sy);
                s_hist.push(s);
                y_hist.push(y);
            }

            let decrease = e - e_new;
            x.copy_from_slice(&x_new);
            g.copy_from_slice(&g_new);
            e = e_new;
            if decrease <= 1e-13 * e {
                stall += 1;
                if stall > 20 {
                    break;
                }
            } else {
                stall = 0;
            }
            if norm_inf(&g) < 1e-14 {
                break;
            }
        }
        e
    }

    /// Uniform random point of the disk of admissible centres.
    fn random_center(&self, rng: &mut ChaCha8Rng) -> [f64; 2] {
        let r = self.reach.max(0.0) * rng.gen::<f64>().sqrt();
        let a = rng.gen::<f64>() * std::f64::consts::TAU;
        [r * a.cos(), r * a.sin()]
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x = Vec::with_capacity(2 * self.n);
        for _ in 0..self.n {
            let c = self.random_center(rng);
            x.extend_from_slice(&c);
        }
        x
    }

    fn perturb(&self, x: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut y = x.to_vec();
        let v = self.violations(x);
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
        let movers = 1 + rng.gen_range(0..3.min(self.n));
        for &i in order.iter().take(movers) {
            let c = self.random_center(rng);
            y[2 * i] = c[0];
            y[2 * i + 1] = c[1];
        }
        let jitter = 0.05 * rng.gen::<f64>();
        for yi in y.iter_mut() {
            *yi += jitter * (rng.gen::<f64>() - 0.5);
        }
        y
    }

    /// Attempts to find an overlap-free configuration.
    pub fn solve(
        &self,
        warm: Option<&[f64]>,
        budget: Budget,
        rng: &mut ChaCha8Rng,
    ) -> Option<Vec<[f64; 2]>> {
        if self.reach < 0.0 {
            return None;
        }
        for start in 0..budget.starts.max(1) {
            let mut x = match warm {
                Some(w) if start == 0 => w.to_vec(),
                _ => self.random_start(rng),
            };
            let mut e = self.minimize(&mut x, budget.max_iters);
            if e <= FEASIBLE_ENERGY {
                return self.accept(&x);
            }
            for _ in 0..budget.hops {
                let mut y = self.perturb(&x, rng);
                let e_new = self.minimize(&mut y, budget.max_iters);
                if e_new <= FEASIBLE_ENERGY {
                    return self.accept(&y);
                }
                if e_new < e {
                    x = y;
                    e = e_new;
                }
            }
        }
        None
    }

    fn accept(&self, x: &[f64]) -> Option<Vec<[f64; 2]>> {
        let centers: Vec<[f64; 2]> = x.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        // exact constraints at the real (uninflated) radius
        let reach = self.ratio - 1.0;
        let ok_wall = centers.iter().all(|c| c[0].hypot(c[1]) <= reach);
        let ok_pairs = centers.iter().enumerate().all(|(i, a)| {
            centers[i + 1..]
                .iter()
                .all(|b| (a[0] - b[0]).hypot(a[1] - b[1]) >= 2.0)
        });
        (ok_wall && ok_pairs).then_some(centers)
    }
}

/// Largest empty spot (approximately): the sampled admissible point farthest from
/// every existing centre.
pub fn biggest_hole(centers: &[[f64; 2]], ratio: f64, rng: &mut ChaCha8Rng) -> [f64; 2] {
    let reach = (ratio - 1.0).max(0.0);
    let mut best = [0.0, 0.0];
    let mut best_gap = f64::NEG_INFINITY;
    let samples = 400 + 20 * centers.len();
    for _ in 0..samples {
        let r = reach * rng.gen::<f64>().sqrt();
        let a = rng.gen::<f64>() * std::f64::consts::TAU;
        let p = [r * a.cos(), r * a.sin()];
        let gap = centers
            .iter()
            .map(|c| (c[0] - p[0]).hypot(c[1] - p[1]))
            .fold(f64::INFINITY, f64::min);
        if gap > best_gap {
            best_gap = gap;
            best = p;
        }
    }
    best
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}
