//! Gauss-Legendre rules, a ball-restricted tensor rule, and midpoint sums
//! over boxes.

use crate::geometry::{Grid, Window};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { p0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Nested Gauss-Legendre rule over `{w : |w| < 1, lo <= w <= hi}`.
///
/// Each axis is integrated over the exact chord left by the earlier axes, so
/// the result depends continuously on the box limits.
#[derive(Debug, Clone)]
pub struct BallRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl BallRule {
    pub fn new(points_per_axis: usize) -> Self {
        let (nodes, weights) = gauss_legendre(points_per_axis);
        BallRule { nodes, weights }
    }

    pub fn points_per_axis(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over the unit ball clipped to the box `[lo, hi]`.
    ///
    /// `split`, when given, is a breakpoint for the last axis as a function of
    /// the earlier coordinates; the last-axis interval is divided there so a
    /// kink in the integrand does not spoil convergence.
    pub fn integrate<const N: usize, F>(
        &self,
        lo: &[f64],
        hi: &[f64],
        split: Option<&dyn Fn(&[f64]) -> f64>,
        f: &mut F,
    ) -> [f64; N]
    where
        F: FnMut(&[f64]) -> [f64; N],
    {
        let d = lo.len();
        let mut w = vec![0.0; d];
        let mut acc = [0.0; N];
        self.level(0, 1.0, lo, hi, split, &mut w, 1.0, f, &mut acc);
        acc
    }

    #[allow(clippy::too_many_arguments)]
    fn level<const N: usize, F>(
        &self,
        axis: usize,
        rem: f64,
        lo: &[f64],
        hi: &[f64],
        split: Option<&dyn Fn(&[f64]) -> f64>,
        w: &mut Vec<f64>,
        weight: f64,
        f: &mut F,
        acc: &mut [f64; N],
    ) where
        F: FnMut(&[f64]) -> [f64; N],
    {
        let r = rem.max(0.0).sqrt();
        let a = lo[axis].max(-r);
        let b = hi[axis].min(r);
        if a >= b {
            return;
        }
        let last = axis + 1 == lo.len();
        let mut pieces = [(a, b), (0.0, 0.0)];
        let mut n_pieces = 1;
        if last {
            if let Some(s) = split {
                let t = s(&w[..axis]);
                if t > a && t < b {
                    pieces = [(a, t), (t, b)];
                    n_pieces = 2;
                }
            }
        }
        for &(a, b) in &pieces[..n_pieces] {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, wt) in self.nodes.iter().zip(&self.weights) {
                let v = mid + half * x;
                w[axis] = v;
                let wt = weight * wt * half;
                if last {
                    let vals = f(w);
                    for k in 0..N {
                        acc[k] += wt * vals[k];
                    }
                } else {
                    self.level(axis + 1, rem - v * v, lo, hi, split, w, wt, f, acc);
                }
            }
        }
    }
}

/// Midpoint-rule sum `sum_k f(node_k) * cell_volume` over a grid.
pub fn midpoint_sum(grid: &Grid, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let d = grid.dim();
    let nodes = grid.nodes();
    let vol = grid.cell_volume();
    nodes.chunks_exact(d).map(|u| f(u)).sum::<f64>() * vol
}

/// Per-axis node count for a midpoint rule on `window` that keeps the total
/// node count at most `cap` while using at most `per_axis_max` per axis.
pub fn capped_grid(window: &Window, per_axis_max: usize, cap: usize) -> Grid {
    let d = window.dim();
    let per_axis = (cap as f64).powf(1.0 / d as f64).floor() as usize;
    let per_axis = per_axis.clamp(2, per_axis_max);
    Grid::uniform(window, per_axis).expect("valid grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        for n in [1, 2, 5, 12, 33, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n={n}");
            for k in 0..2 * n {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((q - exact).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn ball_volume() {
        let rule = BallRule::new(64);
        let [area] = rule.integrate(&[-2.0, -2.0], &[2.0, 2.0], None, &mut |_| [1.0]);
        assert!((area - std::f64::consts::PI).abs() < 1e-3);
        // quarter disc
        let [q] = rule.integrate(&[0.0, 0.0], &[2.0, 2.0], None, &mut |_| [1.0]);
        assert!((q - std::f64::consts::PI / 4.0).abs() < 1e-3);
        // kink integrand |w1 + w2| with and without the split
        let exact = 4.0 * 2f64.sqrt() / 3.0;
        let split = |w: &[f64]| -w[0];
        let [s] = rule.integrate(&[-1.0, -1.0], &[1.0, 1.0], Some(&split), &mut |w| {
            [(w[0] + w[1]).abs()]
        });
        assert!((s - exact).abs() < 1e-4, "{s} vs {exact}");
    }

    #[test]
    fn midpoint_sum_of_constant() {
        let w = Window::cube(3, -1.0, 1.0).unwrap();
        let g = Grid::uniform(&w, 7).unwrap();
        assert!((midpoint_sum(&g, |_| 2.0) - 16.0).abs() < 1e-12);
    }
}
