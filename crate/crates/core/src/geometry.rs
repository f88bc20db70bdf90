//! Axis-aligned observation windows and regular cell-centred grids.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed axis-aligned box `[lower, upper]` in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWindow", into = "RawWindow")]
pub struct Window {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawWindow {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawWindow> for Window {
    type Error = Error;

    fn try_from(raw: RawWindow) -> Result<Self> {
        Window::new(raw.lower, raw.upper)
    }
}

impl From<Window> for RawWindow {
    fn from(w: Window) -> Self {
        RawWindow {
            lower: w.lower,
            upper: w.upper,
        }
    }
}

impl Window {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidWindow("dimension must be at least 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidWindow(format!(
                    "axis {j}: lower {lo} must be strictly below upper {hi}"
                )));
            }
        }
        Ok(Window { lower, upper })
    }

    /// The cube `[lo, hi]^d`.
    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Window::new(vec![lo; d], vec![hi; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn min_side(&self) -> f64 {
        (0..self.dim()).map(|j| self.side(j)).fold(f64::INFINITY, f64::min)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|j| self.side(j)).product()
    }

    /// Shrinks every face inwards by `r`.
    ///
    /// For a box this is erosion by the max-norm ball of radius `r`, which
    /// contains the Euclidean ball of the same radius.
    pub fn erode(&self, r: f64) -> Result<Window> {
        assert!(r >= 0.0, "erosion radius must be non-negative");
        let min_side = self.min_side();
        if 2.0 * r >= min_side {
            return Err(Error::EmptyErosion {
                radius: r,
                min_side,
            });
        }
        Ok(Window {
            lower: self.lower.iter().map(|x| x + r).collect(),
            upper: self.upper.iter().map(|x| x - r).collect(),
        })
    }

    pub fn dilate(&self, r: f64) -> Window {
        assert!(r >= 0.0, "dilation radius must be non-negative");
        Window {
            lower: self.lower.iter().map(|x| x - r).collect(),
            upper: self.upper.iter().map(|x| x + r).collect(),
        }
    }

    /// Closed-box membership: boundary points are inside.
    pub fn contains(&self, u: &[f64]) -> bool {
        debug_assert_eq!(u.len(), self.dim());
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    pub fn translate(&self, shift: &[f64]) -> Window {
        Window {
            lower: self.lower.iter().zip(shift).map(|(x, s)| x + s).collect(),
            upper: self.upper.iter().zip(shift).map(|(x, s)| x + s).collect(),
        }
    }

    pub fn uniform_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut u = vec![0.0; self.dim()];
        self.uniform_sample_into(rng, &mut u);
        u
    }

    pub fn uniform_sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for (j, x) in out.iter_mut().enumerate() {
            *x = self.lower[j] + rng.random::<f64>() * self.side(j);
        }
    }

    /// Compact `lo1,lo2..hi1,hi2` form used in pattern-file headers and the CLI.
    pub fn to_compact(&self) -> String {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("{}..{}", join(&self.lower), join(&self.upper))
    }

    pub fn from_compact(s: &str) -> Result<Window> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| Error::parse("window", format!("expected `lower..upper`, got `{s}`")))?;
        let parse = |part: &str| -> Result<Vec<f64>> {
            part.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::parse("window", format!("`{x}`: {e}")))
                })
                .collect()
        };
        Window::new(parse(lo)?, parse(hi)?)
    }
}

/// Regular partition of a window into `counts[j]` cells per axis, with nodes
/// at the cell centres. Nodes are enumerated in row-major order (the last
/// axis varies fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    window: Window,
    counts: Vec<usize>,
    spacing: Vec<f64>,
}

impl Grid {
    pub fn new(window: &Window, counts: &[usize]) -> Result<Self> {
        if counts.len() != window.dim() {
            return Err(Error::DimensionMismatch {
                expected: window.dim(),
                got: counts.len(),
            });
        }
        if counts.contains(&0) {
            return Err(Error::InvalidWindow("grid counts must be positive".into()));
        }
        let spacing = counts
            .iter()
            .enumerate()
            .map(|(j, &n)| window.side(j) / n as f64)
            .collect();
        Ok(Grid {
            window: window.clone(),
            counts: counts.to_vec(),
            spacing,
        })
    }

    /// Same number of cells along every axis.
    pub fn uniform(window: &Window, per_axis: usize) -> Result<Self> {
        Grid::new(window, &vec![per_axis; window.dim()])
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Coordinate of node `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.window.lower()[axis] + (i as f64 + 0.5) * self.spacing[axis]
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.counts)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut multi = vec![0; self.dim()];
        for j in (0..self.dim()).rev() {
            multi[j] = flat % self.counts[j];
            flat /= self.counts[j];
        }
        multi
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(j, &i)| self.coord(j, i))
            .collect()
    }

    pub fn node_at(&self, multi: &[usize]) -> Vec<f64> {
        multi
            .iter()
            .enumerate()
            .map(|(j, &i)| self.coord(j, i))
            .collect()
    }

    /// All node coordinates, flattened (`len() * dim()` values).
    pub fn nodes(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(self.len() * d);
        let mut multi = vec![0usize; d];
        for _ in 0..self.len() {
            out.extend(multi.iter().enumerate().map(|(j, &i)| self.coord(j, i)));
            for j in (0..d).rev() {
                multi[j] += 1;
                if multi[j] < self.counts[j] {
                    break;
                }
                multi[j] = 0;
            }
        }
        out
    }

    /// Index of the cell containing `u` along `axis`, clamped to the grid.
    pub fn cell_of(&self, axis: usize, x: f64) -> usize {
        let t = ((x - self.window.lower()[axis]) / self.spacing[axis]).floor();
        (t.max(0.0) as usize).min(self.counts[axis] - 1)
    }

    pub fn cell_index(&self, u: &[f64]) -> usize {
        let multi: Vec<usize> = (0..self.dim()).map(|j| self.cell_of(j, u[j])).collect();
        self.flat_index(&multi)
    }
}
