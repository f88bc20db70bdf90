//! Covariate fields `z: R^d -> R^p` and their divergence operators.
//!
//! Divergence here follows the convention used throughout the estimator: for
//! a scalar function `h`, `div h(u)` is the *sum* of its first partial
//! derivatives, `dh/du_1 + ... + dh/du_d` (not a Laplacian, not a gradient).
//! For a vector field it is applied componentwise. Consequently
//! `(div div z)_i = sum_{j,k} d^2 z_i / du_j du_k`, mixed partials included.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Grid, Window};

/// A covariate field together with its first and second divergences.
pub trait Covariate: Send + Sync + fmt::Debug {
    /// Input dimension `d`.
    fn dim(&self) -> usize;
    /// Output dimension `p`.
    fn p(&self) -> usize;
    fn value(&self, u: &[f64]) -> Vec<f64>;
    fn div(&self, u: &[f64]) -> Vec<f64>;
    fn div_div(&self, u: &[f64]) -> Vec<f64>;

    /// Writes `value(u)` into `out` (length `p`). Implementations on hot
    /// paths override the three `_into` methods to skip allocation.
    fn value_into(&self, u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.value(u));
    }

    fn div_into(&self, u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.div(u));
    }

    fn div_div_into(&self, u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.div_div(u));
    }

    /// `div z` and `div div z` in one call.
    fn div_both_into(&self, u: &[f64], div: &mut [f64], div_div: &mut [f64]) {
        self.div_into(u, div);
        self.div_div_into(u, div_div);
    }
}

/// The built-in covariate models of the simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ModelId {
    /// `z(u) = u1^2 u2^2`
    One,
    /// `z(u) = (sin 4 pi u1, sin 4 pi u2)`
    Two,
    /// `z(u) = sin(4 pi u1 u2)`
    Three,
    /// `z(u) = (u1, u1^2, u1^3)`
    Four,
    /// `z_i(u) = sin(4 pi u_i) / d` for `i = 1..d`
    Sine,
}

impl ModelId {
    /// Parameter values used in the simulation study.
    pub fn true_theta(self, d: usize) -> Vec<f64> {
        match self {
            ModelId::One => vec![-2.0],
            ModelId::Two => vec![1.0, 4.0],
            ModelId::Three => vec![2.0],
            ModelId::Four => vec![-1.0, -1.0, -0.5],
            ModelId::Sine => vec![1.0; d],
        }
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "model1" => Ok(ModelId::One),
            "2" | "model2" => Ok(ModelId::Two),
            "3" | "model3" => Ok(ModelId::Three),
            "4" | "model4" => Ok(ModelId::Four),
            "sine" | "sine_d" => Ok(ModelId::Sine),
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelId::One => "1",
            ModelId::Two => "2",
            ModelId::Three => "3",
            ModelId::Four => "4",
            ModelId::Sine => "sine",
        };
        f.write_str(s)
    }
}

impl TryFrom<String> for ModelId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModelId> for String {
    fn from(m: ModelId) -> String {
        m.to_string()
    }
}

/// Analytic covariate with closed-form `div` and `div_div`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticField {
    model: ModelId,
    d: usize,
}

/// Looks up a built-in analytic field. Models 1-4 are planar; the sine model
/// is defined for any `d >= 1` with `p = d`.
pub fn builtin(model: ModelId, d: usize) -> Result<AnalyticField> {
    match model {
        ModelId::Sine if d >= 1 => Ok(AnalyticField { model, d }),
        ModelId::Sine => Err(Error::UnknownModel("sine model needs d >= 1".into())),
        _ if d == 2 => Ok(AnalyticField { model, d }),
        _ => Err(Error::UnknownModel(format!("model {model} is only defined for d = 2"))),
    }
}

const FOUR_PI: f64 = 4.0 * PI;

impl AnalyticField {
    pub fn model(&self) -> ModelId {
        self.model
    }
}

impl Covariate for AnalyticField {
    fn dim(&self) -> usize {
        self.d
    }

    fn p(&self) -> usize {
        match self.model {
            ModelId::One | ModelId::Three => 1,
            ModelId::Two => 2,
            ModelId::Four => 3,
            ModelId::Sine => self.d,
        }
    }

    fn value(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.p()];
        self.value_into(u, &mut out);
        out
    }

    fn div(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.p()];
        self.div_into(u, &mut out);
        out
    }

    fn div_div(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.p()];
        self.div_div_into(u, &mut out);
        out
    }

    fn value_into(&self, u: &[f64], out: &mut [f64]) {
        match self.model {
            ModelId::One => out[0] = u[0] * u[0] * u[1] * u[1],
            ModelId::Two => {
                out[0] = (FOUR_PI * u[0]).sin();
                out[1] = (FOUR_PI * u[1]).sin();
            }
            ModelId::Three => out[0] = (FOUR_PI * u[0] * u[1]).sin(),
            ModelId::Four => {
                out[0] = u[0];
                out[1] = u[0] * u[0];
                out[2] = u[0] * u[0] * u[0];
            }
            ModelId::Sine => {
                let scale = 1.0 / self.d as f64;
                for (o, x) in out.iter_mut().zip(u) {
                    *o = (FOUR_PI * x).sin() * scale;
                }
            }
        }
    }

    fn div_into(&self, u: &[f64], out: &mut [f64]) {
        match self.model {
            ModelId::One => {
                let (a, b) = (u[0], u[1]);
                out[0] = 2.0 * a * b * b + 2.0 * a * a * b;
            }
            ModelId::Two => {
                out[0] = FOUR_PI * (FOUR_PI * u[0]).cos();
                out[1] = FOUR_PI * (FOUR_PI * u[1]).cos();
            }
            ModelId::Three => {
                let arg = FOUR_PI * u[0] * u[1];
                out[0] = FOUR_PI * (u[0] + u[1]) * arg.cos();
            }
            ModelId::Four => {
                out[0] = 1.0;
                out[1] = 2.0 * u[0];
                out[2] = 3.0 * u[0] * u[0];
            }
            ModelId::Sine => {
                let scale = FOUR_PI / self.d as f64;
                for (o, x) in out.iter_mut().zip(u) {
                    *o = (FOUR_PI * x).cos() * scale;
                }
            }
        }
    }

    fn div_both_into(&self, u: &[f64], div: &mut [f64], div_div: &mut [f64]) {
        match self.model {
            ModelId::Two => {
                for i in 0..2 {
                    let (s, c) = (FOUR_PI * u[i]).sin_cos();
                    div[i] = FOUR_PI * c;
                    div_div[i] = -FOUR_PI * FOUR_PI * s;
                }
            }
            ModelId::Three => {
                let (s, c) = (FOUR_PI * u[0] * u[1]).sin_cos();
                let sum = u[0] + u[1];
                div[0] = FOUR_PI * sum * c;
                div_div[0] = -FOUR_PI * FOUR_PI * sum * sum * s + 2.0 * FOUR_PI * c;
            }
            ModelId::Sine => {
                let scale = FOUR_PI / self.d as f64;
                for ((d1, d2), x) in div.iter_mut().zip(div_div.iter_mut()).zip(u) {
                    let (s, c) = (FOUR_PI * x).sin_cos();
                    *d1 = c * scale;
                    *d2 = -FOUR_PI * s * scale;
                }
            }
            ModelId::One | ModelId::Four => {
                self.div_into(u, div);
                self.div_div_into(u, div_div);
            }
        }
    }

    fn div_div_into(&self, u: &[f64], out: &mut [f64]) {
        match self.model {
            ModelId::One => {
                let (a, b) = (u[0], u[1]);
                // d11 + 2 d12 + d22
                out[0] = 2.0 * b * b + 8.0 * a * b + 2.0 * a * a;
            }
            ModelId::Two => {
                out[0] = -FOUR_PI * FOUR_PI * (FOUR_PI * u[0]).sin();
                out[1] = -FOUR_PI * FOUR_PI * (FOUR_PI * u[1]).sin();
            }
            ModelId::Three => {
                let arg = FOUR_PI * u[0] * u[1];
                let s = u[0] + u[1];
                out[0] = -FOUR_PI * FOUR_PI * s * s * arg.sin() + 2.0 * FOUR_PI * arg.cos();
            }
            ModelId::Four => {
                out[0] = 0.0;
                out[1] = 2.0;
                out[2] = 6.0 * u[0];
            }
            ModelId::Sine => {
                let scale = -FOUR_PI * FOUR_PI / self.d as f64;
                for (o, x) in out.iter_mut().zip(u) {
                    *o = (FOUR_PI * x).sin() * scale;
                }
            }
        }
    }
}

/// A covariate known only through its samples at the nodes of a grid.
///
/// Derivatives are approximated by central differences on the `3^d` subgrid
/// whose midpoint is closest to the query point; the result is the
/// approximation *at that midpoint*, not at the query point itself.
#[derive(Debug, Clone)]
pub struct GridCovariate {
    grid: Grid,
    p: usize,
    samples: Vec<f64>,
}

impl GridCovariate {
    pub fn new(grid: Grid, p: usize, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() * p {
            return Err(Error::DimensionMismatch {
                expected: grid.len() * p,
                got: samples.len(),
            });
        }
        Ok(GridCovariate { grid, p, samples })
    }

    /// Samples `field` at every node of `grid`.
    pub fn sample(field: &dyn Covariate, grid: Grid) -> Self {
        let p = field.p();
        let mut samples = Vec::with_capacity(grid.len() * p);
        for k in 0..grid.len() {
            samples.extend(field.value(&grid.node(k)));
        }
        GridCovariate { grid, p, samples }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples_at(&self, flat: usize) -> &[f64] {
        &self.samples[flat * self.p..(flat + 1) * self.p]
    }

    /// Multi-index of the stencil midpoint nearest to `u`. Midpoints are the
    /// nodes not on the outer ring of the grid.
    pub fn stencil_center(&self, u: &[f64]) -> Result<Vec<usize>> {
        let g = &self.grid;
        if u.len() != g.dim() {
            return Err(Error::DimensionMismatch {
                expected: g.dim(),
                got: u.len(),
            });
        }
        if !g.window().contains(u) || g.counts().iter().any(|&n| n < 3) {
            return Err(Error::OutOfStencil(u.to_vec()));
        }
        Ok((0..g.dim())
            .map(|j| {
                let t = (u[j] - g.window().lower()[j]) / g.spacing()[j] - 0.5;
                let i = t.round().max(1.0) as usize;
                i.min(g.counts()[j] - 2)
            })
            .collect())
    }

    /// Flat indices of the `3^d` nodes of the stencil used for `u`.
    pub fn stencil_nodes(&self, u: &[f64]) -> Result<Vec<usize>> {
        let c = self.stencil_center(u)?;
        let d = c.len();
        let mut out = Vec::with_capacity(3usize.pow(d as u32));
        let mut offs = vec![0usize; d];
        loop {
            let multi: Vec<usize> = c.iter().zip(&offs).map(|(&ci, &o)| ci + o - 1).collect();
            out.push(self.grid.flat_index(&multi));
            let mut j = d;
            loop {
                if j == 0 {
                    return Ok(out);
                }
                j -= 1;
                offs[j] += 1;
                if offs[j] < 3 {
                    break;
                }
                offs[j] = 0;
            }
        }
    }

    fn at(&self, center: &[usize], shifts: &[(usize, isize)]) -> &[f64] {
        let mut multi = center.to_vec();
        for &(axis, s) in shifts {
            multi[axis] = (multi[axis] as isize + s) as usize;
        }
        self.samples_at(self.grid.flat_index(&multi))
    }

    pub fn fd_div(&self, u: &[f64]) -> Result<Vec<f64>> {
        let c = self.stencil_center(u)?;
        let mut out = vec![0.0; self.p];
        for j in 0..self.grid.dim() {
            let h = self.grid.spacing()[j];
            let plus = self.at(&c, &[(j, 1)]);
            let minus = self.at(&c, &[(j, -1)]);
            for i in 0..self.p {
                out[i] += (plus[i] - minus[i]) / (2.0 * h);
            }
        }
        Ok(out)
    }

    pub fn fd_div_div(&self, u: &[f64]) -> Result<Vec<f64>> {
        let c = self.stencil_center(u)?;
        let d = self.grid.dim();
        let mut out = vec![0.0; self.p];
        let mid = self.at(&c, &[]);
        for j in 0..d {
            let h = self.grid.spacing()[j];
            let plus = self.at(&c, &[(j, 1)]);
            let minus = self.at(&c, &[(j, -1)]);
            for i in 0..self.p {
                out[i] += (plus[i] - 2.0 * mid[i] + minus[i]) / (h * h);
            }
            for k in j + 1..d {
                let hk = self.grid.spacing()[k];
                let pp = self.at(&c, &[(j, 1), (k, 1)]);
                let pm = self.at(&c, &[(j, 1), (k, -1)]);
                let mp = self.at(&c, &[(j, -1), (k, 1)]);
                let mm = self.at(&c, &[(j, -1), (k, -1)]);
                for i in 0..self.p {
                    // the mixed partial appears twice in the double sum
                    out[i] += 2.0 * (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * hk);
                }
            }
        }
        Ok(out)
    }

    /// Writes the plain-text grid format: a header
    /// `d p n_1..n_d lower_1..lower_d upper_1..upper_d`, then one line of `p`
    /// values per node in row-major order.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let g = &self.grid;
        let mut header = vec![g.dim().to_string(), self.p.to_string()];
        header.extend(g.counts().iter().map(|n| n.to_string()));
        header.extend(g.window().lower().iter().map(|x| format!("{x:e}")));
        header.extend(g.window().upper().iter().map(|x| format!("{x:e}")));
        writeln!(out, "{}", header.join(" "))?;
        for row in self.samples.chunks_exact(self.p) {
            let line: Vec<String> = row.iter().map(|x| format!("{x:e}")).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse("line 1", "missing header"))?;
        let header = header?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let num = |k: usize, what: &str| -> Result<f64> {
            fields
                .get(k)
                .ok_or_else(|| Error::parse("line 1", format!("missing {what}")))?
                .parse::<f64>()
                .map_err(|e| Error::parse(format!("line 1, field {}", k + 1), e.to_string()))
        };
        let d = num(0, "d")? as usize;
        let p = num(1, "p")? as usize;
        if d == 0 || p == 0 || fields.len() != 2 + 3 * d {
            return Err(Error::parse(
                "line 1",
                format!("expected {} header fields", 2 + 3 * d.max(1)),
            ));
        }
        let counts: Vec<usize> = (0..d)
            .map(|j| num(2 + j, "count").map(|x| x as usize))
            .collect::<Result<_>>()?;
        let lower: Vec<f64> = (0..d).map(|j| num(2 + d + j, "lower")).collect::<Result<_>>()?;
        let upper: Vec<f64> = (0..d)
            .map(|j| num(2 + 2 * d + j, "upper"))
            .collect::<Result<_>>()?;
        let grid = Grid::new(&Window::new(lower, upper)?, &counts)?;
        let mut samples = Vec::with_capacity(grid.len() * p);
        for (lineno, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|x| {
                    x.parse::<f64>()
                        .map_err(|e| Error::parse(format!("line {}", lineno + 1), e.to_string()))
                })
                .collect::<Result<_>>()?;
            if row.len() != p {
                return Err(Error::parse(
                    format!("line {}", lineno + 1),
                    format!("expected {p} values, got {}", row.len()),
                ));
            }
            samples.extend(row);
        }
        GridCovariate::new(grid, p, samples)
    }
}

impl Covariate for GridCovariate {
    fn dim(&self) -> usize {
        self.grid.dim()
    }

    fn p(&self) -> usize {
        self.p
    }

    /// Value at the nearest node.
    fn value(&self, u: &[f64]) -> Vec<f64> {
        self.samples_at(self.grid.cell_index(u)).to_vec()
    }

    fn div(&self, u: &[f64]) -> Vec<f64> {
        self.fd_div(u).unwrap_or_else(|e| panic!("{e}"))
    }

    fn div_div(&self, u: &[f64]) -> Vec<f64> {
        self.fd_div_div(u).unwrap_or_else(|e| panic!("{e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Central-difference oracle for `div`, independent of the closed forms.
    fn fd_div(f: &dyn Covariate, u: &[f64], h: f64) -> Vec<f64> {
        let mut out = vec![0.0; f.p()];
        for j in 0..u.len() {
            let mut a = u.to_vec();
            let mut b = u.to_vec();
            a[j] += h;
            b[j] -= h;
            let (fa, fb) = (f.value(&a), f.value(&b));
            for i in 0..f.p() {
                out[i] += (fa[i] - fb[i]) / (2.0 * h);
            }
        }
        out
    }

    fn fd_div_div(f: &dyn Covariate, u: &[f64], h: f64) -> Vec<f64> {
        let mut out = vec![0.0; f.p()];
        let d = u.len();
        for j in 0..d {
            for k in 0..d {
                let shifted = |sj: f64, sk: f64| {
                    let mut v = u.to_vec();
                    v[j] += sj * h;
                    v[k] += sk * h;
                    f.value(&v)
                };
                let (pp, pm, mp, mm) = (
                    shifted(1.0, 1.0),
                    shifted(1.0, -1.0),
                    shifted(-1.0, 1.0),
                    shifted(-1.0, -1.0),
                );
                for i in 0..f.p() {
                    out[i] += (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
                }
            }
        }
        out
    }

    fn all_fields() -> Vec<AnalyticField> {
        let mut v: Vec<_> = [ModelId::One, ModelId::Two, ModelId::Three, ModelId::Four]
            .into_iter()
            .map(|m| builtin(m, 2).unwrap())
            .collect();
        for d in 1..=6 {
            v.push(builtin(ModelId::Sine, d).unwrap());
        }
        v
    }

    #[test]
    fn model_values() {
        let m1 = builtin(ModelId::One, 2).unwrap();
        let m2 = builtin(ModelId::Two, 2).unwrap();
        let m4 = builtin(ModelId::Four, 2).unwrap();
        assert_eq!(m2.value(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(m1.value(&[1.0, 1.0]), vec![1.0]);
        assert_eq!(m4.value(&[2.0, 0.3]), vec![2.0, 4.0, 8.0]);
    }

    #[test]
    fn combined_divergences_match_separate_calls() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (model, d) in [(ModelId::One, 2), (ModelId::Two, 2), (ModelId::Three, 2), (ModelId::Four, 2), (ModelId::Sine, 3)] {
            let z = builtin(model, d).unwrap();
            let (mut div, mut div_div) = (vec![0.0; z.p()], vec![0.0; z.p()]);
            for _ in 0..50 {
                let u: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                z.div_both_into(&u, &mut div, &mut div_div);
                for (a, b) in div.iter().zip(z.div(&u)).chain(div_div.iter().zip(z.div_div(&u))) {
                    assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{model:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn divergence_examples() {
        let m1 = builtin(ModelId::One, 2).unwrap();
        let m2 = builtin(ModelId::Two, 2).unwrap();
        let m4 = builtin(ModelId::Four, 2).unwrap();
        let d2 = m2.div(&[0.0, 0.0]);
        assert!((d2[0] - 4.0 * PI).abs() < 1e-14 && (d2[1] - 4.0 * PI).abs() < 1e-14);
        let fd = fd_div(&m2, &[0.0, 0.0], 1e-5);
        assert!((fd[0] - 4.0 * PI).abs() < 1e-6);
        assert_eq!(m4.div(&[0.0, 0.7]), vec![1.0, 0.0, 0.0]);

        assert_eq!(m2.div_div(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(m1.div_div(&[1.0, 1.0]), vec![12.0]);
        let fd = fd_div_div(&m1, &[1.0, 1.0], 1e-4);
        assert!((fd[0] - 12.0).abs() < 1e-5);
    }

    #[test]
    fn analytic_operators_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-4;
        for f in all_fields() {
            for _ in 0..100 {
                let u: Vec<f64> = (0..f.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let (a, b) = (f.div(&u), fd_div(&f, &u, h));
                for i in 0..f.p() {
                    assert!((a[i] - b[i]).abs() <= 1e3 * h * h, "{f:?} div at {u:?}");
                }
                let (a, b) = (f.div_div(&u), fd_div_div(&f, &u, h));
                for i in 0..f.p() {
                    assert!((a[i] - b[i]).abs() <= 1e-3 * (1.0 + a[i].abs()), "{f:?} divdiv at {u:?}");
                }
            }
        }
    }

    #[test]
    fn builtin_dimensions_and_errors() {
        assert_eq!(builtin(ModelId::Two, 2).unwrap().p(), 2);
        assert_eq!(builtin(ModelId::Four, 2).unwrap().p(), 3);
        assert_eq!(builtin(ModelId::Sine, 5).unwrap().p(), 5);
        assert!(builtin(ModelId::Two, 3).is_err());
        assert!(matches!("7".parse::<ModelId>(), Err(Error::UnknownModel(_))));
        assert_eq!("sine".parse::<ModelId>().unwrap(), ModelId::Sine);
    }

    #[test]
    fn builtin_is_deterministic() {
        let f = builtin(ModelId::Three, 2).unwrap();
        let u = [0.123, -0.456];
        let bits = |v: Vec<f64>| v.into_iter().map(f64::to_bits).collect::<Vec<_>>();
        assert_eq!(bits(f.div_div(&u)), bits(f.div_div(&u)));
        assert_eq!(bits(f.div(&u)), bits(f.div(&u)));
    }

    #[derive(Debug)]
    struct Poly(fn(&[f64]) -> f64);
    impl Covariate for Poly {
        fn dim(&self) -> usize {
            2
        }
        fn p(&self) -> usize {
            1
        }
        fn value(&self, u: &[f64]) -> Vec<f64> {
            vec![(self.0)(u)]
        }
        fn div(&self, _: &[f64]) -> Vec<f64> {
            unimplemented!()
        }
        fn div_div(&self, _: &[f64]) -> Vec<f64> {
            unimplemented!()
        }
    }

    #[test]
    fn stencil_exact_on_low_order_polynomials() {
        let w = Window::new(vec![-1.0, -0.5], vec![1.0, 1.5]).unwrap();
        let grid = Grid::new(&w, &[17, 23]).unwrap();
        let lin = GridCovariate::sample(&Poly(|u| u[0]), grid.clone());
        let quad = GridCovariate::sample(&Poly(|u| u[0] * u[0]), grid.clone());
        let mixed = GridCovariate::sample(&Poly(|u| u[0] * u[1] + 3.0 * u[1] - u[0]), grid);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let u = w.uniform_sample(&mut rng);
            assert!((lin.fd_div(&u).unwrap()[0] - 1.0).abs() < 1e-12);
            assert!((quad.fd_div_div(&u).unwrap()[0] - 2.0).abs() < 1e-9);
            assert!((lin.fd_div_div(&u).unwrap()[0]).abs() < 1e-9);
            // div div (u1 u2) = 2
            assert!((mixed.fd_div_div(&u).unwrap()[0] - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sampled_model2_close_to_analytic() {
        let w = Window::cube(2, -1.0, 1.0).unwrap();
        let f = builtin(ModelId::Two, 2).unwrap();
        let g = GridCovariate::sample(&f, Grid::uniform(&w, 80).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let u = w.erode(0.05).unwrap().uniform_sample(&mut rng);
            let c = g.stencil_center(&u).unwrap();
            let mid = g.grid().node_at(&c);
            // compare at the stencil midpoint, where the approximation lives
            let (a, b) = (f.div(&mid), g.fd_div(&u).unwrap());
            for i in 0..2 {
                assert!((a[i] - b[i]).abs() < 5e-3 * 4.0 * PI * 4.0, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn stencil_selection() {
        let w = Window::cube(2, -1.0, 1.0).unwrap();
        let g = GridCovariate::sample(
            &builtin(ModelId::Two, 2).unwrap(),
            Grid::uniform(&w, 10).unwrap(),
        );
        assert_eq!(g.stencil_center(&[0.01, 0.01]).unwrap(), vec![5, 5]);
        assert_eq!(g.stencil_center(&[-0.99, 0.99]).unwrap(), vec![1, 8]);
        assert_eq!(g.stencil_nodes(&[0.0, 0.0]).unwrap().len(), 9);
        assert!(matches!(g.stencil_center(&[1.5, 0.0]), Err(Error::OutOfStencil(_))));
        let tiny = GridCovariate::sample(
            &builtin(ModelId::Two, 2).unwrap(),
            Grid::uniform(&w, 2).unwrap(),
        );
        assert!(tiny.fd_div(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let w = Window::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        let g = GridCovariate::sample(
            &builtin(ModelId::Four, 2).unwrap(),
            Grid::new(&w, &[5, 4]).unwrap(),
        );
        let mut buf = Vec::new();
        g.write_to(&mut buf).unwrap();
        let back = GridCovariate::read_from(buf.as_slice()).unwrap();
        assert_eq!(back.grid(), g.grid());
        assert_eq!(back.samples, g.samples);
        assert!(GridCovariate::read_from("2 1 3 3 0 0 1\n".as_bytes()).is_err());
    }
}
