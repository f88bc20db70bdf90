//! Estimators of `theta` in the log-linear intensity model.
//!
//! [`vare`] solves the linear estimating equation `A theta + b = 0` with
//! `A = sum h(u) div z(u)'` and `b = sum div h(u)` over the observed points.
//! [`mcle`] maximizes the Poisson (first-order composite) log-likelihood with
//! a quadrature approximation of the intensity integral.

mod closed_form;
mod mcle;
mod test_function;


use nalgebra::{DMatrix, DVector};

use crate::covariate::Covariate;
use crate::error::{Error, Result};
use crate::geometry::{Grid, Window};
use crate::simulate::PointPattern;

pub use closed_form::model2_div_z_closed_form;
pub use mcle::{mcle, mcle_with, McleResult, QuadratureScheme, MAX_NEWTON_ITERATIONS};
pub use test_function::{PointTerms, TestFnKind, TestFunction};

/// Systems with a larger 2-norm condition number are rejected.
pub const MAX_CONDITION_NUMBER: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct VareResult {
    pub theta_hat: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub condition_number: f64,
    pub covariance: Option<DMatrix<f64>>,
}

/// Evaluates `h`, `div h` and `div z` at every point of `x`.
pub fn point_terms(x: &PointPattern, z: &dyn Covariate, h: &TestFunction) -> Result<Vec<PointTerms>> {
    check_dim(x, z)?;
    Ok(x.points().map(|u| h.terms(z, u)).collect())
}

fn check_dim(x: &PointPattern, z: &dyn Covariate) -> Result<()> {
    if x.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: z.dim(),
            got: x.dim(),
        });
    }
    Ok(())
}

fn a_from_terms(terms: &[PointTerms], p: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(p, p);
    for t in terms {
        for i in 0..p {
            for j in 0..p {
                a[(i, j)] += t.h[i] * t.div_z[j];
            }
        }
    }
    a
}

fn b_from_terms(terms: &[PointTerms], p: usize) -> DVector<f64> {
    let mut b = DVector::zeros(p);
    for t in terms {
        for i in 0..p {
            b[i] += t.div_h[i];
        }
    }
    b
}

pub fn build_a(x: &PointPattern, z: &dyn Covariate, h: &TestFunction) -> Result<DMatrix<f64>> {
    Ok(a_from_terms(&point_terms(x, z, h)?, z.p()))
}

pub fn build_b(x: &PointPattern, z: &dyn Covariate, h: &TestFunction) -> Result<DVector<f64>> {
    Ok(b_from_terms(&point_terms(x, z, h)?, z.p()))
}

/// Ratio of largest to smallest singular value (infinite when singular).
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves `a theta = -b` by LU with full pivoting after the conditioning check.
fn solve_checked(a: &DMatrix<f64>, b: &DVector<f64>, n: usize) -> Result<(DVector<f64>, f64)> {
    let p = a.nrows();
    if n < p {
        return Err(Error::SingularSystem(format!("{n} points cannot identify {p} parameters")));
    }
    let cond = condition_number(a);
    if !(cond <= MAX_CONDITION_NUMBER) {
        return Err(Error::SingularSystem(format!("condition number {cond:.3e}")));
    }
    let theta = a
        .clone()
        .full_piv_lu()
        .solve(&(-b))
        .ok_or_else(|| Error::SingularSystem("LU factorization is singular".into()))?;
    Ok((theta, cond))
}

pub fn vare(x: &PointPattern, z: &dyn Covariate, h: &TestFunction) -> Result<VareResult> {
    check_dim(x, z)?;
    let p = z.p();
    if p == 0 {
        return Err(Error::Degenerate("covariate has no components".into()));
    }
    // single pass with one scratch buffer; the per-point terms are not kept
    let mut t = PointTerms::zeros(p);
    let mut a = DMatrix::zeros(p, p);
    let mut b = DVector::zeros(p);
    for u in x.points() {
        h.fill_terms(z, u, &mut t);
        for j in 0..p {
            for i in 0..p {
                a[(i, j)] += t.h[i] * t.div_z[j];
            }
        }
        for i in 0..p {
            b[i] += t.div_h[i];
        }
    }
    let (theta_hat, condition_number) = solve_checked(&a, &b, x.len())?;
    Ok(VareResult {
        theta_hat,
        a,
        b,
        condition_number,
        covariance: None,
    })
}

/// Like [`vare`], and also attaches the Poisson plug-in covariance.
pub fn vare_with_covariance(x: &PointPattern, z: &dyn Covariate, h: &TestFunction) -> Result<VareResult> {
    let terms = point_terms(x, z, h)?;
    vare_from_terms(&terms, z.p(), true)
}

fn vare_from_terms(terms: &[PointTerms], p: usize, with_cov: bool) -> Result<VareResult> {
    if p == 0 {
        return Err(Error::Degenerate("covariate has no components".into()));
    }
    let a = a_from_terms(terms, p);
    let b = b_from_terms(terms, p);
    let (theta_hat, condition_number) = solve_checked(&a, &b, terms.len())?;
    let covariance = if with_cov {
        Some(covariance_from_terms(terms, &a, theta_hat.as_slice())?)
    } else {
        None
    };
    Ok(VareResult {
        theta_hat,
        a,
        b,
        condition_number,
        covariance,
    })
}

fn covariance_from_terms(terms: &[PointTerms], a: &DMatrix<f64>, theta: &[f64]) -> Result<DMatrix<f64>> {
    let p = a.nrows();
    let mut sigma = DMatrix::zeros(p, p);
    for t in terms {
        let slope: f64 = t.div_z.iter().zip(theta).map(|(d, th)| d * th).sum();
        let f = DVector::from_iterator(p, t.h.iter().zip(&t.div_h).map(|(h, dh)| h * slope + dh));
        sigma += &f * f.transpose();
    }
    let lu = a.clone().full_piv_lu();
    // S^-1 Sigma S^-T = (S^-1 (S^-1 Sigma)')'
    let left = lu
        .solve(&sigma)
        .ok_or_else(|| Error::SingularSystem("sensitivity matrix is singular".into()))?;
    let cov = lu
        .solve(&left.transpose())
        .ok_or_else(|| Error::SingularSystem("sensitivity matrix is singular".into()))?;
    Ok(cov.transpose())
}

/// Sandwich covariance `S^-1 Sigma S^-T` of the variational estimator under
/// a Poisson model, with `S = A(x)` and `Sigma = sum f f'`,
/// `f(u) = h(u) div z(u)' theta + div h(u)`.
pub fn poisson_covariance(
    x: &PointPattern,
    z: &dyn Covariate,
    h: &TestFunction,
    theta_hat: &[f64],
) -> Result<DMatrix<f64>> {
    let terms = point_terms(x, z, h)?;
    let a = a_from_terms(&terms, z.p());
    solve_checked(&a, &DVector::zeros(z.p()), terms.len())?;
    covariance_from_terms(&terms, &a, theta_hat)
}

/// Standard errors (square roots of the covariance diagonal).
pub fn standard_errors(cov: &DMatrix<f64>) -> Vec<f64> {
    cov.diagonal().iter().map(|v| v.max(0.0).sqrt()).collect()
}

/// Default per-axis resolution of [`check_condition_iii`].
pub const CONDITION_GRID: usize = 256;

/// Smallest eigenvalue of the symmetrized `|w|^-1 int_w h div z' rho`,
/// computed by a midpoint rule with `per_axis` cells per axis.
pub fn check_condition_iii_with(
    z: &dyn Covariate,
    h: &TestFunction,
    w: &Window,
    beta: f64,
    theta: &[f64],
    per_axis: usize,
) -> Result<f64> {
    let grid = Grid::uniform(w, per_axis)?;
    let p = z.p();
    let mut s = DMatrix::zeros(p, p);
    for flat in 0..grid.len() {
        let u = grid.node(flat);
        let t = h.terms(z, &u);
        let zu = z.value(&u);
        let rho = (beta + zu.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>()).exp();
        for i in 0..p {
            for j in 0..p {
                s[(i, j)] += t.h[i] * t.div_z[j] * rho;
            }
        }
    }
    s *= grid.cell_volume() / w.volume();
    let sym = (&s + s.transpose()) * 0.5;
    Ok(sym.symmetric_eigenvalues().min())
}

pub fn check_condition_iii(z: &dyn Covariate, h: &TestFunction, w: &Window, beta: f64, theta: &[f64]) -> Result<f64> {
    check_condition_iii_with(z, h, w, beta, theta, CONDITION_GRID)
}
