use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::covariate::{Covariate, GridCovariate};
use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::simulate::PointPattern;

pub const MAX_NEWTON_ITERATIONS: usize = 100;

/// How the intensity integral `int_W rho` is approximated.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadratureScheme {
    /// Every cell centre, weight = cell volume.
    Midpoint(Grid),
    /// A subset of cell centres (flat indices), each still weighted by the
    /// cell volume.
    Nodes { grid: Grid, nodes: Vec<usize> },
    /// Cell centres of `dummy` plus the data points. Each quadrature point
    /// gets the volume of its `tiles` cell divided by the number of
    /// quadrature points sharing that cell (counting weights).
    BermanTurner { dummy: Grid, tiles: Grid },
}

impl QuadratureScheme {
    /// Berman-Turner scheme whose tiles are the dummy grid cells.
    pub fn berman_turner(dummy: Grid) -> Self {
        QuadratureScheme::BermanTurner {
            tiles: dummy.clone(),
            dummy,
        }
    }

    /// Nodes of all 3^d finite-difference stencils used at the points of `x`.
    pub fn stencil_union(z: &GridCovariate, x: &PointPattern) -> Result<Self> {
        let mut set = BTreeSet::new();
        for u in x.points() {
            set.extend(z.stencil_nodes(u)?);
        }
        Ok(QuadratureScheme::Nodes {
            grid: z.grid().clone(),
            nodes: set.into_iter().collect(),
        })
    }

    pub fn grid(&self) -> &Grid {
        match self {
            QuadratureScheme::Midpoint(g) | QuadratureScheme::BermanTurner { dummy: g, .. } => g,
            QuadratureScheme::Nodes { grid, .. } => grid,
        }
    }

    /// Flattened quadrature points and their weights for pattern `x`.
    pub fn points_and_weights(&self, x: &PointPattern) -> (Vec<f64>, Vec<f64>) {
        match self {
            QuadratureScheme::Midpoint(g) => (g.nodes(), vec![g.cell_volume(); g.len()]),
            QuadratureScheme::Nodes { grid, nodes } => {
                let pts = nodes.iter().flat_map(|&i| grid.node(i)).collect();
                (pts, vec![grid.cell_volume(); nodes.len()])
            }
            QuadratureScheme::BermanTurner { dummy, tiles } => {
                let mut pts = dummy.nodes();
                pts.extend_from_slice(x.coords());
                let cells: Vec<usize> = pts.chunks_exact(x.dim()).map(|u| tiles.cell_index(u)).collect();
                let mut count = vec![0usize; tiles.len()];
                for &c in &cells {
                    count[c] += 1;
                }
                let v = tiles.cell_volume();
                let w = cells.iter().map(|&c| v / count[c] as f64).collect();
                (pts, w)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct McleResult {
    pub beta_hat: f64,
    pub theta_hat: DVector<f64>,
    pub loglik: f64,
    pub iterations: usize,
    pub grid: Grid,
    pub gradient_norm: f64,
    /// Hessian of the quadrature log-likelihood at the optimum.
    pub hessian: DMatrix<f64>,
    /// Newton decrement `g' (-H)^-1 g` at each iterate.
    pub decrements: Vec<f64>,
}

/// Midpoint-rule composite likelihood fit on `grid`.
pub fn mcle(x: &PointPattern, z: &dyn Covariate, grid: &Grid) -> Result<McleResult> {
    mcle_with(x, z, &QuadratureScheme::Midpoint(grid.clone()))
}

struct Objective {
    q: usize,
    /// `(1, z(u_j))` rows of the quadrature points.
    rows: Vec<f64>,
    weights: Vec<f64>,
    data_sum: DVector<f64>,
}

impl Objective {
    fn loglik(&self, psi: &DVector<f64>) -> f64 {
        let mut integral = 0.0;
        for (row, w) in self.rows.chunks_exact(self.q).zip(&self.weights) {
            integral += w * eta(row, psi).exp();
        }
        self.data_sum.dot(psi) - integral
    }

    fn derivatives(&self, psi: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let q = self.q;
        let mut integral = 0.0;
        let mut grad = self.data_sum.clone();
        let mut neg_hess = DMatrix::zeros(q, q);
        for (row, w) in self.rows.chunks_exact(q).zip(&self.weights) {
            let m = w * eta(row, psi).exp();
            integral += m;
            for i in 0..q {
                grad[i] -= m * row[i];
                for j in 0..=i {
                    neg_hess[(i, j)] += m * row[i] * row[j];
                }
            }
        }
        for i in 0..q {
            for j in 0..i {
                neg_hess[(j, i)] = neg_hess[(i, j)];
            }
        }
        (self.data_sum.dot(psi) - integral, grad, neg_hess)
    }
}

fn eta(row: &[f64], psi: &DVector<f64>) -> f64 {
    row.iter().zip(psi.iter()).map(|(a, b)| a * b).sum()
}

fn with_intercept(z: &[f64]) -> impl Iterator<Item = f64> + '_ {
    std::iter::once(1.0).chain(z.iter().copied())
}

/// Maximizes `sum_x (beta + theta' z(x)) - sum_j w_j exp(beta + theta' z(u_j))`
/// by damped Newton iterations from the homogeneous fit.
pub fn mcle_with(x: &PointPattern, z: &dyn Covariate, scheme: &QuadratureScheme) -> Result<McleResult> {
    if x.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: z.dim(),
            got: x.dim(),
        });
    }
    let n = x.len();
    if n == 0 {
        return Err(Error::Degenerate("empty pattern".into()));
    }
    let p = z.p();
    let q = p + 1;
    let (pts, weights) = scheme.points_and_weights(x);
    let mut rows = Vec::with_capacity(weights.len() * q);
    for u in pts.chunks_exact(x.dim()) {
        rows.extend(with_intercept(&z.value(u)));
    }
    let mut data_sum = DVector::zeros(q);
    for u in x.points() {
        for (s, v) in data_sum.iter_mut().zip(with_intercept(&z.value(u))) {
            *s += v;
        }
    }
    let obj = Objective {
        q,
        rows,
        weights,
        data_sum,
    };

    let area = x.window().volume();
    let mut psi = DVector::zeros(q);
    psi[0] = (n as f64 / area).ln();
    let tol = 1e-8 * (1.0 + n as f64);
    let mut decrements = Vec::new();
    for iteration in 0..=MAX_NEWTON_ITERATIONS {
        let (ll, grad, neg_hess) = obj.derivatives(&psi);
        let gnorm = grad.norm();
        if gnorm <= tol {
            return Ok(McleResult {
                beta_hat: psi[0],
                theta_hat: psi.rows(1, p).into_owned(),
                loglik: ll,
                iterations: iteration,
                grid: scheme.grid().clone(),
                gradient_norm: gnorm,
                hessian: -neg_hess,
                decrements,
            });
        }
        if iteration == MAX_NEWTON_ITERATIONS || !gnorm.is_finite() {
            return Err(Error::Nonconvergence {
                iterations: iteration,
                grad_norm: gnorm,
            });
        }
        // a numerically singular Hessian means the iterates ran off towards
        // a maximizer at infinity
        let step = match neg_hess.clone().cholesky() {
            Some(c) => c.solve(&grad),
            None => neg_hess.full_piv_lu().solve(&grad).ok_or(Error::Nonconvergence {
                iterations: iteration,
                grad_norm: gnorm,
            })?,
        };
        let decrement = grad.dot(&step);
        decrements.push(decrement);
        let slack = 1e-12 * (1.0 + ll.abs());
        let mut t = 1.0;
        loop {
            let trial = &psi + &step * t;
            let ll_trial = obj.loglik(&trial);
            if ll_trial.is_finite() && ll_trial >= ll + 1e-4 * t * decrement - slack {
                psi = trial;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::Nonconvergence {
                    iterations: iteration,
                    grad_norm: gnorm,
                });
            }
        }
    }
    unreachable!("loop returns on its last iteration")
}
