//! Zero-mean Gaussian field with exponential covariance on the cell centres
//! of a regular grid, sampled through a dense Cholesky factor.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{Grid, Window};

const JITTER: f64 = 1e-10;

type FactorKey = (Vec<u64>, usize, u64, u64);

fn factor_cache() -> &'static Mutex<HashMap<FactorKey, Arc<DMatrix<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<FactorKey, Arc<DMatrix<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

pub(crate) struct FieldSampler {
    grid: Grid,
    lower: Arc<DMatrix<f64>>,
}

impl FieldSampler {
    pub(crate) fn new(window: &Window, per_axis: usize, sigma2: f64, alpha: f64) -> Result<Self> {
        let grid = Grid::uniform(window, per_axis)?;
        let key: FactorKey = (
            window.lower().iter().chain(window.upper()).map(|x| x.to_bits()).collect(),
            per_axis,
            sigma2.to_bits(),
            alpha.to_bits(),
        );
        if let Some(l) = factor_cache().lock().unwrap().get(&key) {
            return Ok(FieldSampler {
                grid,
                lower: Arc::clone(l),
            });
        }
        let lower = Arc::new(cholesky_factor(&grid, sigma2, alpha)?);
        factor_cache()
            .lock()
            .unwrap()
            .insert(key, Arc::clone(&lower));
        Ok(FieldSampler { grid, lower })
    }

    pub(crate) fn grid(&self) -> &Grid {
        &self.grid
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.grid.len();
        let xi = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        (&*self.lower * xi).as_slice().to_vec()
    }
}

fn cholesky_factor(grid: &Grid, sigma2: f64, alpha: f64) -> Result<DMatrix<f64>> {
    let n = grid.len();
    let nodes = grid.nodes();
    let d = grid.dim();
    let cov = DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (&nodes[i * d..(i + 1) * d], &nodes[j * d..(j + 1) * d]);
        let dist = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        sigma2 * (-dist / alpha).exp() + if i == j { JITTER } else { 0.0 }
    });
    cov.cholesky().map(|c| c.unpack()).ok_or(Error::CholeskyFailure)
}
