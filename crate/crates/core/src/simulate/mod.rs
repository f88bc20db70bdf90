//! Simulation of point processes with log-linear intensity
//! `rho(u) = exp(beta + theta' z(u))`: inhomogeneous Poisson, log-Gaussian
//! Cox and inhomogeneous Thomas processes.

mod lgcp;
mod pattern;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::covariate::Covariate;
use crate::error::{Error, Result};
use crate::geometry::{Grid, Window};
use crate::quadrature::{capped_grid, midpoint_sum};

pub use pattern::PointPattern;

/// Multiplicative slack on the probed maximum intensity used for thinning.
pub const THINNING_SLACK: f64 = 1.0001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgcpParams {
    pub sigma2: f64,
    /// Range of the exponential covariance `sigma2 exp(-|u - v| / alpha)`.
    pub alpha: f64,
    /// Cells per axis of the grid carrying the Gaussian field.
    pub grid_per_axis: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThomasParams {
    /// Parent intensity.
    pub kappa: f64,
    /// Standard deviation of the isotropic normal offspring displacement.
    pub sigma: f64,
    /// Parents are simulated on the window dilated by this many `sigma`.
    pub dilation_sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProcessKind {
    Poisson,
    Lgcp(LgcpParams),
    Thomas(ThomasParams),
}

pub const DEFAULT_LGCP_GRID: usize = 64;
pub const DEFAULT_THOMAS_DILATION: f64 = 4.0;

impl ProcessKind {
    pub fn lgcp(sigma2: f64, alpha: f64) -> Self {
        ProcessKind::Lgcp(LgcpParams {
            sigma2,
            alpha,
            grid_per_axis: DEFAULT_LGCP_GRID,
        })
    }

    pub fn thomas(kappa: f64, sigma: f64) -> Self {
        ProcessKind::Thomas(ThomasParams {
            kappa,
            sigma,
            dilation_sd: DEFAULT_THOMAS_DILATION,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProcessKind::Poisson => "poisson",
            ProcessKind::Lgcp(_) => "lgcp",
            ProcessKind::Thomas(_) => "thomas",
        }
    }
}

impl FromStr for ProcessKind {
    type Err = Error;

    /// Named settings of the simulation study.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(ProcessKind::Poisson),
            "lgcp1" => Ok(ProcessKind::lgcp(0.5, 1.0 / 15.0)),
            "lgcp2" => Ok(ProcessKind::lgcp(1.5, 1.0 / 30.0)),
            "thomas1" => Ok(ProcessKind::thomas(100.0, 0.05)),
            "thomas2" => Ok(ProcessKind::thomas(300.0, 0.1)),
            other => Err(Error::parse("process", format!("unknown process `{other}`"))),
        }
    }
}

/// Log-linear intensity model plus the process that realizes it.
#[derive(Clone)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub covariate: Arc<dyn Covariate>,
    pub beta: f64,
    pub theta: Vec<f64>,
}

impl fmt::Debug for ProcessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProcessSpec")
            .field("kind", &self.kind)
            .field("covariate", &self.covariate)
            .field("beta", &self.beta)
            .field("theta", &self.theta)
            .finish()
    }
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind, covariate: Arc<dyn Covariate>, beta: f64, theta: Vec<f64>) -> Self {
        assert_eq!(theta.len(), covariate.p(), "theta length must equal p");
        ProcessSpec {
            kind,
            covariate,
            beta,
            theta,
        }
    }

    /// `theta' z(u)`.
    pub fn linear_predictor(&self, u: &[f64]) -> f64 {
        dot(&self.theta, &self.covariate.value(u))
    }

    pub fn intensity(&self, u: &[f64]) -> f64 {
        (self.beta + self.linear_predictor(u)).exp()
    }

    /// Copy of the spec with `beta` calibrated so that `E N(W) = mu_star`.
    pub fn calibrated(&self, window: &Window, mu_star: f64) -> ProcessSpec {
        let mut spec = self.clone();
        spec.beta = calibrate_beta(self.covariate.as_ref(), &self.theta, window, mu_star);
        spec
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Midpoint grid used for `int_W exp(theta' z)`.
pub fn calibration_grid(window: &Window) -> Grid {
    capped_grid(window, 256, 1 << 24)
}

/// `beta = log(mu_star) - log int_W exp(theta' z(u)) du`.
///
/// Valid for every process here since each has intensity `rho`.
pub fn calibrate_beta(z: &dyn Covariate, theta: &[f64], window: &Window, mu_star: f64) -> f64 {
    assert!(mu_star > 0.0, "target expected count must be positive");
    let grid = calibration_grid(window);
    let integral = midpoint_sum(&grid, |u| dot(theta, &z.value(u)).exp());
    mu_star.ln() - integral.ln()
}

/// Maximum of `theta' z` over the window: a probe grid followed by a
/// compass search from the best probe nodes.
pub fn max_linear_predictor(z: &dyn Covariate, theta: &[f64], window: &Window) -> f64 {
    let d = window.dim();
    let grid = capped_grid(window, 128, 1 << 18);
    let nodes = grid.nodes();
    let s = |u: &[f64]| dot(theta, &z.value(u));
    let mut scored: Vec<(f64, usize)> = nodes
        .chunks_exact(d)
        .enumerate()
        .map(|(k, u)| (s(u), k))
        .collect();
    let keep = scored.len().min(8);
    scored.select_nth_unstable_by(keep - 1, |a, b| b.0.total_cmp(&a.0));
    let mut best = f64::NEG_INFINITY;
    for &(value, k) in &scored[..keep] {
        let mut x = nodes[k * d..(k + 1) * d].to_vec();
        let mut fx = value;
        let mut step: Vec<f64> = grid.spacing().to_vec();
        let stop: Vec<f64> = (0..d).map(|j| 1e-10 * window.side(j)).collect();
        while step.iter().zip(&stop).any(|(s, t)| s > t) {
            let mut improved = false;
            for j in 0..d {
                for sign in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[j] = (y[j] + sign * step[j]).clamp(window.lower()[j], window.upper()[j]);
                    let fy = s(&y);
                    if fy > fx {
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                }
            }
            if !improved {
                step.iter_mut().for_each(|h| *h *= 0.5);
            }
        }
        best = best.max(fx);
    }
    best
}

enum Engine {
    Poisson,
    Lgcp {
        field: lgcp::FieldSampler,
        sigma2: f64,
    },
    Thomas {
        parents: Window,
        kappa: f64,
        offspring: Normal<f64>,
    },
}

/// A process prepared for repeated simulation on a fixed window: the
/// thinning bound and, for the LGCP, the Cholesky factor are computed once.
pub struct Simulator {
    spec: ProcessSpec,
    window: Window,
    /// `log` of the thinning bound for `theta' z` (probed maximum plus slack).
    log_bound: f64,
    engine: Engine,
}

impl Simulator {
    pub fn new(spec: &ProcessSpec, window: &Window) -> Result<Self> {
        if spec.covariate.dim() != window.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.covariate.dim(),
                got: window.dim(),
            });
        }
        let s_max = max_linear_predictor(spec.covariate.as_ref(), &spec.theta, window);
        let log_bound = s_max + THINNING_SLACK.ln();
        let engine = match spec.kind {
            ProcessKind::Poisson => Engine::Poisson,
            ProcessKind::Lgcp(p) => {
                assert!(p.sigma2 > 0.0 && p.alpha > 0.0 && p.grid_per_axis > 0);
                Engine::Lgcp {
                    field: lgcp::FieldSampler::new(window, p.grid_per_axis, p.sigma2, p.alpha)?,
                    sigma2: p.sigma2,
                }
            }
            ProcessKind::Thomas(p) => {
                assert!(p.kappa > 0.0 && p.sigma > 0.0 && p.dilation_sd >= 0.0);
                Engine::Thomas {
                    parents: window.dilate(p.dilation_sd * p.sigma),
                    kappa: p.kappa,
                    offspring: Normal::new(0.0, p.sigma).expect("positive sigma"),
                }
            }
        };
        Ok(Simulator {
            spec: spec.clone(),
            window: window.clone(),
            log_bound,
            engine,
        })
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Thinning bound on `rho`.
    pub fn intensity_bound(&self) -> f64 {
        (self.spec.beta + self.log_bound).exp()
    }

    /// Acceptance probability `exp(theta' z(u) - log_bound)`.
    fn retain_probability(&self, u: &[f64]) -> Result<f64> {
        let s = self.spec.linear_predictor(u);
        if s > self.log_bound {
            return Err(Error::BoundViolation {
                value: (self.spec.beta + s).exp(),
                bound: self.intensity_bound(),
            });
        }
        Ok((s - self.log_bound).exp())
    }

    pub fn simulate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PointPattern> {
        let coords = match &self.engine {
            Engine::Poisson => self.thin_poisson(rng)?,
            Engine::Lgcp { field, sigma2 } => self.thin_lgcp(field, *sigma2, rng)?,
            Engine::Thomas {
                parents,
                kappa,
                offspring,
            } => self.thin_thomas(parents, *kappa, offspring, rng)?,
        };
        Ok(PointPattern::from_trusted(
            self.window.clone(),
            coords,
            self.spec.kind.name(),
            None,
        ))
    }

    /// Simulates with a fresh ChaCha stream and records the seed.
    pub fn simulate_seeded(&self, seed: u64) -> Result<PointPattern> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pattern = self.simulate(&mut rng)?;
        pattern.seed = Some(seed);
        Ok(pattern)
    }

    /// One draw of the LGCP Gaussian field `Y` (with mean
    /// `beta + theta' z - sigma2/2`) at the field-grid cell centres.
    pub fn sample_field<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<f64>> {
        match &self.engine {
            Engine::Lgcp { field, sigma2 } => {
                let g = field.sample(rng);
                let grid = field.grid();
                Some(
                    g.iter()
                        .enumerate()
                        .map(|(k, gk)| {
                            self.spec.beta + self.spec.linear_predictor(&grid.node(k)) - sigma2 / 2.0 + gk
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    pub fn field_grid(&self) -> Option<&Grid> {
        match &self.engine {
            Engine::Lgcp { field, .. } => Some(field.grid()),
            _ => None,
        }
    }

    fn thin_poisson<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let d = self.window.dim();
        let n = poisson_draw(self.intensity_bound() * self.window.volume(), rng);
        let mut out = Vec::new();
        let mut u = vec![0.0; d];
        for _ in 0..n {
            self.window.uniform_sample_into(rng, &mut u);
            if rng.random::<f64>() < self.retain_probability(&u)? {
                out.extend_from_slice(&u);
            }
        }
        Ok(out)
    }

    /// Conditional on the field, a Poisson process with intensity
    /// `rho(u) exp(G_cell(u) - sigma2/2)`; the covariate part stays exact
    /// and only the Gaussian residual is piecewise constant.
    fn thin_lgcp<R: Rng + ?Sized>(&self, field: &lgcp::FieldSampler, sigma2: f64, rng: &mut R) -> Result<Vec<f64>> {
        let g = field.sample(rng);
        let grid = field.grid();
        let d = self.window.dim();
        let bound = self.intensity_bound() * grid.cell_volume();
        let mut out = Vec::new();
        let mut u = vec![0.0; d];
        for (k, gk) in g.iter().enumerate() {
            let n = poisson_draw(bound * (gk - sigma2 / 2.0).exp(), rng);
            if n == 0 {
                continue;
            }
            let multi = grid.multi_index(k);
            for _ in 0..n {
                for j in 0..d {
                    let lo = self.window.lower()[j] + multi[j] as f64 * grid.spacing()[j];
                    u[j] = lo + rng.random::<f64>() * grid.spacing()[j];
                }
                if rng.random::<f64>() < self.retain_probability(&u)? {
                    out.extend_from_slice(&u);
                }
            }
        }
        Ok(out)
    }

    fn thin_thomas<R: Rng + ?Sized>(
        &self,
        parents: &Window,
        kappa: f64,
        offspring: &Normal<f64>,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let d = self.window.dim();
        let n_parents = poisson_draw(kappa * parents.volume(), rng);
        let mean_offspring = self.intensity_bound() / kappa;
        let mut out = Vec::new();
        let mut c = vec![0.0; d];
        let mut u = vec![0.0; d];
        for _ in 0..n_parents {
            parents.uniform_sample_into(rng, &mut c);
            let n = poisson_draw(mean_offspring, rng);
            for _ in 0..n {
                for j in 0..d {
                    u[j] = c[j] + offspring.sample(rng);
                }
                // draw the thinning uniform unconditionally to keep streams aligned
                let v = rng.random::<f64>();
                if self.window.contains(&u) && v < self.retain_probability(&u)? {
                    out.extend_from_slice(&u);
                }
            }
        }
        Ok(out)
    }
}

fn poisson_draw<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
}

pub fn simulate_poisson<R: Rng + ?Sized>(spec: &ProcessSpec, window: &Window, rng: &mut R) -> Result<PointPattern> {
    debug_assert!(matches!(spec.kind, ProcessKind::Poisson));
    Simulator::new(spec, window)?.simulate(rng)
}

pub fn simulate_lgcp<R: Rng + ?Sized>(spec: &ProcessSpec, window: &Window, rng: &mut R) -> Result<PointPattern> {
    debug_assert!(matches!(spec.kind, ProcessKind::Lgcp(_)));
    Simulator::new(spec, window)?.simulate(rng)
}

pub fn simulate_thomas<R: Rng + ?Sized>(spec: &ProcessSpec, window: &Window, rng: &mut R) -> Result<PointPattern> {
    debug_assert!(matches!(spec.kind, ProcessKind::Thomas(_)));
    Simulator::new(spec, window)?.simulate(rng)
}

#[cfg(test)]
mod tests;
