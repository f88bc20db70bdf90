//! Replication experiments: simulate patterns, run estimators, aggregate
//! mean squared errors.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariate::{builtin, Covariate, GridCovariate, ModelId};
use crate::error::{Error, Result};
use crate::estimate::{mcle_with, vare, QuadratureScheme, TestFnKind, TestFunction};
use crate::geometry::{Grid, Window};
use crate::simulate::{PointPattern, ProcessKind, ProcessSpec, Simulator};

/// Smoothing width used when an estimator entry leaves `eps` unset: this
/// fraction of the shortest window side.
pub const DEFAULT_EPS_FRACTION: f64 = 0.05;
pub const DEFAULT_MCLE_GRID: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Vare,
    Mcle,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vare" => Ok(Method::Vare),
            "mcle" => Ok(Method::Mcle),
            other => Err(Error::parse("method", format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureKind {
    #[default]
    Midpoint,
    BermanTurner,
}

/// A process given either by preset name (`"lgcp1"`) or by explicit
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProcessChoice {
    Named(String),
    Custom(ProcessKind),
}

impl ProcessChoice {
    pub fn kind(&self) -> Result<ProcessKind> {
        match self {
            ProcessChoice::Named(name) => name.parse(),
            ProcessChoice::Custom(kind) => Ok(*kind),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ProcessChoice::Named(name) => name.clone(),
            ProcessChoice::Custom(kind) => kind.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSetting {
    pub window: Window,
    /// Expected number of points; `beta` is calibrated to it.
    pub mu_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub method: Method,
    #[serde(default = "default_test_fn")]
    pub test_fn: TestFnKind,
    /// Unset means `DEFAULT_EPS_FRACTION` of the shortest side for the
    /// mollified test functions and 0 otherwise.
    #[serde(default)]
    pub eps: Option<f64>,
    /// Cells per axis of the MCLE quadrature grid.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub quadrature: QuadratureKind,
    /// When set, `z` is only known at the cell centres of a grid with this
    /// many cells per axis: VARE uses finite differences, MCLE uses the
    /// union of the per-point 3^d stencils as quadrature nodes.
    #[serde(default)]
    pub covariate_grid: Option<usize>,
}

fn default_test_fn() -> TestFnKind {
    TestFnKind::DivZ
}

fn default_grid() -> usize {
    DEFAULT_MCLE_GRID
}

fn default_dim() -> usize {
    2
}

impl EstimatorSpec {
    pub fn vare(test_fn: TestFnKind, eps: Option<f64>) -> Self {
        EstimatorSpec {
            label: None,
            method: Method::Vare,
            test_fn,
            eps,
            grid: DEFAULT_MCLE_GRID,
            quadrature: QuadratureKind::Midpoint,
            covariate_grid: None,
        }
    }

    pub fn mcle(grid: usize) -> Self {
        EstimatorSpec {
            method: Method::Mcle,
            grid,
            ..EstimatorSpec::vare(TestFnKind::DivZ, None)
        }
    }

    pub fn local(mut self, covariate_grid: usize) -> Self {
        self.covariate_grid = Some(covariate_grid);
        self
    }

    /// Smoothing width actually used on `window`.
    pub fn effective_eps(&self, window: &Window) -> f64 {
        match (self.method, self.eps) {
            (Method::Mcle, _) => 0.0,
            (Method::Vare, Some(e)) => e,
            (Method::Vare, None) if self.test_fn.is_mollified() => DEFAULT_EPS_FRACTION * window.min_side(),
            (Method::Vare, None) => 0.0,
        }
    }

    pub fn display_label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match (self.method, self.covariate_grid) {
            (Method::Vare, None) => format!("vare({})", self.test_fn),
            (Method::Vare, Some(n)) => format!("vare-loc({},{n})", self.test_fn),
            (Method::Mcle, None) => match self.quadrature {
                QuadratureKind::Midpoint => format!("mcle({})", self.grid),
                QuadratureKind::BermanTurner => format!("mcle-bt({})", self.grid),
            },
            (Method::Mcle, Some(n)) => format!("mcle-loc({n})"),
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let at = format!("estimators[{index}]");
        if self.grid == 0 {
            return Err(Error::parse(at, "grid must be positive"));
        }
        if self.covariate_grid.is_some_and(|n| n < 3) {
            return Err(Error::parse(at, "covariate_grid needs at least 3 cells per axis"));
        }
        if self.eps.is_some_and(|e| !(e >= 0.0)) {
            return Err(Error::parse(at, "eps must be non-negative"));
        }
        Ok(())
    }
}

/// The default estimator list: VARE with `h = div z`, VARE with the
/// mollified `h` at the default width, and the midpoint MCLE on 80 cells
/// per axis.
pub fn default_estimators() -> Vec<EstimatorSpec> {
    vec![
        EstimatorSpec::vare(TestFnKind::DivZ, None),
        EstimatorSpec::vare(TestFnKind::EtaDivZ, None),
        EstimatorSpec::mcle(DEFAULT_MCLE_GRID),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelId,
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// True parameter; defaults to the model's study value.
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    pub processes: Vec<ProcessChoice>,
    pub windows: Vec<WindowSetting>,
    pub replications: usize,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorSpec>,
    pub seed: u64,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn new(model: ModelId, processes: &[&str], windows: Vec<WindowSetting>, replications: usize, seed: u64) -> Self {
        ExperimentConfig {
            model,
            dim: 2,
            theta: None,
            processes: processes.iter().map(|p| ProcessChoice::Named(p.to_string())).collect(),
            windows,
            replications,
            estimators: default_estimators(),
            seed,
            workers: None,
            output: None,
        }
    }

    pub fn true_theta(&self) -> Vec<f64> {
        self.theta.clone().unwrap_or_else(|| self.model.true_theta(self.dim))
    }

    pub fn validate(&self) -> Result<()> {
        let z = builtin(self.model, self.dim)?;
        if self.replications == 0 {
            return Err(Error::parse("replications", "must be at least 1"));
        }
        if self.true_theta().len() != z.p() {
            return Err(Error::parse(
                "theta",
                format!("model {} needs {} parameters", self.model, z.p()),
            ));
        }
        for (i, p) in self.processes.iter().enumerate() {
            p.kind().map_err(|e| Error::parse(format!("processes[{i}]"), e.to_string()))?;
        }
        for (i, w) in self.windows.iter().enumerate() {
            if w.window.dim() != self.dim {
                return Err(Error::parse(
                    format!("windows[{i}]"),
                    format!("window has dimension {}, model has {}", w.window.dim(), self.dim),
                ));
            }
            if !(w.mu_star > 0.0) {
                return Err(Error::parse(format!("windows[{i}].mu_star"), "must be positive"));
            }
        }
        if self.processes.is_empty() || self.windows.is_empty() || self.estimators.is_empty() {
            return Err(Error::parse("config", "processes, windows and estimators must be non-empty"));
        }
        for (i, e) in self.estimators.iter().enumerate() {
            e.validate(i)?;
        }
        if self.workers == Some(0) {
            return Err(Error::parse("workers", "must be at least 1"));
        }
        Ok(())
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_config(&text, &path.display().to_string())
}

/// Parses a JSON config; errors carry `source:line:column`.
pub fn parse_config(text: &str, source: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("{source}:{}:{}", e.line(), e.column()), e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn write_config(cfg: &ExperimentConfig, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(cfg).map_err(|e| Error::parse("config", e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub model: ModelId,
    pub process: String,
    pub window: Window,
    pub estimator: String,
    pub eps: f64,
    pub attempted: usize,
    pub succeeded: usize,
    pub mse: Vec<f64>,
    /// Mean of `mse` over coordinates (NaN when no fit succeeded).
    pub amse: f64,
    pub mean_time_s: f64,
    /// Per-replication estimates, `None` for failed fits.
    pub estimates: Vec<Option<Vec<f64>>>,
}

impl ResultRow {
    pub fn failures(&self) -> usize {
        self.attempted - self.succeeded
    }
}

/// Per-coordinate MSE and their mean over the successful estimates.
pub fn mse_and_amse(estimates: &[Option<Vec<f64>>], theta: &[f64]) -> (Vec<f64>, f64) {
    let ok: Vec<&Vec<f64>> = estimates.iter().flatten().collect();
    let mse: Vec<f64> = (0..theta.len())
        .map(|i| ok.iter().map(|t| (t[i] - theta[i]).powi(2)).sum::<f64>() / ok.len() as f64)
        .collect();
    let amse = mse.iter().sum::<f64>() / mse.len() as f64;
    (mse, amse)
}

/// Median of the means of up to ten consecutive batches.
pub fn robust_mean_time(times: &[f64]) -> f64 {
    if times.is_empty() {
        return f64::NAN;
    }
    let batches = times.len().min(10);
    let size = times.len().div_ceil(batches);
    let mut means: Vec<f64> = times
        .chunks(size)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let m = means.len();
    if m % 2 == 1 {
        means[m / 2]
    } else {
        0.5 * (means[m / 2 - 1] + means[m / 2])
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent stream for replication `rep` of cell `cell`.
pub fn replication_rng(master: u64, cell: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(master ^ splitmix(cell)));
    rng.set_stream(rep);
    rng
}

enum Prepared {
    Vare { h: TestFunction, z: Arc<dyn Covariate> },
    Mcle { scheme: QuadratureScheme, z: Arc<dyn Covariate> },
    McleLocal { z: Arc<GridCovariate> },
}

impl Prepared {
    fn new(spec: &EstimatorSpec, z: &Arc<dyn Covariate>, window: &Window) -> Result<Self> {
        let local = match spec.covariate_grid {
            Some(n) => Some(Arc::new(GridCovariate::sample(z.as_ref(), Grid::uniform(window, n)?))),
            None => None,
        };
        Ok(match (spec.method, local) {
            (Method::Vare, local) => Prepared::Vare {
                h: TestFunction::new(spec.test_fn, window, spec.effective_eps(window))?,
                z: local.map_or_else(|| Arc::clone(z), |g| g as Arc<dyn Covariate>),
            },
            (Method::Mcle, Some(g)) => Prepared::McleLocal { z: g },
            (Method::Mcle, None) => {
                let grid = Grid::uniform(window, spec.grid)?;
                let scheme = match spec.quadrature {
                    QuadratureKind::Midpoint => QuadratureScheme::Midpoint(grid),
                    QuadratureKind::BermanTurner => QuadratureScheme::berman_turner(grid),
                };
                Prepared::Mcle {
                    scheme,
                    z: Arc::clone(z),
                }
            }
        })
    }

    fn estimate(&self, x: &PointPattern) -> Result<Vec<f64>> {
        let theta = match self {
            Prepared::Vare { h, z } => vare(x, z.as_ref(), h)?.theta_hat,
            Prepared::Mcle { scheme, z } => mcle_with(x, z.as_ref(), scheme)?.theta_hat,
            Prepared::McleLocal { z } => {
                let scheme = QuadratureScheme::stencil_union(z, x)?;
                mcle_with(x, z.as_ref(), &scheme)?.theta_hat
            }
        };
        Ok(theta.as_slice().to_vec())
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::parse("workers", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs every (process, window, estimator) cell. Within a (process, window)
/// pair all estimators see the same simulated patterns.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let theta = cfg.true_theta();
    let z: Arc<dyn Covariate> = Arc::new(builtin(cfg.model, cfg.dim)?);
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for process in &cfg.processes {
        let kind = process.kind()?;
        for ws in &cfg.windows {
            let spec = ProcessSpec::new(kind, Arc::clone(&z), 0.0, theta.clone()).calibrated(&ws.window, ws.mu_star);
            let sim = Simulator::new(&spec, &ws.window)?;
            let prepared: Vec<Prepared> = cfg
                .estimators
                .iter()
                .map(|e| Prepared::new(e, &z, &ws.window))
                .collect::<Result<_>>()?;
            let master = cfg.seed;
            let per_rep: Vec<Vec<(Option<Vec<f64>>, f64)>> = in_pool(cfg.workers, || {
                (0..cfg.replications as u64)
                    .into_par_iter()
                    .map(|rep| {
                        let x = sim.simulate(&mut replication_rng(master, cell, rep))?;
                        Ok(prepared
                            .iter()
                            .map(|p| {
                                let (res, t) = timed(|| p.estimate(&x));
                                (res.ok(), t)
                            })
                            .collect())
                    })
                    .collect::<Result<_>>()
            })??;
            for (k, est) in cfg.estimators.iter().enumerate() {
                let estimates: Vec<Option<Vec<f64>>> = per_rep.iter().map(|r| r[k].0.clone()).collect();
                let times: Vec<f64> = per_rep.iter().map(|r| r[k].1).collect();
                let (mse, amse) = mse_and_amse(&estimates, &theta);
                rows.push(ResultRow {
                    model: cfg.model,
                    process: process.label(),
                    window: ws.window.clone(),
                    estimator: est.display_label(),
                    eps: est.effective_eps(&ws.window),
                    attempted: cfg.replications,
                    succeeded: estimates.iter().flatten().count(),
                    mse,
                    amse,
                    mean_time_s: robust_mean_time(&times),
                    estimates,
                });
            }
            cell += 1;
        }
    }
    Ok(rows)
}

/// Writes the result table. `p` (number of MSE columns) is taken from the
/// first row; an empty table gets a single `mse_1` column.
pub fn write_results<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    write_results_with(rows, out, true)
}

/// As [`write_results`]; `with_time = false` blanks the timing column so
/// that outputs of identical runs compare byte for byte.
pub fn write_results_with<W: Write>(rows: &[ResultRow], out: W, with_time: bool) -> Result<()> {
    let p = rows.first().map_or(1, |r| r.mse.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["model", "process", "window", "estimator", "eps", "R", "succeeded"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=p).map(|i| format!("mse_{i}")));
    header.extend(["amse".to_string(), "mean_time_s".to_string()]);
    w.write_record(&header).map_err(csv_error)?;
    for r in rows {
        let mut rec = vec![
            r.model.to_string(),
            r.process.clone(),
            r.window.to_compact(),
            r.estimator.clone(),
            r.eps.to_string(),
            r.attempted.to_string(),
            r.succeeded.to_string(),
        ];
        rec.extend(r.mse.iter().map(f64::to_string));
        rec.push(r.amse.to_string());
        rec.push(if with_time { r.mean_time_s.to_string() } else { String::new() });
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results_file(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    write_results(rows, fs::File::create(path)?)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse("csv", format!("{other:?}")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub d: usize,
    pub tau: f64,
    pub mu_star: f64,
    /// Dummy points actually used (`per_axis^d`).
    pub n_dummy: usize,
    pub amse_vare: f64,
    pub amse_mcle: f64,
    pub time_vare: f64,
    pub time_mcle: f64,
}

impl ScalingRow {
    pub fn ratio(&self) -> f64 {
        self.amse_mcle / self.amse_vare
    }
}

impl fmt::Display for ScalingRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d={} tau={} n_D={} amse vare={:.5} mcle={:.5} ratio={:.2} time vare={:.2e}s mcle={:.2e}s",
            self.d,
            self.tau,
            self.n_dummy,
            self.amse_vare,
            self.amse_mcle,
            self.ratio(),
            self.time_vare,
            self.time_mcle
        )
    }
}

/// Options of the dimension-scaling and timing studies.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub dims: Vec<usize>,
    pub taus: Vec<f64>,
    pub mu_star: f64,
    pub replications: usize,
    pub seed: u64,
    pub quadrature: QuadratureKind,
    /// Run replications in parallel (timings are cleaner when serial).
    pub parallel: bool,
}

impl ScalingConfig {
    pub fn new(dims: Vec<usize>, taus: Vec<f64>, mu_star: f64, replications: usize, seed: u64) -> Self {
        ScalingConfig {
            dims,
            taus,
            mu_star,
            replications,
            seed,
            quadrature: QuadratureKind::BermanTurner,
            parallel: true,
        }
    }
}

/// Poisson process with the sine model on `[-1, 1]^d`, all `theta_i = 1`.
/// VARE uses `h = div z`; MCLE uses `n_D = tau mu_star` dummy points on a
/// regular grid with `round(n_D^(1/d))` points per axis. The same patterns
/// are fed to both estimators and to every `tau`.
pub fn run_scaling(cfg: &ScalingConfig) -> Result<Vec<ScalingRow>> {
    let mut rows = Vec::new();
    for (cell, &d) in cfg.dims.iter().enumerate() {
        let w = Window::cube(d, -1.0, 1.0)?;
        let z: Arc<dyn Covariate> = Arc::new(builtin(ModelId::Sine, d)?);
        let theta = ModelId::Sine.true_theta(d);
        let spec = ProcessSpec::new(ProcessKind::Poisson, Arc::clone(&z), 0.0, theta.clone()).calibrated(&w, cfg.mu_star);
        let sim = Simulator::new(&spec, &w)?;
        let simulate = |rep: usize| sim.simulate(&mut replication_rng(cfg.seed, cell as u64, rep as u64));
        let patterns: Vec<PointPattern> = if cfg.parallel {
            (0..cfg.replications).into_par_iter().map(simulate).collect::<Result<_>>()?
        } else {
            (0..cfg.replications).map(simulate).collect::<Result<_>>()?
        };
        let h = TestFunction::div_z();
        let vare_fit = |x: &PointPattern| timed(|| vare(x, z.as_ref(), &h).ok().map(|r| r.theta_hat.as_slice().to_vec()));
        let vare_runs: Vec<(Option<Vec<f64>>, f64)> = if cfg.parallel {
            patterns.par_iter().map(vare_fit).collect()
        } else {
            patterns.iter().map(vare_fit).collect()
        };
        let (vare_est, vare_times): (Vec<_>, Vec<_>) = vare_runs.into_iter().unzip();
        let amse_vare = mse_and_amse(&vare_est, &theta).1;
        for &tau in &cfg.taus {
            let per_axis = ((tau * cfg.mu_star).powf(1.0 / d as f64)).round().max(1.0) as usize;
            let grid = Grid::uniform(&w, per_axis)?;
            let scheme = match cfg.quadrature {
                QuadratureKind::Midpoint => QuadratureScheme::Midpoint(grid.clone()),
                QuadratureKind::BermanTurner => QuadratureScheme::berman_turner(grid.clone()),
            };
            let mcle_fit = |x: &PointPattern| {
                timed(|| mcle_with(x, z.as_ref(), &scheme).ok().map(|r| r.theta_hat.as_slice().to_vec()))
            };
            let runs: Vec<(Option<Vec<f64>>, f64)> = if cfg.parallel {
                patterns.par_iter().map(mcle_fit).collect()
            } else {
                patterns.iter().map(mcle_fit).collect()
            };
            let (est, times): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
            rows.push(ScalingRow {
                d,
                tau,
                mu_star: cfg.mu_star,
                n_dummy: grid.len(),
                amse_vare,
                amse_mcle: mse_and_amse(&est, &theta).1,
                time_vare: robust_mean_time(&vare_times),
                time_mcle: robust_mean_time(&times),
            });
        }
    }
    Ok(rows)
}

/// AMSE ratios MCLE/VARE across dimensions and dummy-point densities.
pub fn run_dimension_scaling(
    dims: &[usize],
    taus: &[f64],
    mu_star: f64,
    replications: usize,
    seed: u64,
) -> Result<Vec<ScalingRow>> {
    run_scaling(&ScalingConfig::new(dims.to_vec(), taus.to_vec(), mu_star, replications, seed))
}

/// Per-estimate wall times, replications run serially.
pub fn run_timing(dims: &[usize], taus: &[f64], mu_star: f64, replications: usize, seed: u64) -> Result<Vec<ScalingRow>> {
    let mut cfg = ScalingConfig::new(dims.to_vec(), taus.to_vec(), mu_star, replications, seed);
    cfg.parallel = false;
    run_scaling(&cfg)
}

/// Model 2 with `theta = (1, 1)`: VARE and MCLE with the analytic covariate
/// against their counterparts that only see `z` on a grid, one grid
/// resolution at a time.
pub fn local_covariate_config(window: WindowSetting, grids: &[usize], replications: usize, seed: u64) -> ExperimentConfig {
    let mut estimators = vec![EstimatorSpec::vare(TestFnKind::DivZ, None)];
    for &n in grids {
        estimators.push(EstimatorSpec::vare(TestFnKind::DivZ, None).local(n));
        estimators.push(EstimatorSpec::mcle(n));
        estimators.push(EstimatorSpec::mcle(n).local(n));
    }
    ExperimentConfig {
        theta: Some(vec![1.0, 1.0]),
        estimators,
        ..ExperimentConfig::new(ModelId::Two, &["poisson"], vec![window], replications, seed)
    }
}

pub fn run_local_covariate(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    run_experiment(cfg)
}

#[cfg(test)]
mod tests;
