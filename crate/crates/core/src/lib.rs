//! Intensity estimation for spatial point processes with log-linear intensity
//! `rho(u) = exp(beta + theta' z(u))`.
//!
//! The crate provides the variational estimator of `theta` (a closed-form
//! solution of a linear estimating equation built from divergences of the
//! covariate), the first-order composite-likelihood estimator it is compared
//! against, simulators for Poisson, log-Gaussian Cox and Thomas processes,
//! and a replication harness for Monte Carlo studies.

pub mod covariate;
pub mod error;
pub mod estimate;
pub mod geometry;
pub mod harness;
pub mod mollifier;
pub mod quadrature;
pub mod simulate;

pub use covariate::{builtin, AnalyticField, Covariate, GridCovariate, ModelId};
pub use error::{Error, Result};
pub use estimate::{mcle, vare, McleResult, TestFnKind, TestFunction, VareResult};
pub use geometry::{Grid, Window};
pub use mollifier::Mollifier;
pub use simulate::{PointPattern, ProcessKind, ProcessSpec, Simulator};
