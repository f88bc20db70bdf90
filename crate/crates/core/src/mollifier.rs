//! Smooth window indicator `eta_W = chi_{W eroded by eps} * phi_eps` built
//! from the compactly supported bump kernel
//! `phi(u) = c exp(-1 / (1 - |u|^2))` on the unit ball.
//!
//! `eta_W` equals 1 on the window eroded by `2 eps`, vanishes outside `W`,
//! and its divergence is `(1/eps) (chi * div phi)`, evaluated by quadrature
//! in unit-ball coordinates with the `1/eps` factor applied afterwards.

use std::sync::OnceLock;

use crate::error::Result;
use crate::geometry::Window;
use crate::quadrature::BallRule;

/// `exp(-1/(1-|w|^2))` inside the unit ball, 0 outside.
pub fn bump_unnormalized(w: &[f64]) -> f64 {
    let r2: f64 = w.iter().map(|x| x * x).sum();
    if r2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r2)).exp()
    }
}

/// Sum-of-partials divergence of the unnormalized bump.
pub fn div_bump_unnormalized(w: &[f64]) -> f64 {
    let r2: f64 = w.iter().map(|x| x * x).sum();
    if r2 >= 1.0 {
        return 0.0;
    }
    let s = 1.0 - r2;
    let sum: f64 = w.iter().sum();
    -2.0 * sum / (s * s) * (-1.0 / s).exp()
}

/// The normalized bump `phi(u)` in dimension `d`.
pub fn bump(u: &[f64], d: usize) -> f64 {
    debug_assert_eq!(u.len(), d);
    normalizing_constant(d) * bump_unnormalized(u)
}

/// Default Gauss-Legendre points per axis for the kernel constants.
fn constant_rule(d: usize) -> BallRule {
    BallRule::new(match d {
        1 => 400,
        2 => 200,
        3 => 60,
        4 => 30,
        5 => 16,
        _ => 10,
    })
}

const CACHED_DIMS: usize = 8;

fn cached(
    table: &'static [OnceLock<f64>; CACHED_DIMS],
    d: usize,
    compute: impl FnOnce() -> f64,
) -> f64 {
    match table.get(d) {
        Some(cell) => *cell.get_or_init(compute),
        None => compute(),
    }
}

/// The constant `c` making `phi` a probability density on `R^d`
/// (about 2.1436 for `d = 2`).
pub fn normalizing_constant(d: usize) -> f64 {
    assert!(d >= 1);
    static TABLE: [OnceLock<f64>; CACHED_DIMS] = [const { OnceLock::new() }; CACHED_DIMS];
    cached(&TABLE, d, || {
        let lo = vec![-1.0; d];
        let hi = vec![1.0; d];
        let [mass] = constant_rule(d).integrate(&lo, &hi, None, &mut |w| [bump_unnormalized(w)]);
        1.0 / mass
    })
}

/// `int_{B(0,1)} |div phi0(v)| dv` for the *unnormalized* kernel
/// `phi0 = exp(-1/(1-|v|^2))` (about 1.256 for `d = 2`).
///
/// Multiply by [`normalizing_constant`] for the same integral of the
/// normalized kernel, which is what bounds `eps * |div eta|`.
pub fn kappa(d: usize) -> f64 {
    assert!(d >= 1);
    static TABLE: [OnceLock<f64>; CACHED_DIMS] = [const { OnceLock::new() }; CACHED_DIMS];
    cached(&TABLE, d, || {
        let lo = vec![-1.0; d];
        let hi = vec![1.0; d];
        // |div phi0| has a kink on the hyperplane sum(w) = 0
        let split = |w: &[f64]| -w.iter().sum::<f64>();
        let [k] = constant_rule(d).integrate(&lo, &hi, Some(&split), &mut |w| {
            [div_bump_unnormalized(w).abs()]
        });
        k
    })
}

fn default_points(d: usize) -> usize {
    match d {
        1 => 64,
        2 => 48,
        3 => 20,
        4 => 12,
        _ => 8,
    }
}

/// `eta_W` for a box window and smoothing width `eps`.
#[derive(Debug, Clone)]
pub struct Mollifier {
    window: Window,
    epsilon: f64,
    eroded: Window,
    plateau: Option<Window>,
    rule: BallRule,
    /// Same-rule integral of the unnormalized kernel over the whole ball.
    mass: f64,
}

impl Mollifier {
    pub fn new(window: &Window, epsilon: f64) -> Result<Self> {
        Self::with_resolution(window, epsilon, default_points(window.dim()))
    }

    /// `points_per_axis` sets the Gauss-Legendre order of the convolution
    /// quadrature.
    pub fn with_resolution(window: &Window, epsilon: f64, points_per_axis: usize) -> Result<Self> {
        assert!(epsilon > 0.0, "mollifier width must be positive");
        let eroded = window.erode(epsilon)?;
        let plateau = window.erode(2.0 * epsilon).ok();
        let rule = BallRule::new(points_per_axis);
        let d = window.dim();
        let [mass] = rule.integrate(&vec![-1.0; d], &vec![1.0; d], None, &mut |w| {
            [bump_unnormalized(w)]
        });
        Ok(Mollifier {
            window: window.clone(),
            epsilon,
            eroded,
            plateau,
            rule,
            mass,
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    /// Normalizing constant `c` of the kernel.
    pub fn c(&self) -> f64 {
        normalizing_constant(self.dim())
    }

    /// Upper bound on `|div eta|`: `c * kappa / eps`.
    pub fn div_bound(&self) -> f64 {
        self.c() * kappa(self.dim()) / self.epsilon
    }

    pub fn eta(&self, u: &[f64]) -> f64 {
        self.eta_and_div(u).0
    }

    pub fn div_eta(&self, u: &[f64]) -> f64 {
        self.eta_and_div(u).1
    }

    /// `(eta(u), div eta(u))` from one pass of the quadrature.
    pub fn eta_and_div(&self, u: &[f64]) -> (f64, f64) {
        if !self.window.contains(u) {
            return (0.0, 0.0);
        }
        if self.plateau.as_ref().is_some_and(|p| p.contains(u)) {
            return (1.0, 0.0);
        }
        let eps = self.epsilon;
        // u - eps w in [a, b]  <=>  w in [(u - b)/eps, (u - a)/eps]
        let lo: Vec<f64> = u
            .iter()
            .zip(self.eroded.upper())
            .map(|(x, b)| (x - b) / eps)
            .collect();
        let hi: Vec<f64> = u
            .iter()
            .zip(self.eroded.lower())
            .map(|(x, a)| (x - a) / eps)
            .collect();
        let [m, dm] = self.rule.integrate(&lo, &hi, None, &mut |w| {
            [bump_unnormalized(w), div_bump_unnormalized(w)]
        });
        ((m / self.mass).clamp(0.0, 1.0), dm / (self.mass * eps))
    }
}
