use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::covariate::Covariate;
use crate::error::{Error, Result};
use crate::geometry::Window;
use crate::mollifier::Mollifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TestFnKind {
    /// `h = div z`
    DivZ,
    /// `h = eta_W div z`
    EtaDivZ,
    /// `h = z`
    Z,
    /// `h = eta_W z`
    EtaZ,
}

impl TestFnKind {
    pub fn is_mollified(self) -> bool {
        matches!(self, TestFnKind::EtaDivZ | TestFnKind::EtaZ)
    }
}

impl FromStr for TestFnKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "div-z" => Ok(TestFnKind::DivZ),
            "eta-div-z" => Ok(TestFnKind::EtaDivZ),
            "z" => Ok(TestFnKind::Z),
            "eta-z" => Ok(TestFnKind::EtaZ),
            other => Err(Error::parse("test-fn", format!("unknown test function `{other}`"))),
        }
    }
}

impl fmt::Display for TestFnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestFnKind::DivZ => "div-z",
            TestFnKind::EtaDivZ => "eta-div-z",
            TestFnKind::Z => "z",
            TestFnKind::EtaZ => "eta-z",
        })
    }
}

impl TryFrom<String> for TestFnKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TestFnKind> for String {
    fn from(k: TestFnKind) -> String {
        k.to_string()
    }
}

/// Values needed at one point: `h(u)`, `div h(u)` and `div z(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTerms {
    pub h: Vec<f64>,
    pub div_h: Vec<f64>,
    pub div_z: Vec<f64>,
}

impl PointTerms {
    pub fn zeros(p: usize) -> Self {
        PointTerms {
            h: vec![0.0; p],
            div_h: vec![0.0; p],
            div_z: vec![0.0; p],
        }
    }
}

/// A test function `h` bound to a window. Mollified kinds with `eps = 0`
/// reduce to their unmollified base (`h = k`).
#[derive(Debug, Clone)]
pub struct TestFunction {
    kind: TestFnKind,
    mollifier: Option<Mollifier>,
}

impl TestFunction {
    pub fn new(kind: TestFnKind, window: &Window, epsilon: f64) -> Result<Self> {
        if epsilon < 0.0 {
            return Err(Error::parse("eps", "smoothing width must be non-negative"));
        }
        let mollifier = if kind.is_mollified() && epsilon > 0.0 {
            Some(Mollifier::new(window, epsilon)?)
        } else {
            None
        };
        Ok(TestFunction { kind, mollifier })
    }

    pub fn div_z() -> Self {
        TestFunction {
            kind: TestFnKind::DivZ,
            mollifier: None,
        }
    }

    pub fn with_mollifier(kind: TestFnKind, mollifier: Mollifier) -> Self {
        assert!(kind.is_mollified());
        TestFunction {
            kind,
            mollifier: Some(mollifier),
        }
    }

    pub fn kind(&self) -> TestFnKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.mollifier.as_ref().map_or(0.0, Mollifier::epsilon)
    }

    pub fn mollifier(&self) -> Option<&Mollifier> {
        self.mollifier.as_ref()
    }

    /// Evaluates `h`, `div h` and `div z` at `u` in one pass (the mollifier
    /// quadrature runs once per point).
    pub fn terms(&self, z: &dyn Covariate, u: &[f64]) -> PointTerms {
        let mut t = PointTerms::zeros(z.p());
        self.fill_terms(z, u, &mut t);
        t
    }

    /// Overwrites `t` (sized for `z.p()`) with the terms at `u`.
    pub fn fill_terms(&self, z: &dyn Covariate, u: &[f64], t: &mut PointTerms) {
        match self.kind {
            TestFnKind::DivZ | TestFnKind::EtaDivZ => {
                z.div_both_into(u, &mut t.div_z, &mut t.div_h);
                t.h.copy_from_slice(&t.div_z);
            }
            TestFnKind::Z | TestFnKind::EtaZ => {
                z.div_into(u, &mut t.div_z);
                z.value_into(u, &mut t.h);
                t.div_h.copy_from_slice(&t.div_z);
            }
        }
        if let Some(m) = &self.mollifier {
            let (eta, div_eta) = m.eta_and_div(u);
            // product rule: div(eta k_i) = eta div k_i + k_i div eta
            for (hi, dhi) in t.h.iter_mut().zip(t.div_h.iter_mut()) {
                *dhi = eta * *dhi + *hi * div_eta;
                *hi *= eta;
            }
        }
    }

    pub fn h(&self, z: &dyn Covariate, u: &[f64]) -> Vec<f64> {
        self.terms(z, u).h
    }

    pub fn div_h(&self, z: &dyn Covariate, u: &[f64]) -> Vec<f64> {
        self.terms(z, u).div_h
    }
}
