//! Simple convex terms `psi` for composite objectives `f + psi`.

use std::fmt::Debug;

pub trait CompositeTerm: Debug + Send + Sync {
    fn name(&self) -> &str;

    fn value(&self, x: &[f64]) -> f64;

    /// `prox_{step * psi}(v) = argmin_x psi(x) + ||x - v||^2 / (2 step)`,
    /// or `None` when no proximal map is available.
    fn prox(&self, v: &[f64], step: f64) -> Option<Vec<f64>>;
}

/// `psi = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZeroTerm;

impl CompositeTerm for ZeroTerm {
    fn name(&self) -> &str {
        "zero"
    }

    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn prox(&self, v: &[f64], _step: f64) -> Option<Vec<f64>> {
        Some(v.to_vec())
    }
}

/// `psi(x) = lambda ||x||_1`, whose prox is soft-thresholding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Norm {
    pub lambda: f64,
}

impl L1Norm {
    pub fn new(lambda: f64) -> Self {
        Self { lambda }
    }
}

pub fn soft_threshold(v: f64, threshold: f64) -> f64 {
    v.signum() * (v.abs() - threshold).max(0.0)
}

impl CompositeTerm for L1Norm {
    fn name(&self) -> &str {
        "l1"
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.lambda * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    fn prox(&self, v: &[f64], step: f64) -> Option<Vec<f64>> {
        let thr = step * self.lambda;
        Some(v.iter().map(|&vi| soft_threshold(vi, thr)).collect())
    }
}
