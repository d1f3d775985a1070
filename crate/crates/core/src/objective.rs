//! Smooth convex objectives.
//!
//! An [`Objective`] bundles value and gradient oracles with the constants the
//! game analysis needs: the gradient Lipschitz constant `L`, an optional
//! strong-convexity modulus `mu`, and optional closed forms for the conjugate
//! `f*` and the minimizer.

use std::fmt::Debug;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::vector::{dist, dist_sq, dot, norm_sq, sub};

/// A known minimizer together with its optimal value.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimizer {
    pub point: Vec<f64>,
    pub value: f64,
}

pub trait Objective: Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Lipschitz constant of the gradient.
    fn smoothness(&self) -> f64;

    /// Strong-convexity modulus; `0.0` for merely convex objectives.
    fn strong_convexity(&self) -> f64 {
        0.0
    }

    /// Closed-form conjugate `f*(y)`, when one is known.
    fn conjugate(&self, _y: &[f64]) -> Option<f64> {
        None
    }

    fn minimizer(&self) -> Option<Minimizer> {
        None
    }

    fn condition_number(&self) -> f64 {
        self.smoothness() / self.strong_convexity()
    }
}

impl<T: Objective + ?Sized> Objective for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
    fn smoothness(&self) -> f64 {
        (**self).smoothness()
    }
    fn strong_convexity(&self) -> f64 {
        (**self).strong_convexity()
    }
    fn conjugate(&self, y: &[f64]) -> Option<f64> {
        (**self).conjugate(y)
    }
    fn minimizer(&self) -> Option<Minimizer> {
        (**self).minimizer()
    }
}

/// `f(x) - (mu/2)||x||^2`, convex whenever `f` is `mu`-strongly convex.
///
/// The strongly convex game hands this function to the y-player.
#[derive(Debug, Clone)]
pub struct ShiftedObjective<O> {
    inner: O,
    mu: f64,
}

impl<O: Objective> ShiftedObjective<O> {
    pub fn new(inner: O, mu: f64) -> Self {
        Self { inner, mu }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

impl<O: Objective> Objective for ShiftedObjective<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(x) - 0.5 * self.mu * norm_sq(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.inner.gradient(x);
        for (gi, xi) in g.iter_mut().zip(x) {
            *gi -= self.mu * xi;
        }
        g
    }

    fn smoothness(&self) -> f64 {
        self.inner.smoothness() - self.mu
    }

    fn strong_convexity(&self) -> f64 {
        (self.inner.strong_convexity() - self.mu).max(0.0)
    }
}

/// Sampled violation counts for the [`Objective`] contracts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObjectiveCheck {
    pub gradient_violations: usize,
    pub smoothness_violations: usize,
    pub strong_convexity_violations: usize,
    pub max_gradient_rel_error: f64,
}

impl ObjectiveCheck {
    pub fn is_clean(&self) -> bool {
        self.gradient_violations == 0
            && self.smoothness_violations == 0
            && self.strong_convexity_violations == 0
    }
}

/// Probe an objective at random points around `center` with the given
/// spread: central finite differences for the gradient (relative error 1e-5),
/// Lipschitz-gradient and strong-convexity inequalities on sampled pairs
/// (slack `1e-9` scaled by the magnitudes involved).
pub fn check_objective<O: Objective + ?Sized>(
    obj: &O,
    center: &[f64],
    spread: f64,
    samples: usize,
    seed: u64,
) -> ObjectiveCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = obj.dim();
    let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        center
            .iter()
            .map(|c| c + spread * rng.gen_range(-1.0..1.0))
            .collect()
    };
    let mut out = ObjectiveCheck::default();
    let lip = obj.smoothness();
    let mu = obj.strong_convexity();

    for _ in 0..samples {
        let u = sample(&mut rng);
        let v = sample(&mut rng);
        let gu = obj.gradient(&u);
        let gv = obj.gradient(&v);

        // finite differences, one coordinate per sample to keep this cheap
        let i = rng.gen_range(0..d);
        let h = 1e-5 * (1.0 + u[i].abs());
        let mut up = u.clone();
        let mut dn = u.clone();
        up[i] += h;
        dn[i] -= h;
        let fd = (obj.value(&up) - obj.value(&dn)) / (2.0 * h);
        let scale = gu.iter().fold(1e-8_f64, |m, g| m.max(g.abs()));
        let rel = (fd - gu[i]).abs() / scale;
        out.max_gradient_rel_error = out.max_gradient_rel_error.max(rel);
        if rel > 1e-5 {
            out.gradient_violations += 1;
        }

        let lhs = dist(&gu, &gv);
        let rhs = lip * dist(&u, &v);
        if lhs > rhs + 1e-9 * (1.0 + rhs) {
            out.smoothness_violations += 1;
        }

        if mu > 0.0 {
            let fu = obj.value(&u);
            let fv = obj.value(&v);
            let lower = fu + dot(&gu, &sub(&v, &u)) + 0.5 * mu * dist_sq(&v, &u);
            if fv < lower - 1e-9 * (1.0 + fv.abs().max(lower.abs())) {
                out.strong_convexity_violations += 1;
            }
        }
    }
    out
}
