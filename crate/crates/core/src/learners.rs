//! Online learners for the two players.
//!
//! The y-player chooses gradients: optimistic follow-the-leader plays
//! `grad f(xtilde_t)`, plain follow-the-leader plays `grad f(xbar_{t-1})`.
//! The x-player moves second and sees `y_t` before committing; its
//! strategies are mirror descent (with online gradient descent as the
//! Euclidean special case), be-the-regularized-leader, proximal mirror
//! descent for composite games, the strongly convex leader of the linear-rate
//! game, and the gauge-regularized Frank–Wolfe leader.

use crate::composite::CompositeTerm;
use crate::error::{Error, Result};
use crate::geometry::BregmanGeometry;
use crate::objective::Objective;
use crate::schedule::{RoundWeights, StepSchedule};
use crate::set::FeasibleSet;
use crate::vector::{dot, scaled};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum YStrategy {
    OptimisticFtl,
    Ftl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XStrategy {
    MirrorDescent,
    Ogd,
    Btrl,
    ProxMd,
    StronglyConvexBtl,
    FwGauge,
}

/// Regularizer of the leader-style x-players.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularizer {
    /// The geometry's potential `phi` (`||x||^2 / 2` for Euclidean).
    Potential,
    /// `gauge(x)^2 / 2`, used by the Frank–Wolfe player.
    GaugeSquared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub steps: StepSchedule,
    pub eta: f64,
    pub geometry: BregmanGeometry,
    pub regularizer: Regularizer,
}

impl LearnerConfig {
    /// Euclidean geometry, `gamma_t = 1/(4L)` and `eta = 1/(4L)`.
    pub fn accelerated(smoothness: f64) -> Self {
        Self {
            steps: StepSchedule::accelerated(smoothness),
            eta: 1.0 / (4.0 * smoothness),
            geometry: BregmanGeometry::Euclidean,
            regularizer: Regularizer::Potential,
        }
    }

    pub fn with_steps(mut self, steps: StepSchedule) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_geometry(mut self, geometry: BregmanGeometry) -> Self {
        self.geometry = geometry;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_regularizer(mut self, regularizer: Regularizer) -> Self {
        self.regularizer = regularizer;
        self
    }
}

/// State visible to both players in round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundContext {
    pub weights: RoundWeights,
    /// `x_{t-1}`.
    pub x_prev: Vec<f64>,
    /// `xbar_{t-1}`.
    pub xbar_prev: Vec<f64>,
    /// `xtilde_t`.
    pub xtilde: Vec<f64>,
    /// `sum_{s<=t} alpha_s y_s` once the y-player has moved in round `t`
    /// (`sum_{s<t}` before).
    pub weighted_y_sum: Vec<f64>,
}

impl RoundContext {
    pub fn t(&self) -> usize {
        self.weights.t
    }

    pub fn alpha(&self) -> f64 {
        self.weights.alpha
    }

    /// Adds `alpha_t y_t` to the running sum.
    pub fn record_y(&mut self, y: &[f64]) {
        crate::vector::axpy(self.weights.alpha, y, &mut self.weighted_y_sum);
    }
}

/// Optimistic FTL: `y_t = grad f(xtilde_t)`.
pub fn oftl_y_step<O: Objective + ?Sized>(obj: &O, ctx: &RoundContext) -> Vec<f64> {
    obj.gradient(&ctx.xtilde)
}

/// FTL: `y_t = grad f(xbar_{t-1})`.
pub fn ftl_y_step<O: Objective + ?Sized>(obj: &O, ctx: &RoundContext) -> Vec<f64> {
    obj.gradient(&ctx.xbar_prev)
}

/// `argmin_{x in K} gamma_t <x, alpha_t y_t> + V_{x_{t-1}}(x)`.
pub fn mirror_descent_x_step(
    cfg: &LearnerConfig,
    set: &dyn FeasibleSet,
    ctx: &RoundContext,
    y: &[f64],
) -> Result<Vec<f64>> {
    let step = cfg.steps.at(ctx.t()) * ctx.alpha();
    set.bregman_project(&cfg.geometry, &ctx.x_prev, &scaled(step, y))
}

/// `x_t = x_{t-1} - gamma_t alpha_t y_t`.
pub fn ogd_x_step(cfg: &LearnerConfig, ctx: &RoundContext, y: &[f64]) -> Vec<f64> {
    let step = cfg.steps.at(ctx.t()) * ctx.alpha();
    ctx.x_prev
        .iter()
        .zip(y)
        .map(|(x, g)| x - step * g)
        .collect()
}

/// `argmin_{x in K} <x, sum_{s<=t} alpha_s y_s> + R(x) / eta` with `R` the
/// geometry's potential.
pub fn btrl_x_step(cfg: &LearnerConfig, set: &dyn FeasibleSet, ctx: &RoundContext) -> Result<Vec<f64>> {
    if cfg.regularizer != Regularizer::Potential {
        return Err(Error::InvalidSpec(
            "BTRL plays with the geometry's potential; use the Frank–Wolfe player for the gauge".into(),
        ));
    }
    // phi(x) = V_c(x) + <grad phi(c), x> + const for any anchor c
    let anchor = cfg.geometry.potential_minimizer(set.dim());
    let mut linear = cfg.geometry.potential_gradient(&anchor);
    for (l, s) in linear.iter_mut().zip(&ctx.weighted_y_sum) {
        *l += cfg.eta * s;
    }
    set.bregman_project(&cfg.geometry, &anchor, &linear)
}

/// `prox_{alpha_t gamma_t psi}(x_{t-1} - alpha_t gamma_t y_t)`.
pub fn prox_md_x_step(
    cfg: &LearnerConfig,
    psi: &dyn CompositeTerm,
    ctx: &RoundContext,
    y: &[f64],
) -> Result<Vec<f64>> {
    let step = cfg.steps.at(ctx.t()) * ctx.alpha();
    let v: Vec<f64> = ctx.x_prev.iter().zip(y).map(|(x, g)| x - step * g).collect();
    psi.prox(&v, step)
        .ok_or_else(|| Error::ProxUnavailable(psi.name().to_string()))
}

/// Leader on the cumulative strongly convex losses
/// `alpha_0 mu ||x||^2 / 2 + sum_{s<=t} alpha_s (<x, y_s> + mu ||x||^2 / 2)`,
/// i.e. `-(sum alpha_s y_s) / (mu Ã_t)` projected onto the set.
pub fn btl_strongly_convex_x_step(
    mu: f64,
    set: &dyn FeasibleSet,
    ctx: &RoundContext,
) -> Result<Vec<f64>> {
    if !(mu > 0.0) {
        return Err(Error::RequiresStrongConvexity);
    }
    let scale = 1.0 / (mu * ctx.weights.total_with_warmup);
    let d = set.dim();
    set.bregman_project(
        &BregmanGeometry::Euclidean,
        &vec![0.0; d],
        &scaled(scale, &ctx.weighted_y_sum),
    )
}

/// The warmup play: the minimizer of `alpha_0 mu ||x||^2 / 2`.
pub fn btl_warmup_play(dim: usize) -> Vec<f64> {
    vec![0.0; dim]
}

/// Gauge-regularized leader: with `L_t = sum_{s<=t} alpha_s y_s`, plays
/// `rho_t xhat_t` where `xhat_t` is the linear oracle's answer for `L_t` and
/// `rho_t = clamp(-eta <xhat_t, L_t> / 2, 0, 1)`.
///
/// This solves `min_{x in K, rho in [0,1]} rho <x, L_t> + rho^2 / eta`: for
/// fixed `rho` the inner problem is linear in `x`, and the outer one is a
/// clamped scalar quadratic.
pub fn fw_gauge_x_step(set: &dyn FeasibleSet, eta: f64, ctx: &RoundContext) -> Result<Vec<f64>> {
    let probe = vec![0.0; set.dim()];
    if set.gauge(&probe).is_none() {
        return Err(Error::MissingOracle("gauge"));
    }
    let cumulative = &ctx.weighted_y_sum;
    let vertex = set
        .linear_oracle(cumulative)
        .ok_or(Error::MissingOracle("linear minimization oracle"))?;
    let rho = (-eta * dot(&vertex, cumulative) / 2.0).clamp(0.0, 1.0);
    Ok(scaled(rho, &vertex))
}
