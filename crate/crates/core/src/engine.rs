//! The weighted no-regret game loop.
//!
//! Each round the y-player commits first, then the x-player answers having
//! seen `y_t`. Losses are `l_t(y) = f*(y) - <x_t, y>` for the y-player and
//! `h_t(x) = <x, y_t> - f*(y_t)` (plus `psi(x)` in the composite game) for the
//! x-player. Conjugate values come from the gradient witness the y-player
//! used, so no closed-form `f*` is needed.

use std::sync::Arc;

use crate::composite::CompositeTerm;
use crate::error::{Error, Result};
use crate::game::{Averages, Comparator, GameTrace, Payoff, RoundRecord, TraceMeta};
use crate::geometry::BregmanGeometry;
use crate::learners::{
    btl_strongly_convex_x_step, btl_warmup_play, btrl_x_step, ftl_y_step, fw_gauge_x_step,
    mirror_descent_x_step, oftl_y_step, ogd_x_step, prox_md_x_step, LearnerConfig, Regularizer,
    RoundContext, XStrategy, YStrategy,
};
use crate::objective::{Objective, ShiftedObjective};
use crate::schedule::{StepSchedule, WeightSchedule};
use crate::set::FeasibleSet;
use crate::vector::{all_finite, dot, norm_sq};

/// Rounds of the reference run, as a multiple of the requested horizon.
pub const REFERENCE_MULTIPLIER: usize = 50;

/// Tolerance for `x_0` membership in the feasible set.
const START_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct GameSpec {
    pub objective: Arc<dyn Objective>,
    pub set: Arc<dyn FeasibleSet>,
    pub schedule: WeightSchedule,
    pub y_strategy: YStrategy,
    pub x_strategy: XStrategy,
    pub learner: LearnerConfig,
    pub psi: Option<Arc<dyn CompositeTerm>>,
    pub rounds: usize,
    pub x0: Vec<f64>,
    /// Minimizer used for regrets and gaps. When absent, the objective's
    /// closed-form minimizer is used for unconstrained smooth games.
    pub comparator: Option<Comparator>,
}

impl GameSpec {
    /// Optimistic FTL against Euclidean mirror descent with `alpha_t = t` and
    /// `gamma_t = 1/(4L)`.
    pub fn new(objective: Arc<dyn Objective>, set: Arc<dyn FeasibleSet>, x0: Vec<f64>, rounds: usize) -> Self {
        let learner = LearnerConfig::accelerated(objective.smoothness());
        Self {
            objective,
            set,
            schedule: WeightSchedule::Linear,
            y_strategy: YStrategy::OptimisticFtl,
            x_strategy: XStrategy::MirrorDescent,
            learner,
            psi: None,
            rounds,
            x0,
            comparator: None,
        }
    }

    pub fn with_strategies(mut self, y: YStrategy, x: XStrategy) -> Self {
        self.y_strategy = y;
        self.x_strategy = x;
        self
    }

    pub fn with_schedule(mut self, schedule: WeightSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_learner(mut self, learner: LearnerConfig) -> Self {
        self.learner = learner;
        self
    }

    pub fn with_psi(mut self, psi: Arc<dyn CompositeTerm>) -> Self {
        self.psi = Some(psi);
        self
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        self
    }

    pub fn with_comparator(mut self, comparator: Comparator) -> Self {
        self.comparator = Some(comparator);
        self
    }

    /// Checks dimensions, parameters and strategy/variant compatibility.
    pub fn validate(&self) -> Result<()> {
        let d = self.objective.dim();
        if self.set.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: self.set.dim() });
        }
        if self.x0.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: self.x0.len() });
        }
        if let Some(c) = &self.comparator {
            if c.point.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: c.point.len() });
            }
        }
        if self.rounds == 0 {
            return Err(Error::InvalidSpec("at least one round is required".into()));
        }
        if !all_finite(&self.x0) {
            return Err(Error::InvalidSpec("start point has non-finite entries".into()));
        }
        if let BregmanGeometry::Diagonal(w) = &self.learner.geometry {
            if w.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: w.len() });
            }
        }
        let linear_rate = self.x_strategy == XStrategy::StronglyConvexBtl;
        if matches!(self.schedule, WeightSchedule::Exponential { .. }) != linear_rate {
            return Err(Error::InvalidSpec(
                "exponential weights go together with the strongly convex leader".into(),
            ));
        }
        if !linear_rate && !self.set.contains(&self.x0, START_TOL) {
            return Err(Error::InvalidSpec("start point lies outside the feasible set".into()));
        }
        if self.psi.is_some() != (self.x_strategy == XStrategy::ProxMd) {
            return Err(Error::InvalidSpec(
                "a composite term requires the proximal x-player and vice versa".into(),
            ));
        }
        match self.x_strategy {
            XStrategy::MirrorDescent | XStrategy::Ogd | XStrategy::ProxMd => {
                self.learner.steps.validate()?;
                if let StepSchedule::Explicit(v) = &self.learner.steps {
                    if v.len() < self.rounds {
                        return Err(Error::InvalidSchedule(format!(
                            "{} explicit steps for {} rounds",
                            v.len(),
                            self.rounds
                        )));
                    }
                }
            }
            XStrategy::Btrl | XStrategy::FwGauge => {
                if !(self.learner.eta > 0.0 && self.learner.eta.is_finite()) {
                    return Err(Error::InvalidSpec(format!("eta must be positive, got {}", self.learner.eta)));
                }
            }
            XStrategy::StronglyConvexBtl => {}
        }
        match self.x_strategy {
            XStrategy::Ogd | XStrategy::ProxMd => {
                if !self.set.is_unconstrained() || self.learner.geometry != BregmanGeometry::Euclidean {
                    return Err(Error::InvalidSpec(format!(
                        "{:?} is an unconstrained Euclidean player",
                        self.x_strategy
                    )));
                }
            }
            XStrategy::Btrl if self.learner.regularizer != Regularizer::Potential => {
                return Err(Error::InvalidSpec("BTRL needs the potential regularizer".into()));
            }
            XStrategy::FwGauge => {
                let probe = vec![0.0; d];
                if self.set.gauge(&probe).is_none() {
                    return Err(Error::MissingOracle("gauge"));
                }
                if self.set.linear_oracle(&probe).is_none() {
                    return Err(Error::MissingOracle("linear minimization oracle"));
                }
            }
            XStrategy::StronglyConvexBtl => {
                if !(self.objective.strong_convexity() > 0.0) {
                    return Err(Error::RequiresStrongConvexity);
                }
                if self.y_strategy != YStrategy::OptimisticFtl {
                    return Err(Error::InvalidSpec(
                        "the strongly convex game pairs its leader with optimistic FTL".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// The comparator used for regrets: the explicit one, else the
    /// objective's closed-form minimizer when it is also the game's.
    pub fn known_comparator(&self) -> Option<Comparator> {
        if let Some(c) = &self.comparator {
            return Some(c.clone());
        }
        if self.psi.is_some() || !self.set.is_unconstrained() {
            return None;
        }
        self.objective.minimizer().map(|m| Comparator {
            point: m.point,
            value: m.value,
            exact: true,
        })
    }

    fn uses_steps(&self) -> bool {
        matches!(self.x_strategy, XStrategy::MirrorDescent | XStrategy::Ogd | XStrategy::ProxMd)
    }

    fn objective_with_psi(&self, x: &[f64]) -> f64 {
        self.objective.value(x) + self.psi.as_ref().map_or(0.0, |p| p.value(x))
    }
}

/// Plays the game for `spec.rounds` rounds.
///
/// The strongly convex leader is routed to [`run_linear_rate_game`].
pub fn run_game(spec: &GameSpec) -> Result<GameTrace> {
    spec.validate()?;
    if spec.x_strategy == XStrategy::StronglyConvexBtl {
        return linear_rate_loop(spec);
    }
    let obj = spec.objective.as_ref();
    let set = spec.set.as_ref();
    let comparator = spec.known_comparator();
    let payoff = match &spec.psi {
        Some(psi) => Payoff::Composite(Arc::clone(psi)),
        None => Payoff::Plain,
    };
    let mut trace = empty_trace(spec, payoff, spec.x0.clone(), comparator);

    let d = obj.dim();
    let mut averages = Averages::new(&spec.x0);
    let mut weighted_y_sum = vec![0.0; d];
    for weights in spec.schedule.rounds().take(spec.rounds) {
        let t = weights.t;
        let xtilde = averages.optimistic(&weights);
        let mut ctx = RoundContext {
            weights,
            x_prev: averages.last().to_vec(),
            xbar_prev: averages.average().to_vec(),
            xtilde,
            weighted_y_sum,
        };
        let (y, witness) = match spec.y_strategy {
            YStrategy::OptimisticFtl => (oftl_y_step(obj, &ctx), ctx.xtilde.clone()),
            YStrategy::Ftl => (ftl_y_step(obj, &ctx), ctx.xbar_prev.clone()),
        };
        let conjugate_y = dot(&witness, &y) - obj.value(&witness);
        ctx.record_y(&y);
        let x = match spec.x_strategy {
            XStrategy::MirrorDescent => mirror_descent_x_step(&spec.learner, set, &ctx, &y)?,
            XStrategy::Ogd => ogd_x_step(&spec.learner, &ctx, &y),
            XStrategy::Btrl => btrl_x_step(&spec.learner, set, &ctx)?,
            XStrategy::ProxMd => {
                let psi = spec.psi.as_ref().expect("validated");
                prox_md_x_step(&spec.learner, psi.as_ref(), &ctx, &y)?
            }
            XStrategy::FwGauge => fw_gauge_x_step(set, spec.learner.eta, &ctx)?,
            XStrategy::StronglyConvexBtl => unreachable!("routed to the linear-rate loop"),
        };
        if !all_finite(&x) || !all_finite(&y) || !conjugate_y.is_finite() {
            return Err(non_finite(t, trace));
        }
        let xbar = averages.push(&weights, &x).to_vec();
        let alpha = weights.alpha;
        let cross = dot(&x, &y);
        let record = RoundRecord {
            t,
            alpha,
            total: weights.total,
            total_with_warmup: weights.total_with_warmup,
            objective_at_average: spec.objective_with_psi(&xbar),
            conjugate_y,
            weighted_loss_y: alpha * (conjugate_y - cross),
            weighted_loss_x: alpha * (cross - conjugate_y + trace.meta.payoff.x_term(&x)),
            gamma: spec.uses_steps().then(|| spec.learner.steps.at(t)),
            x,
            y,
            xbar,
            xtilde: ctx.xtilde,
        };
        if !record.objective_at_average.is_finite() {
            return Err(non_finite(t, trace));
        }
        track_divergence(&mut trace, &spec.learner.geometry, &record.x);
        trace.rounds.push(record);
        weighted_y_sum = ctx.weighted_y_sum;
    }
    Ok(trace)
}

/// The strongly convex game: optimistic FTL on `f - mu ||x||^2 / 2` against
/// the strongly convex leader, with exponential weights and a warmup round
/// whose play is the origin.
pub fn run_linear_rate_game(spec: &GameSpec) -> Result<GameTrace> {
    if !(spec.objective.strong_convexity() > 0.0) {
        return Err(Error::RequiresStrongConvexity);
    }
    if spec.x_strategy != XStrategy::StronglyConvexBtl {
        return Err(Error::InvalidSpec(
            "the linear-rate game uses the strongly convex leader".into(),
        ));
    }
    spec.validate()?;
    linear_rate_loop(spec)
}

fn linear_rate_loop(spec: &GameSpec) -> Result<GameTrace> {
    let mu = spec.objective.strong_convexity();
    let shifted = ShiftedObjective::new(Arc::clone(&spec.objective), mu);
    let set = spec.set.as_ref();
    let d = shifted.dim();
    let x0 = btl_warmup_play(d);
    let comparator = spec.known_comparator();
    let mut trace = empty_trace(spec, Payoff::StronglyConvex { mu }, x0.clone(), comparator);

    let mut averages = Averages::new(&x0);
    let mut weighted_y_sum = vec![0.0; d];
    for weights in spec.schedule.rounds().take(spec.rounds) {
        let t = weights.t;
        let xtilde = averages.optimistic(&weights);
        let mut ctx = RoundContext {
            weights,
            x_prev: averages.last().to_vec(),
            xbar_prev: averages.average().to_vec(),
            xtilde,
            weighted_y_sum,
        };
        let y = oftl_y_step(&shifted, &ctx);
        let conjugate_y = dot(&ctx.xtilde, &y) - shifted.value(&ctx.xtilde);
        ctx.record_y(&y);
        let x = btl_strongly_convex_x_step(mu, set, &ctx)?;
        if !all_finite(&x) || !all_finite(&y) || !conjugate_y.is_finite() {
            return Err(non_finite(t, trace));
        }
        let xbar = averages.push(&weights, &x).to_vec();
        let alpha = weights.alpha;
        let cross = dot(&x, &y);
        let record = RoundRecord {
            t,
            alpha,
            total: weights.total,
            total_with_warmup: weights.total_with_warmup,
            objective_at_average: spec.objective.value(&xbar),
            conjugate_y,
            weighted_loss_y: alpha * (conjugate_y - cross),
            weighted_loss_x: alpha * (cross - conjugate_y + 0.5 * mu * norm_sq(&x)),
            gamma: None,
            x,
            y,
            xbar,
            xtilde: ctx.xtilde,
        };
        if !record.objective_at_average.is_finite() {
            return Err(non_finite(t, trace));
        }
        track_divergence(&mut trace, &BregmanGeometry::Euclidean, &record.x);
        trace.rounds.push(record);
        weighted_y_sum = ctx.weighted_y_sum;
    }
    Ok(trace)
}

fn empty_trace(spec: &GameSpec, payoff: Payoff, x0: Vec<f64>, comparator: Option<Comparator>) -> GameTrace {
    let eta = matches!(spec.x_strategy, XStrategy::Btrl | XStrategy::FwGauge).then_some(spec.learner.eta);
    let geometry = if spec.x_strategy == XStrategy::StronglyConvexBtl {
        BregmanGeometry::Euclidean
    } else {
        spec.learner.geometry.clone()
    };
    let max_divergence_to_comparator = comparator.as_ref().map(|c| geometry.divergence(&x0, &c.point));
    GameTrace {
        meta: TraceMeta {
            y_strategy: spec.y_strategy,
            x_strategy: spec.x_strategy,
            payoff,
            smoothness: spec.objective.smoothness(),
            strong_convexity: spec.objective.strong_convexity(),
            eta,
            warmup: spec.schedule.warmup(),
        },
        x0,
        rounds: Vec::with_capacity(spec.rounds),
        comparator,
        max_divergence_to_comparator,
    }
}

fn track_divergence(trace: &mut GameTrace, geometry: &BregmanGeometry, x: &[f64]) {
    if let (Some(c), Some(m)) = (&trace.comparator, trace.max_divergence_to_comparator.as_mut()) {
        let v = geometry.divergence(x, &c.point);
        if v > *m || v.is_nan() {
            *m = v;
        }
    }
}

fn non_finite(round: usize, partial: GameTrace) -> Error {
    Error::NonFiniteIterate { round, partial: Box::new(partial) }
}

/// `f(xbar_T) - f(x*)` (with `psi` added on both sides in the composite game).
pub fn duality_gap_of(trace: &GameTrace) -> Result<f64> {
    let comparator = trace.comparator.as_ref().ok_or(Error::NoReferenceMinimizer)?;
    let last = trace.last().ok_or(Error::InvalidSpec("empty trace".into()))?;
    Ok(last.objective_at_average - comparator.value)
}

/// Per-round gaps `f(xbar_t) - f(x*)`.
pub fn gap_series(trace: &GameTrace) -> Result<Vec<f64>> {
    let comparator = trace.comparator.as_ref().ok_or(Error::NoReferenceMinimizer)?;
    Ok(trace.rounds.iter().map(|r| r.objective_at_average - comparator.value).collect())
}

/// The spec of the method used for reference solutions: the accelerated
/// variant matching the spec's game, over `REFERENCE_MULTIPLIER` times its
/// horizon.
pub fn reference_spec(spec: &GameSpec) -> GameSpec {
    let mut reference = spec.clone();
    reference.comparator = None;
    reference.rounds = spec.rounds * REFERENCE_MULTIPLIER;
    reference.y_strategy = YStrategy::OptimisticFtl;
    if spec.x_strategy == XStrategy::StronglyConvexBtl {
        return reference;
    }
    let l = spec.objective.smoothness();
    reference.schedule = WeightSchedule::Linear;
    reference.learner = LearnerConfig::accelerated(l);
    reference.x_strategy = if spec.psi.is_some() {
        XStrategy::ProxMd
    } else {
        XStrategy::MirrorDescent
    };
    if !spec.set.contains(&spec.x0, START_TOL) {
        reference.x0 = spec.set.bregman_project(&BregmanGeometry::Euclidean, &spec.x0, &vec![0.0; spec.x0.len()])
            .unwrap_or_else(|_| spec.x0.clone());
    }
    reference
}

/// The comparator for `spec`: known when possible, otherwise the final
/// average of a long accelerated run (flagged as inexact).
pub fn reference_comparator(spec: &GameSpec) -> Result<Comparator> {
    if let Some(c) = spec.known_comparator() {
        return Ok(c);
    }
    let trace = run_game(&reference_spec(spec))?;
    let point = trace.final_average().to_vec();
    let value = spec.objective_with_psi(&point);
    Ok(Comparator { point, value, exact: false })
}

/// Runs `spec` after filling in its comparator.
pub fn run_game_with_reference(spec: &GameSpec) -> Result<GameTrace> {
    spec.validate()?;
    if spec.known_comparator().is_some() {
        return run_game(spec);
    }
    let comparator = reference_comparator(spec)?;
    run_game(&spec.clone().with_comparator(comparator))
}
