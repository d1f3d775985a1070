//! Weighted regrets of both players and runtime certificates for the
//! bounds they satisfy.
//!
//! Every certificate compares a measured quantity with an upper bound
//! computed from the same trace, and passes when
//! `bound - measured >= -1e-7 (1 + |bound|)`.

use crate::error::{Error, Result};
use crate::game::{Comparator, GameTrace, Payoff};
use crate::geometry::BregmanGeometry;
use crate::learners::{XStrategy, YStrategy};
use crate::objective::Objective;
use crate::vector::{dist_sq, dot, norm_sq, sub};

/// Relative tolerance of every certificate.
pub const CERTIFICATE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub name: &'static str,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
    /// The inequality being checked.
    pub statement: &'static str,
    /// `false` when the comparator is a numerical reference.
    pub exact_comparator: bool,
}

impl Certificate {
    pub fn new(name: &'static str, statement: &'static str, measured: f64, bound: f64) -> Self {
        let slack = bound - measured;
        Self {
            name,
            measured,
            bound,
            slack,
            pass: slack >= -CERTIFICATE_TOL * (1.0 + bound.abs()),
            statement,
            exact_comparator: true,
        }
    }

    fn with_comparator(mut self, c: &Comparator) -> Self {
        self.exact_comparator = c.exact;
        self
    }
}

fn comparator(trace: &GameTrace) -> Result<&Comparator> {
    trace.comparator.as_ref().ok_or(Error::NoReferenceMinimizer)
}

fn nonempty(trace: &GameTrace) -> Result<()> {
    if trace.is_empty() {
        Err(Error::InvalidSpec("trace has no rounds".into()))
    } else {
        Ok(())
    }
}

/// The y-player's comparator function at the average: `f` for the plain and
/// composite games, `f - mu ||.||^2 / 2` for the strongly convex one.
fn y_objective_at_average(trace: &GameTrace, t: usize) -> f64 {
    let r = &trace.rounds[t - 1];
    match &trace.meta.payoff {
        Payoff::Plain => r.objective_at_average,
        Payoff::Composite(psi) => r.objective_at_average - psi.value(&r.xbar),
        Payoff::StronglyConvex { mu } => r.objective_at_average - 0.5 * mu * norm_sq(&r.xbar),
    }
}

/// `sum_t alpha_t (f*(y_t) - <x_t, y_t>) + A_T f(xbar_T)`, the y-player's
/// regret against its best fixed gradient `grad f(xbar_T)`.
pub fn regret_y(trace: &GameTrace) -> Result<f64> {
    nonempty(trace)?;
    Ok(regret_y_series(trace).pop().expect("nonempty"))
}

/// [`regret_y`] for every prefix `1..=t`.
pub fn regret_y_series(trace: &GameTrace) -> Vec<f64> {
    let mut losses = 0.0;
    trace
        .rounds
        .iter()
        .map(|r| {
            losses += r.weighted_loss_y;
            losses + r.total * y_objective_at_average(trace, r.t)
        })
        .collect()
}

/// [`regret_y`] with `f*(y_t)` from the objective's closed form instead of
/// the recorded gradient witnesses.
pub fn regret_y_analytic<O: Objective + ?Sized>(trace: &GameTrace, obj: &O) -> Result<f64> {
    nonempty(trace)?;
    if matches!(trace.meta.payoff, Payoff::StronglyConvex { .. }) {
        return Err(Error::ConjugateUnavailable);
    }
    let mut losses = 0.0;
    for r in &trace.rounds {
        let conj = obj.conjugate(&r.y).ok_or(Error::ConjugateUnavailable)?;
        losses += r.alpha * (conj - dot(&r.x, &r.y));
    }
    let last = trace.last().expect("nonempty");
    Ok(losses + last.total * obj.value(&last.xbar))
}

/// `sum_t alpha_t (h_t(x_t) - h_t(x*))` where `h_t(x) = <x, y_t> - f*(y_t)`
/// plus the payoff's x-term (`psi` or `mu ||x||^2 / 2`).
pub fn regret_x(trace: &GameTrace, x_star: &[f64]) -> Result<f64> {
    nonempty(trace)?;
    Ok(regret_x_series(trace, x_star).pop().expect("nonempty"))
}

/// [`regret_x`] for every prefix `1..=t`.
pub fn regret_x_series(trace: &GameTrace, x_star: &[f64]) -> Vec<f64> {
    let star_term = trace.meta.payoff.x_term(x_star);
    let mut acc = 0.0;
    trace
        .rounds
        .iter()
        .map(|r| {
            let diff = sub(&r.x, x_star);
            acc += r.alpha * (dot(&diff, &r.y) + trace.meta.payoff.x_term(&r.x) - star_term);
            acc
        })
        .collect()
}

/// Regrets and their average for one prefix of a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrefixRegret {
    pub t: usize,
    pub regret_x: f64,
    pub regret_y: f64,
    /// `(regret_x + regret_y) / A_t`.
    pub eps_bound: f64,
}

pub fn prefix_regrets(trace: &GameTrace) -> Result<Vec<PrefixRegret>> {
    let c = comparator(trace)?;
    let rx = regret_x_series(trace, &c.point);
    let ry = regret_y_series(trace);
    Ok(trace
        .rounds
        .iter()
        .zip(rx.into_iter().zip(ry))
        .map(|(r, (regret_x, regret_y))| PrefixRegret {
            t: r.t,
            regret_x,
            regret_y,
            eps_bound: (regret_x + regret_y) / r.total,
        })
        .collect())
}

/// Squared movements `||x_{t-1} - x_t||^2` for `t = 1..=T`.
fn movements(trace: &GameTrace) -> Vec<f64> {
    (1..=trace.len())
        .map(|t| dist_sq(trace.previous_play(t), &trace.rounds[t - 1].x))
        .collect()
}

/// `f(xbar_T) - f(x*) <= (Regret_x + Regret_y) / A_T`.
pub fn certify_gap_bound(trace: &GameTrace) -> Result<Certificate> {
    let c = comparator(trace)?;
    let last = trace.last().ok_or(Error::InvalidSpec("trace has no rounds".into()))?;
    let bound = (regret_x(trace, &c.point)? + regret_y(trace)?) / last.total;
    let measured = last.objective_at_average - c.value;
    Ok(Certificate::new(
        "gap_bound",
        "f(xbar_T) - f(x*) <= (Regret_x + Regret_y) / A_T",
        measured,
        bound,
    )
    .with_comparator(c))
}

fn oftl_regret_bound(trace: &GameTrace) -> f64 {
    let l = trace.meta.smoothness;
    movements(trace)
        .iter()
        .zip(&trace.rounds)
        .map(|(m, r)| l * r.alpha * r.alpha / r.total * m)
        .sum()
}

fn require_y(trace: &GameTrace, strategy: YStrategy) -> Result<()> {
    if trace.meta.y_strategy == strategy {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "certificate applies to {strategy:?} y-players, trace used {:?}",
            trace.meta.y_strategy
        )))
    }
}

fn require_x(trace: &GameTrace, allowed: &[XStrategy]) -> Result<()> {
    if allowed.contains(&trace.meta.x_strategy) {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "certificate applies to {allowed:?} x-players, trace used {:?}",
            trace.meta.x_strategy
        )))
    }
}

/// Optimistic FTL: `Regret_y <= L sum_t (alpha_t^2 / A_t) ||x_{t-1} - x_t||^2`.
pub fn certify_oftl_regret(trace: &GameTrace) -> Result<Certificate> {
    require_y(trace, YStrategy::OptimisticFtl)?;
    Ok(Certificate::new(
        "oftl_regret",
        "Regret_y <= L sum_t (alpha_t^2 / A_t) ||x_{t-1} - x_t||^2",
        regret_y(trace)?,
        oftl_regret_bound(trace),
    ))
}

/// The constant `D` of the mirror-descent bound: `V_{x_0}(x*)` for constant
/// steps, the largest `V_{x_t}(x*)` seen otherwise.
pub fn divergence_constant(trace: &GameTrace, geometry: &BregmanGeometry, constant_steps: bool) -> Result<f64> {
    let c = comparator(trace)?;
    if constant_steps {
        Ok(geometry.divergence(&trace.x0, &c.point))
    } else {
        trace.max_divergence_to_comparator.ok_or(Error::NoReferenceMinimizer)
    }
}

fn gammas(trace: &GameTrace) -> Result<Vec<f64>> {
    trace
        .rounds
        .iter()
        .map(|r| r.gamma.ok_or_else(|| Error::InvalidSpec("trace has no step sizes".into())))
        .collect()
}

fn md_regret_bound(trace: &GameTrace, d: f64) -> Result<f64> {
    let gammas = gammas(trace)?;
    let last_gamma = *gammas.last().expect("nonempty");
    let decrease: f64 = movements(trace).iter().zip(&gammas).map(|(m, g)| m / (2.0 * g)).sum();
    Ok(d / last_gamma - decrease)
}

/// Mirror descent: `Regret_x <= D / gamma_T - sum_t ||x_{t-1} - x_t||^2 / (2 gamma_t)`.
pub fn certify_md_regret(trace: &GameTrace, d: f64) -> Result<Certificate> {
    require_x(trace, &[XStrategy::MirrorDescent, XStrategy::Ogd])?;
    let c = comparator(trace)?;
    Ok(Certificate::new(
        "md_regret",
        "Regret_x <= D / gamma_T - sum_t ||x_{t-1} - x_t||^2 / (2 gamma_t)",
        regret_x(trace, &c.point)?,
        md_regret_bound(trace, d)?,
    )
    .with_comparator(c))
}

/// Optimistic FTL against mirror descent:
/// `f(xbar_T) - f(x*) <= (D / gamma_T + sum_t (alpha_t^2 L / A_t - 1 / (2 gamma_t)) ||x_{t-1} - x_t||^2) / A_T`.
pub fn certify_accelerated_gap(trace: &GameTrace, d: f64) -> Result<Certificate> {
    require_y(trace, YStrategy::OptimisticFtl)?;
    require_x(trace, &[XStrategy::MirrorDescent, XStrategy::Ogd])?;
    let c = comparator(trace)?;
    let last = trace.last().expect("nonempty after comparator lookup");
    let bound = (oftl_regret_bound(trace) + md_regret_bound(trace, d)?) / last.total;
    Ok(Certificate::new(
        "accelerated_gap",
        "f(xbar_T) - f(x*) <= (D / gamma_T + sum_t (alpha_t^2 L / A_t - 1/(2 gamma_t)) ||x_{t-1} - x_t||^2) / A_T",
        last.objective_at_average - c.value,
        bound,
    )
    .with_comparator(c))
}

/// Constant steps `gamma = 1 / (C L)` with `alpha_t = t`:
/// `f(xbar_T) - f(x*) <= 2 C L D / T^2`.
pub fn certify_rate_bound(trace: &GameTrace, d: f64) -> Result<Certificate> {
    let c = comparator(trace)?;
    let last = trace.last().ok_or(Error::InvalidSpec("trace has no rounds".into()))?;
    let gammas = gammas(trace)?;
    if gammas.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::InvalidSchedule("the 2CLD/T^2 bound needs constant steps".into()));
    }
    let l = trace.meta.smoothness;
    let big_c = 1.0 / (gammas[0] * l);
    let t = trace.len() as f64;
    Ok(Certificate::new(
        "rate_bound",
        "f(xbar_T) - f(x*) <= 2 C L D / T^2 with gamma = 1/(C L)",
        last.objective_at_average - c.value,
        2.0 * big_c * l * d / (t * t),
    )
    .with_comparator(c))
}

/// FTL on strongly convex losses:
/// `Regret_y <= (1/2) sum_t alpha_t^2 L ||xbar_{t-1} - x_t||^2 / A_t`.
pub fn certify_heavy_ball_ftl(trace: &GameTrace) -> Result<Certificate> {
    require_y(trace, YStrategy::Ftl)?;
    let l = trace.meta.smoothness;
    let bound = (1..=trace.len())
        .map(|t| {
            let r = &trace.rounds[t - 1];
            0.5 * r.alpha * r.alpha * l * dist_sq(trace.previous_average(t), &r.x) / r.total
        })
        .sum();
    Ok(Certificate::new(
        "ftl_strongly_convex_regret",
        "Regret_y <= (1/2) sum_t alpha_t^2 L ||xbar_{t-1} - x_t||^2 / A_t",
        regret_y(trace)?,
        bound,
    ))
}

/// Be-the-regularized-leader:
/// `Regret_x <= (R(x*) - R(z) - (1/2) sum_t ||x_t - x_{t-1}||^2) / eta`
/// with `z = argmin R` standing in for `x_0`.
pub fn certify_btrl(trace: &GameTrace, geometry: &BregmanGeometry) -> Result<Certificate> {
    require_x(trace, &[XStrategy::Btrl])?;
    let c = comparator(trace)?;
    let eta = trace.meta.eta.ok_or_else(|| Error::InvalidSpec("trace has no eta".into()))?;
    let z = geometry.potential_minimizer(trace.x0.len());
    let mut prev = z.as_slice();
    let mut moved = 0.0;
    for r in &trace.rounds {
        moved += dist_sq(&r.x, prev);
        prev = &r.x;
    }
    let bound = (geometry.potential(&c.point) - geometry.potential(&z) - 0.5 * moved) / eta;
    Ok(Certificate::new(
        "btrl_regret",
        "Regret_x <= (R(x*) - R(z) - (1/2) sum_t ||x_t - x_{t-1}||^2) / eta",
        regret_x(trace, &c.point)?,
        bound,
    )
    .with_comparator(c))
}

/// The strongly convex leader with warmup `alpha_0`:
/// `Regret_x <= alpha_0 mu ||x*||^2 / 2 - sum_t mu Ã_{t-1} ||x_t - x_{t-1}||^2 / 2`.
pub fn certify_strongly_convex_btl(trace: &GameTrace) -> Result<Certificate> {
    require_x(trace, &[XStrategy::StronglyConvexBtl])?;
    let c = comparator(trace)?;
    let Payoff::StronglyConvex { mu } = trace.meta.payoff else {
        return Err(Error::RequiresStrongConvexity);
    };
    let decrease: f64 = movements(trace)
        .iter()
        .zip(&trace.rounds)
        .map(|(m, r)| 0.5 * mu * (r.total_with_warmup - r.alpha) * m)
        .sum();
    let bound = trace.meta.warmup * 0.5 * mu * (norm_sq(&c.point) - norm_sq(&trace.x0)) - decrease;
    Ok(Certificate::new(
        "strongly_convex_leader_regret",
        "Regret_x <= alpha_0 mu (||x*||^2 - ||x_0||^2) / 2 - sum_t mu Ã_{t-1} ||x_t - x_{t-1}||^2 / 2",
        regret_x(trace, &c.point)?,
        bound,
    )
    .with_comparator(c))
}

/// Every certificate that applies to the trace's strategies.
pub fn certify_all(trace: &GameTrace, geometry: &BregmanGeometry) -> Result<Vec<Certificate>> {
    let mut out = vec![certify_gap_bound(trace)?];
    match trace.meta.y_strategy {
        YStrategy::OptimisticFtl => out.push(certify_oftl_regret(trace)?),
        YStrategy::Ftl => out.push(certify_heavy_ball_ftl(trace)?),
    }
    match trace.meta.x_strategy {
        XStrategy::MirrorDescent | XStrategy::Ogd => {
            let gammas = gammas(trace)?;
            let constant = gammas.windows(2).all(|w| w[0] == w[1]);
            let d = divergence_constant(trace, geometry, constant)?;
            out.push(certify_md_regret(trace, d)?);
            if trace.meta.y_strategy == YStrategy::OptimisticFtl {
                out.push(certify_accelerated_gap(trace, d)?);
            }
        }
        XStrategy::Btrl => out.push(certify_btrl(trace, geometry)?),
        XStrategy::StronglyConvexBtl => out.push(certify_strongly_convex_btl(trace)?),
        XStrategy::ProxMd | XStrategy::FwGauge => {}
    }
    Ok(out)
}
