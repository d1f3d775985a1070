//! Classical accelerated recursions written out directly, and a checker
//! that compares their iterates with the game's averages.
//!
//! All sequences are indexed by round with entry `0` holding the start
//! point, so `w[t]` is `w_t`.

use crate::composite::CompositeTerm;
use crate::error::{Error, Result};
use crate::game::GameTrace;
use crate::geometry::BregmanGeometry;
use crate::objective::Objective;
use crate::schedule::{StepSchedule, WeightSchedule};
use crate::set::FeasibleSet;
use crate::vector::{axpy, combine, dist, dot, norm, scaled};

/// Iterates of the 1983 accelerated method.
#[derive(Debug, Clone, PartialEq)]
pub struct Nesterov83Path {
    pub w: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
    /// Set when `theta > 1/L`; the recursion still runs.
    pub step_exceeds_smoothness: bool,
}

/// `w_t = z_{t-1} - theta grad f(z_{t-1})`,
/// `z_t = w_t + ((t-1)/(t+2)) (w_t - w_{t-1})`, from `w_0 = z_0 = x0`.
pub fn nesterov83_run<O: Objective + ?Sized>(obj: &O, x0: &[f64], theta: f64, rounds: usize) -> Nesterov83Path {
    let mut w = vec![x0.to_vec()];
    let mut z = vec![x0.to_vec()];
    for t in 1..=rounds {
        let zp = &z[t - 1];
        let g = obj.gradient(zp);
        let wt: Vec<f64> = zp.iter().zip(&g).map(|(v, gi)| v - theta * gi).collect();
        let m = (t as f64 - 1.0) / (t as f64 + 2.0);
        let zt: Vec<f64> = wt.iter().zip(&w[t - 1]).map(|(a, b)| a + m * (a - b)).collect();
        w.push(wt);
        z.push(zt);
    }
    Nesterov83Path {
        w,
        z,
        step_exceeds_smoothness: theta > 1.0 / obj.smoothness(),
    }
}

/// `alpha_t A_{t-2} / (A_t alpha_{t-1})`, zero for `t <= 2`... and for any
/// round whose two-back prefix is empty.
pub fn momentum_coefficient(schedule: &WeightSchedule, t: usize) -> f64 {
    if t < 2 {
        return 0.0;
    }
    let a2 = schedule.total(t - 2);
    if a2 == 0.0 {
        return 0.0;
    }
    schedule.weight(t) * a2 / (schedule.total(t) * schedule.weight(t - 1))
}

/// Heavy-ball form of FTL against gradient descent:
/// `xbar_t = xbar_{t-1} - (gamma_t alpha_t^2 / A_t) grad f(xbar_{t-1})
///           + (alpha_t A_{t-2} / (A_t alpha_{t-1})) (xbar_{t-1} - xbar_{t-2})`.
pub fn heavy_ball_run<O: Objective + ?Sized>(
    obj: &O,
    x0: &[f64],
    steps: &StepSchedule,
    schedule: &WeightSchedule,
    rounds: usize,
) -> Vec<Vec<f64>> {
    let mut xbar = vec![x0.to_vec()];
    for (t, w) in (1..=rounds).zip(schedule.rounds()) {
        let prev = &xbar[t - 1];
        let g = obj.gradient(prev);
        let step = steps.at(t) * w.alpha * w.alpha / w.total;
        let m = if t >= 2 && w.prev_total > 0.0 && schedule.total(t - 2) > 0.0 {
            w.alpha * schedule.total(t - 2) / (w.total * schedule.weight(t - 1))
        } else {
            0.0
        };
        let mut next: Vec<f64> = prev.iter().zip(&g).map(|(v, gi)| v - step * gi).collect();
        if m != 0.0 {
            let back = &xbar[t - 2];
            for ((n, p), b) in next.iter_mut().zip(prev).zip(back) {
                *n += m * (p - b);
            }
        }
        xbar.push(next);
    }
    xbar
}

/// Iterates of the momentum methods with explicit `x`, `z` and `w`
/// registers, `beta_t = 2/(t+1)` and `w_0 = x_0`. `z[0]` repeats `x_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumPath {
    pub x: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
}

fn beta(t: usize) -> f64 {
    2.0 / (t as f64 + 1.0)
}

fn momentum_run(
    x0: &[f64],
    rounds: usize,
    mut step: impl FnMut(usize, &[f64], &[f64]) -> Result<Vec<f64>>,
) -> Result<MomentumPath> {
    let mut path = MomentumPath {
        x: vec![x0.to_vec()],
        z: vec![x0.to_vec()],
        w: vec![x0.to_vec()],
    };
    for t in 1..=rounds {
        let b = beta(t);
        let zt = combine(1.0 - b, &path.w[t - 1], b, &path.x[t - 1], 1.0);
        let xt = step(t, &zt, &path.x[t - 1])?;
        let wt = combine(1.0 - b, &path.w[t - 1], b, &xt, 1.0);
        path.x.push(xt);
        path.z.push(zt);
        path.w.push(wt);
    }
    Ok(path)
}

/// One-memory variant: `x_t = argmin_x gamma'_t <grad f(z_t), x> + V_{x_{t-1}}(x)`
/// with `gamma'_t = t / (4L)`.
pub fn nesterov_1mem_run<O: Objective + ?Sized>(
    obj: &O,
    set: &dyn FeasibleSet,
    geometry: &BregmanGeometry,
    x0: &[f64],
    rounds: usize,
) -> Result<MomentumPath> {
    let l = obj.smoothness();
    momentum_run(x0, rounds, |t, z, x_prev| {
        let g = obj.gradient(z);
        set.bregman_project(geometry, x_prev, &scaled(t as f64 / (4.0 * l), &g))
    })
}

/// Infinite-memory variant:
/// `x_t = argmin_x sum_{s<=t} theta_s <x, grad f(z_s)> + R(x) / eta` with
/// `theta_s = s` and `R` the geometry's potential.
pub fn nesterov_infmem_run<O: Objective + ?Sized>(
    obj: &O,
    set: &dyn FeasibleSet,
    geometry: &BregmanGeometry,
    eta: f64,
    x0: &[f64],
    rounds: usize,
) -> Result<MomentumPath> {
    let d = x0.len();
    let anchor = geometry.potential_minimizer(d);
    let anchor_grad = geometry.potential_gradient(&anchor);
    let mut cumulative = vec![0.0; d];
    momentum_run(x0, rounds, |t, z, _| {
        axpy(t as f64, &obj.gradient(z), &mut cumulative);
        let linear: Vec<f64> = anchor_grad.iter().zip(&cumulative).map(|(a, s)| a + eta * s).collect();
        set.bregman_project(geometry, &anchor, &linear)
    })
}

/// Plays, averages and hints of a directly written averaged method
/// (`alpha_t = t`). Entry `0` of `x` and `xbar` is the start point; entry
/// `0` of `xtilde` repeats it.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedPath {
    pub x: Vec<Vec<f64>>,
    pub xbar: Vec<Vec<f64>>,
    pub xtilde: Vec<Vec<f64>>,
}

fn averaged_run(
    x0: &[f64],
    rounds: usize,
    mut play: impl FnMut(usize, &[f64], &[f64]) -> Result<Vec<f64>>,
) -> Result<AveragedPath> {
    let mut path = AveragedPath {
        x: vec![x0.to_vec()],
        xbar: vec![x0.to_vec()],
        xtilde: vec![x0.to_vec()],
    };
    let mut total = 0.0;
    for t in 1..=rounds {
        let a = t as f64;
        let next_total = total + a;
        let hint = combine(a, &path.x[t - 1], total, &path.xbar[t - 1], next_total);
        let xt = play(t, &hint, &path.x[t - 1])?;
        let avg = combine(total, &path.xbar[t - 1], a, &xt, next_total);
        path.x.push(xt);
        path.xbar.push(avg);
        path.xtilde.push(hint);
        total = next_total;
    }
    Ok(path)
}

/// Accelerated proximal method:
/// `x_t = prox_{alpha_t gamma psi}(x_{t-1} - alpha_t gamma grad f(xtilde_t))`.
pub fn accel_prox_run<O: Objective + ?Sized>(
    obj: &O,
    psi: &dyn CompositeTerm,
    x0: &[f64],
    gamma: f64,
    rounds: usize,
) -> Result<AveragedPath> {
    averaged_run(x0, rounds, |t, hint, x_prev| {
        let step = t as f64 * gamma;
        let g = obj.gradient(hint);
        let v: Vec<f64> = x_prev.iter().zip(&g).map(|(x, gi)| x - step * gi).collect();
        psi.prox(&v, step)
            .ok_or_else(|| Error::ProxUnavailable(psi.name().to_string()))
    })
}

/// Accelerated Frank–Wolfe on a gauge-regularized leader: with
/// `L_t = sum_{s<=t} alpha_s grad f(xtilde_s)`, play `rho_t v_t` where `v_t`
/// minimizes `<v, L_t>` over the set and
/// `rho_t = clamp(-eta <v_t, L_t> / 2, 0, 1)`.
pub fn accel_fw_run<O: Objective + ?Sized>(
    obj: &O,
    set: &dyn FeasibleSet,
    eta: f64,
    x0: &[f64],
    rounds: usize,
) -> Result<AveragedPath> {
    let mut cumulative = vec![0.0; x0.len()];
    averaged_run(x0, rounds, |t, hint, _| {
        axpy(t as f64, &obj.gradient(hint), &mut cumulative);
        let v = set
            .linear_oracle(&cumulative)
            .ok_or(Error::MissingOracle("linear minimization oracle"))?;
        let rho = (-eta * dot(&v, &cumulative) / 2.0).clamp(0.0, 1.0);
        Ok(scaled(rho, &v))
    })
}

/// Per-round comparison of two iterate sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// `||a_t - b_t|| / (1 + ||b_t||)` for each compared round.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    /// Index of the largest deviation.
    pub worst_round: usize,
    pub rel_tol: f64,
    pub pass: bool,
}

pub const DEFAULT_EQUIVALENCE_TOL: f64 = 1e-9;

pub fn check_equivalence(a: &[Vec<f64>], b: &[Vec<f64>], rel_tol: f64) -> EquivalenceReport {
    let deviations: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(u, v)| {
            if u.len() != v.len() {
                f64::INFINITY
            } else {
                dist(u, v) / (1.0 + norm(v))
            }
        })
        .collect();
    let (worst_round, max_deviation) = deviations
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, &d)| if d > acc.1 || d.is_nan() { (i, d) } else { acc });
    let pass = a.len() == b.len() && max_deviation <= rel_tol;
    EquivalenceReport { deviations, max_deviation, worst_round, rel_tol, pass }
}

/// `xbar_1, ..., xbar_T` of a game trace.
pub fn game_averages(trace: &GameTrace) -> Vec<Vec<f64>> {
    trace.rounds.iter().map(|r| r.xbar.clone()).collect()
}

/// `xtilde_1, ..., xtilde_T` of a game trace.
pub fn game_hints(trace: &GameTrace) -> Vec<Vec<f64>> {
    trace.rounds.iter().map(|r| r.xtilde.clone()).collect()
}

/// `x_1, ..., x_T` of a game trace.
pub fn game_plays(trace: &GameTrace) -> Vec<Vec<f64>> {
    trace.rounds.iter().map(|r| r.x.clone()).collect()
}
