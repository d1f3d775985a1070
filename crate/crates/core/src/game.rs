//! The Fenchel game: payoff, conjugates at gradient witnesses, the two
//! weighted averages of the x-player's iterates, and the per-round trace.
//!
//! For a convex `f` the game pays `g(x, y) = <x, y> - f*(y)`; its value is
//! `min f`, and the weighted average `xbar_T` of any pair of no-regret
//! players is an approximate minimizer of `f`.

use std::fmt;
use std::sync::Arc;

use crate::composite::CompositeTerm;
use crate::error::{Error, Result};
use crate::learners::{XStrategy, YStrategy};
use crate::objective::Objective;
use crate::schedule::RoundWeights;
use crate::vector::{combine, dot, norm_sq};

/// `f*(grad f(w)) = <w, grad f(w)> - f(w)` (Fenchel–Young with equality).
pub fn conjugate_at_gradient<O: Objective + ?Sized>(obj: &O, w: &[f64]) -> f64 {
    let g = obj.gradient(w);
    dot(w, &g) - obj.value(w)
}

/// `f*(y)`: through the witness `w` (a point with `grad f(w) = y`) when one
/// is supplied, otherwise through the objective's closed form.
pub fn conjugate<O: Objective + ?Sized>(obj: &O, y: &[f64], witness: Option<&[f64]>) -> Result<f64> {
    match witness {
        Some(w) => Ok(conjugate_at_gradient(obj, w)),
        None => obj.conjugate(y).ok_or(Error::ConjugateUnavailable),
    }
}

/// `g(x, y) = <x, y> - f*(y)`.
pub fn payoff<O: Objective + ?Sized>(
    obj: &O,
    x: &[f64],
    y: &[f64],
    witness: Option<&[f64]>,
) -> Result<f64> {
    Ok(dot(x, y) - conjugate(obj, y, witness)?)
}

/// Running weighted averages of the x-player's plays.
///
/// `xbar_t = (1/A_t) sum_{s<=t} alpha_s x_s` and the optimistic average
/// `xtilde_t = (1/A_t)(alpha_t x_{t-1} + sum_{s<t} alpha_s x_s)`. Before the
/// first round both collapse to the start point `x_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Averages {
    xbar: Vec<f64>,
    last: Vec<f64>,
    total: f64,
}

impl Averages {
    pub fn new(x0: &[f64]) -> Self {
        Self {
            xbar: x0.to_vec(),
            last: x0.to_vec(),
            total: 0.0,
        }
    }

    /// `xbar_{t-1}` (with `xbar_0 = x_0`).
    pub fn average(&self) -> &[f64] {
        &self.xbar
    }

    /// `x_{t-1}`.
    pub fn last(&self) -> &[f64] {
        &self.last
    }

    /// `A_{t-1}`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// `xtilde_t` for the upcoming round with weights `w`.
    pub fn optimistic(&self, w: &RoundWeights) -> Vec<f64> {
        combine(w.alpha, &self.last, self.total, &self.xbar, w.total)
    }

    /// Folds `x_t` into the average and returns `xbar_t`.
    pub fn push(&mut self, w: &RoundWeights, x: &[f64]) -> &[f64] {
        self.xbar = combine(self.total, &self.xbar, w.alpha, x, w.total);
        self.last = x.to_vec();
        self.total = w.total;
        &self.xbar
    }
}

/// Folds `x_t` into `averages` and returns `(xbar_t, xtilde_{t+1})`.
pub fn update_averages(
    averages: &mut Averages,
    current: &RoundWeights,
    x: &[f64],
    next: &RoundWeights,
) -> (Vec<f64>, Vec<f64>) {
    let xbar = averages.push(current, x).to_vec();
    let xtilde = averages.optimistic(next);
    (xbar, xtilde)
}

/// Which game the trace was played on.
#[derive(Clone)]
pub enum Payoff {
    /// `<x, y> - f*(y)`.
    Plain,
    /// `<x, y> - f*(y) + psi(x)`.
    Composite(Arc<dyn CompositeTerm>),
    /// `<x, y> - ftilde*(y) + mu ||x||^2 / 2` with `ftilde = f - mu ||.||^2 / 2`.
    StronglyConvex { mu: f64 },
}

impl fmt::Debug for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Plain => write!(f, "Plain"),
            Self::Composite(psi) => write!(f, "Composite({})", psi.name()),
            Self::StronglyConvex { mu } => write!(f, "StronglyConvex {{ mu: {mu} }}"),
        }
    }
}

impl Payoff {
    /// The x-player's extra loss term: `psi(x)` or `mu ||x||^2 / 2`.
    pub fn x_term(&self, x: &[f64]) -> f64 {
        match self {
            Self::Plain => 0.0,
            Self::Composite(psi) => psi.value(x),
            Self::StronglyConvex { mu } => 0.5 * mu * norm_sq(x),
        }
    }
}

/// Reference point for regrets and gaps: a minimizer of the full objective
/// (`f`, or `f + psi` in the composite game) and its value.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparator {
    pub point: Vec<f64>,
    pub value: f64,
    /// `false` when the point comes from a long numerical run rather than
    /// a closed form.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: usize,
    pub alpha: f64,
    /// `A_t`.
    pub total: f64,
    /// `Ã_t`; equals `total` outside the strongly convex game.
    pub total_with_warmup: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub xbar: Vec<f64>,
    pub xtilde: Vec<f64>,
    /// `f(xbar_t)` (plus `psi(xbar_t)` in the composite game).
    pub objective_at_average: f64,
    /// The y-player's conjugate value `f*(y_t)` (of `ftilde` in the strongly
    /// convex game), from the gradient witness.
    pub conjugate_y: f64,
    /// `alpha_t l_t(y_t) = alpha_t (f*(y_t) - <x_t, y_t>)`.
    pub weighted_loss_y: f64,
    /// `alpha_t h_t(x_t)`, including `psi` or the quadratic term.
    pub weighted_loss_x: f64,
    /// Per-unit-weight step size, for step-based x-players.
    pub gamma: Option<f64>,
}

/// Static facts about the run that produced a trace.
#[derive(Debug, Clone)]
pub struct TraceMeta {
    pub y_strategy: YStrategy,
    pub x_strategy: XStrategy,
    pub payoff: Payoff,
    pub smoothness: f64,
    pub strong_convexity: f64,
    /// BTRL / Frank–Wolfe parameter.
    pub eta: Option<f64>,
    pub warmup: f64,
}

#[derive(Debug, Clone)]
pub struct GameTrace {
    pub meta: TraceMeta,
    pub x0: Vec<f64>,
    pub rounds: Vec<RoundRecord>,
    pub comparator: Option<Comparator>,
    /// Largest `V_{x_t}(x*)` over `t = 0..=T`, when a comparator is known.
    pub max_divergence_to_comparator: Option<f64>,
}

impl GameTrace {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn last(&self) -> Option<&RoundRecord> {
        self.rounds.last()
    }

    /// `xbar_T`, or `x_0` for an empty trace.
    pub fn final_average(&self) -> &[f64] {
        self.rounds.last().map_or(&self.x0, |r| &r.xbar)
    }

    /// `A_T`.
    pub fn total_weight(&self) -> f64 {
        self.rounds.last().map_or(0.0, |r| r.total)
    }

    /// `(xbar_T, ybar_T)`.
    pub fn output_pair(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.x0.len();
        let mut ybar = vec![0.0; d];
        for r in &self.rounds {
            crate::vector::axpy(r.alpha, &r.y, &mut ybar);
        }
        let total = self.total_weight();
        if total > 0.0 {
            ybar.iter_mut().for_each(|v| *v /= total);
        }
        (self.final_average().to_vec(), ybar)
    }

    /// `x_{t-1}` for round `t` (1-based); `x_0` is the start point, or the
    /// warmup minimizer in the strongly convex game.
    pub fn previous_play(&self, t: usize) -> &[f64] {
        if t <= 1 {
            &self.x0
        } else {
            &self.rounds[t - 2].x
        }
    }

    /// `xbar_{t-1}` for round `t`, with `xbar_0 = x_0`.
    pub fn previous_average(&self, t: usize) -> &[f64] {
        if t <= 1 {
            &self.x0
        } else {
            &self.rounds[t - 2].xbar
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::WeightSchedule;

    #[derive(Debug)]
    struct HalfSquare;

    impl Objective for HalfSquare {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            0.5 * x[0] * x[0]
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            x.to_vec()
        }
        fn smoothness(&self) -> f64 {
            1.0
        }
        fn conjugate(&self, y: &[f64]) -> Option<f64> {
            Some(0.5 * y[0] * y[0])
        }
    }

    #[test]
    fn payoff_scalar_examples() {
        assert_eq!(payoff(&HalfSquare, &[2.0], &[1.0], None).unwrap(), 1.5);
        assert_eq!(conjugate_at_gradient(&HalfSquare, &[3.0]), 4.5);
    }

    #[test]
    fn payoff_at_gradient_recovers_value() {
        for x in [-2.0, 0.3, 5.0] {
            let y = HalfSquare.gradient(&[x]);
            let g = payoff(&HalfSquare, &[x], &y, Some(&[x])).unwrap();
            assert!((g - HalfSquare.value(&[x])).abs() < 1e-15);
        }
    }

    #[derive(Debug)]
    struct NoConjugate;

    impl Objective for NoConjugate {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            x[0].exp()
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            vec![x[0].exp()]
        }
        fn smoothness(&self) -> f64 {
            1.0
        }
    }

    #[test]
    fn missing_conjugate_is_an_error() {
        assert!(matches!(
            payoff(&NoConjugate, &[1.0], &[2.0], None),
            Err(Error::ConjugateUnavailable)
        ));
        // with a witness the Fenchel–Young route works
        let w = [2.0_f64.ln()];
        let v = payoff(&NoConjugate, &[1.0], &[2.0], Some(&w)).unwrap();
        let expected = 2.0 - (2.0 * 2.0_f64.ln() - 2.0);
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn averages_collapse_to_start() {
        let avg = Averages::new(&[0.7, -1.0]);
        let w1 = WeightSchedule::Linear.rounds().next().unwrap();
        assert_eq!(avg.optimistic(&w1), vec![0.7, -1.0]);
    }

    #[test]
    fn averages_of_constant_history_are_constant() {
        let mut avg = Averages::new(&[2.5]);
        let mut rounds = WeightSchedule::Linear.rounds().peekable();
        for _ in 0..20 {
            let w = rounds.next().unwrap();
            let next = *rounds.peek().unwrap();
            let (xbar, xtilde) = update_averages(&mut avg, &w, &[2.5], &next);
            assert!((xbar[0] - 2.5).abs() < 1e-14 && (xtilde[0] - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn averages_fixture() {
        let mut avg = Averages::new(&[1.0]);
        let mut rounds = WeightSchedule::Linear.rounds();
        let (w1, w2, w3) = (rounds.next().unwrap(), rounds.next().unwrap(), rounds.next().unwrap());
        update_averages(&mut avg, &w1, &[0.75], &w2);
        let (xbar2, xtilde3) = update_averages(&mut avg, &w2, &[0.375], &w3);
        assert_eq!(xbar2, vec![0.5]);
        assert_eq!(xtilde3, vec![0.4375]);
    }
}
