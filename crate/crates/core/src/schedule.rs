//! Round weights `alpha_t` and x-player step sizes `gamma_t`.

use crate::error::{Error, Result};

/// Weights `alpha_t` together with their running totals.
///
/// `A_t = alpha_1 + ... + alpha_t`. The exponential kind also carries a
/// warmup weight `alpha_0`, and its totals including warmup are
/// `Ã_t = alpha_0 + A_t`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSchedule {
    /// `alpha_t = t`, so `A_t = t(t+1)/2`.
    Linear,
    /// `alpha_t = c`.
    Constant(f64),
    /// `Ã_t = Ã_{t-1} / (1 - theta)` and `alpha_t = theta * Ã_t`, so that
    /// `alpha_t / Ã_t = theta` for every `t >= 1`.
    Exponential { theta: f64, warmup: f64 },
}

/// The weights of one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundWeights {
    pub t: usize,
    pub alpha: f64,
    /// `A_t`.
    pub total: f64,
    /// `A_{t-1}`.
    pub prev_total: f64,
    /// `Ã_t`; equals `total` for schedules without warmup.
    pub total_with_warmup: f64,
}

impl WeightSchedule {
    pub fn constant(c: f64) -> Result<Self> {
        if c > 0.0 && c.is_finite() {
            Ok(Self::Constant(c))
        } else {
            Err(Error::InvalidSchedule(format!("constant weight must be positive, got {c}")))
        }
    }

    /// Exponential weights with `theta = 1 / sqrt(6 kappa)`.
    pub fn exponential(kappa: f64, warmup: f64) -> Result<Self> {
        if !(kappa >= 1.0) || !kappa.is_finite() {
            return Err(Error::InvalidKappa(kappa));
        }
        if !(warmup > 0.0) || !warmup.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "warmup weight must be positive, got {warmup}"
            )));
        }
        Ok(Self::Exponential {
            theta: 1.0 / (6.0 * kappa).sqrt(),
            warmup,
        })
    }

    pub fn warmup(&self) -> f64 {
        match self {
            Self::Exponential { warmup, .. } => *warmup,
            _ => 0.0,
        }
    }

    /// `alpha_t` for `t >= 1`; `t = 0` gives the warmup weight.
    pub fn weight(&self, t: usize) -> f64 {
        if t == 0 {
            return self.warmup();
        }
        match self {
            Self::Linear => t as f64,
            Self::Constant(c) => *c,
            Self::Exponential { .. } => self.rounds().nth(t - 1).expect("unbounded").alpha,
        }
    }

    /// `A_t`.
    pub fn total(&self, t: usize) -> f64 {
        if t == 0 {
            return 0.0;
        }
        match self {
            Self::Linear => {
                let t = t as u64;
                (t * (t + 1) / 2) as f64
            }
            Self::Constant(c) => c * t as f64,
            Self::Exponential { .. } => self.rounds().nth(t - 1).expect("unbounded").total,
        }
    }

    /// `Ã_t` (equal to `A_t` without warmup).
    pub fn total_with_warmup(&self, t: usize) -> f64 {
        if t == 0 {
            return self.warmup();
        }
        self.rounds().nth(t - 1).expect("unbounded").total_with_warmup
    }

    /// Weights for rounds `1, 2, ...`. Totals accumulate by plain addition,
    /// so `total == prev_total + alpha` holds bit for bit (the linear kind
    /// reports its integer totals, which coincide).
    pub fn rounds(&self) -> RoundIter {
        RoundIter {
            schedule: self.clone(),
            t: 0,
            total: 0.0,
            with_warmup: self.warmup(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoundIter {
    schedule: WeightSchedule,
    t: usize,
    total: f64,
    with_warmup: f64,
}

impl Iterator for RoundIter {
    type Item = RoundWeights;

    fn next(&mut self) -> Option<RoundWeights> {
        self.t += 1;
        let t = self.t;
        let prev_total = self.total;
        let (alpha, total, with_warmup) = match &self.schedule {
            WeightSchedule::Linear => {
                let tu = t as u64;
                let total = (tu * (tu + 1) / 2) as f64;
                (t as f64, total, total)
            }
            WeightSchedule::Constant(c) => {
                let total = prev_total + c;
                (*c, total, total)
            }
            WeightSchedule::Exponential { theta, .. } => {
                let with_warmup = self.with_warmup / (1.0 - theta);
                let alpha = theta * with_warmup;
                (alpha, prev_total + alpha, with_warmup)
            }
        };
        self.total = total;
        self.with_warmup = with_warmup;
        Some(RoundWeights {
            t,
            alpha,
            total,
            prev_total,
            total_with_warmup: with_warmup,
        })
    }
}

/// Per-unit-weight step sizes `gamma_t` of the x-player. The step actually
/// taken in round `t` is `gamma_t * alpha_t`.
#[derive(Debug, Clone, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// `gamma_t = (t + 1) / (8 L t)`, non-increasing.
    Nesterov83 { smoothness: f64 },
    /// Explicit values for rounds `1..=len`; the last value repeats.
    Explicit(Vec<f64>),
}

impl StepSchedule {
    /// `gamma_t = 1 / (4L)`, the endpoint of the admissible window.
    pub fn accelerated(smoothness: f64) -> Self {
        Self::Constant(1.0 / (4.0 * smoothness))
    }

    pub fn nesterov83(smoothness: f64) -> Self {
        Self::Nesterov83 { smoothness }
    }

    pub fn at(&self, t: usize) -> f64 {
        debug_assert!(t >= 1);
        match self {
            Self::Constant(g) => *g,
            Self::Nesterov83 { smoothness } => (t as f64 + 1.0) / (8.0 * smoothness * t as f64),
            Self::Explicit(v) => v[(t - 1).min(v.len() - 1)],
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Self::Constant(_) => true,
            Self::Nesterov83 { .. } => false,
            Self::Explicit(v) => v.windows(2).all(|w| w[0] == w[1]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Constant(g) => *g > 0.0 && g.is_finite(),
            Self::Nesterov83 { smoothness } => *smoothness > 0.0 && smoothness.is_finite(),
            Self::Explicit(v) => {
                !v.is_empty()
                    && v.iter().all(|g| *g > 0.0 && g.is_finite())
                    && v.windows(2).all(|w| w[1] <= w[0])
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSchedule(format!(
                "step sizes must be positive and non-increasing: {self:?}"
            )))
        }
    }
}
