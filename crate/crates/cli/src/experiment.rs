//! Turning a configuration into game runs and their results.

use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use fenchel_core::audit::{certify_all, prefix_regrets, Certificate, PrefixRegret};
use fenchel_core::engine::{duality_gap_of, reference_comparator, run_game, GameSpec};
use fenchel_core::game::GameTrace;
use fenchel_core::geometry::BregmanGeometry;
use fenchel_core::learners::{LearnerConfig, Regularizer, XStrategy, YStrategy};
use fenchel_core::problems::{by_name, ProblemInstance};
use fenchel_core::rates::{fit_rate_slope, RateFit};
use fenchel_core::schedule::{StepSchedule, WeightSchedule};

use crate::config::{ExperimentConfig, GeometryChoice, MethodName, WeightChoice, XChoice, YChoice};

/// A validated experiment, ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: String,
    pub method: String,
    pub problem: ProblemInstance,
    pub spec: GameSpec,
    pub geometry: BregmanGeometry,
    pub horizons: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub rounds: usize,
    pub trace: GameTrace,
    pub gap: f64,
    pub certificates: Vec<Certificate>,
}

impl RunResult {
    pub fn all_pass(&self) -> bool {
        self.certificates.iter().all(|c| c.pass)
    }
}

fn method_label(cfg: &ExperimentConfig) -> String {
    match cfg.method.name {
        MethodName::Custom => format!(
            "custom:{:?}+{:?}",
            cfg.method.y.expect("checked"),
            cfg.method.x.expect("checked")
        )
        .to_lowercase(),
        name => serde_label(name),
    }
}

fn serde_label(name: MethodName) -> String {
    let debug = format!("{name:?}");
    let mut out = String::new();
    for (i, ch) in debug.chars().enumerate() {
        if ch.is_ascii_uppercase() && i > 0 {
            out.push('-');
        }
        out.push(ch.to_ascii_lowercase());
    }
    out
}

fn strategies(cfg: &ExperimentConfig) -> (YStrategy, XStrategy) {
    use MethodName::*;
    match cfg.method.name {
        OptimisticGd | Nesterov83 => (YStrategy::OptimisticFtl, XStrategy::Ogd),
        HeavyBall => (YStrategy::Ftl, XStrategy::Ogd),
        OneMemory => (YStrategy::OptimisticFtl, XStrategy::MirrorDescent),
        InfiniteMemory => (YStrategy::OptimisticFtl, XStrategy::Btrl),
        AcceleratedProx => (YStrategy::OptimisticFtl, XStrategy::ProxMd),
        AcceleratedFw => (YStrategy::OptimisticFtl, XStrategy::FwGauge),
        LinearRate => (YStrategy::OptimisticFtl, XStrategy::StronglyConvexBtl),
        Custom => {
            let y = match cfg.method.y.expect("checked") {
                YChoice::Oftl => YStrategy::OptimisticFtl,
                YChoice::Ftl => YStrategy::Ftl,
            };
            let x = match cfg.method.x.expect("checked") {
                XChoice::MirrorDescent => XStrategy::MirrorDescent,
                XChoice::Ogd => XStrategy::Ogd,
                XChoice::Btrl => XStrategy::Btrl,
                XChoice::ProxMd => XStrategy::ProxMd,
                XChoice::StronglyConvexBtl => XStrategy::StronglyConvexBtl,
                XChoice::FwGauge => XStrategy::FwGauge,
            };
            (y, x)
        }
    }
}

/// Builds and validates everything a run needs, without touching disk.
pub fn prepare(cfg: &ExperimentConfig, name: &str) -> Result<Experiment> {
    let problem = by_name(&cfg.problem.name, &cfg.problem_params()).context("problem")?;
    let obj = Arc::clone(&problem.objective);
    let l = obj.smoothness();
    let (y, x) = strategies(cfg);
    let m = &cfg.method;

    let gamma = m.gamma.unwrap_or(1.0 / (4.0 * l));
    let steps = if cfg.method.name == MethodName::Nesterov83 {
        if m.gamma.is_some() {
            bail!("method.gamma: the nesterov83 preset fixes its own steps");
        }
        StepSchedule::nesterov83(l)
    } else {
        StepSchedule::Constant(gamma)
    };
    let geometry = match m.geometry.unwrap_or(GeometryChoice::Euclidean) {
        GeometryChoice::Euclidean => BregmanGeometry::Euclidean,
        GeometryChoice::Entropy => BregmanGeometry::Entropy,
    };
    let regularizer = if x == XStrategy::FwGauge { Regularizer::GaugeSquared } else { Regularizer::Potential };
    let learner = LearnerConfig {
        steps,
        eta: m.eta.unwrap_or(1.0 / (4.0 * l)),
        geometry: geometry.clone(),
        regularizer,
    };
    let default_weights = if x == XStrategy::StronglyConvexBtl { WeightChoice::Exponential } else { WeightChoice::Linear };
    let schedule = match m.weights.unwrap_or(default_weights) {
        WeightChoice::Linear => WeightSchedule::Linear,
        WeightChoice::Constant => WeightSchedule::constant(m.alpha.unwrap_or(1.0)).context("method.alpha")?,
        WeightChoice::Exponential => {
            WeightSchedule::exponential(obj.condition_number(), m.warmup.unwrap_or(1.0)).context("method.weights")?
        }
    };
    let psi = match (&problem.psi, x) {
        (Some(psi), XStrategy::ProxMd) => Some(Arc::clone(psi)),
        (None, XStrategy::ProxMd) => bail!("method: the proximal player needs a composite problem"),
        (Some(_), _) => bail!("method: problem `{}` has a composite term; use accelerated-prox", problem.name),
        (None, _) => None,
    };
    let horizons = cfg.horizons();
    let mut spec = GameSpec {
        objective: obj,
        set: Arc::clone(&problem.set),
        schedule,
        y_strategy: y,
        x_strategy: x,
        learner,
        psi,
        rounds: *horizons.last().expect("checked non-empty"),
        x0: problem.x0.clone(),
        comparator: problem.optimum.clone(),
    };
    spec.validate().map_err(|e| anyhow!("method: {e}"))?;
    if spec.known_comparator().is_none() {
        spec.comparator = Some(reference_comparator(&spec).context("reference solution")?);
    }
    Ok(Experiment {
        name: name.to_string(),
        method: method_label(cfg),
        problem,
        spec,
        geometry,
        horizons,
    })
}

/// Runs every horizon in the worker pool; results come back in horizon
/// order.
pub fn execute(exp: &Experiment) -> Result<Vec<RunResult>> {
    exp.horizons
        .par_iter()
        .map(|&rounds| {
            let spec = exp.spec.clone().with_rounds(rounds);
            let trace = run_game(&spec).with_context(|| format!("run with T = {rounds}"))?;
            let gap = duality_gap_of(&trace)?;
            let certificates = certify_all(&trace, &exp.geometry)?;
            Ok(RunResult { rounds, trace, gap, certificates })
        })
        .collect()
}

/// Log-log slope of the final gaps, when at least three usable horizons
/// exist.
pub fn slope_of(results: &[RunResult]) -> Option<RateFit> {
    let pts: Vec<(f64, f64)> = results.iter().map(|r| (r.rounds as f64, r.gap)).collect();
    fit_rate_slope(&pts).ok()
}

pub fn prefix_rows(result: &RunResult) -> Result<Vec<PrefixRegret>> {
    Ok(prefix_regrets(&result.trace)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_labels_are_kebab_case() {
        assert_eq!(serde_label(MethodName::OptimisticGd), "optimistic-gd");
        assert_eq!(serde_label(MethodName::Nesterov83), "nesterov83");
        assert_eq!(serde_label(MethodName::AcceleratedFw), "accelerated-fw");
    }
}
