#![allow(dead_code)]

use std::sync::Arc;

use fenchel_core::audit::{certify_all, Certificate};
use fenchel_core::engine::{run_game, GameSpec};
use fenchel_core::game::{Comparator, GameTrace};
use fenchel_core::geometry::BregmanGeometry;
use fenchel_core::learners::{LearnerConfig, Regularizer, XStrategy, YStrategy};
use fenchel_core::objective::Objective;
use fenchel_core::problems::{
    by_name, make_ball_quadratic, make_conditioned_quadratic, ProblemParams, Quadratic,
};
use fenchel_core::schedule::{StepSchedule, WeightSchedule};
use fenchel_core::set::Simplex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of distinct configurations cycled through by [`suite_run`].
pub const SUITE_VARIANTS: usize = 15;

pub struct SuiteRun {
    pub label: String,
    pub certificates: Vec<Certificate>,
}

/// `0.5 ||x - c||^2`-like quadratic on the simplex whose unconstrained
/// minimizer `c` lies inside it.
fn simplex_problem(rng: &mut ChaCha8Rng, dim: usize) -> (Arc<Quadratic>, Comparator) {
    let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.1..1.0)).collect();
    let s: f64 = raw.iter().sum();
    let c: Vec<f64> = raw.iter().map(|v| v / s).collect();
    let q: Vec<f64> = (0..dim).map(|_| rng.gen_range(1.0..10.0)).collect();
    let b: Vec<f64> = q.iter().zip(&c).map(|(qi, ci)| qi * ci).collect();
    let quad = Quadratic::diagonal(q, b);
    let value = quad.value(&c);
    (Arc::new(quad), Comparator { point: c, value, exact: true })
}

/// One seeded run of the certificate suite. Variants cycle through every
/// strategy pair, three geometries and constant or decreasing steps.
pub fn suite_run(seed: u64) -> SuiteRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let variant = (seed as usize) % SUITE_VARIANTS;
    let dim = rng.gen_range(2..12);
    let rounds = rng.gen_range(5..200);
    let kappa = 10f64.powf(rng.gen_range(0.0..2.5));
    let gamma_scale = rng.gen_range(0.5..1.0);

    let quad = make_conditioned_quadratic(dim, kappa, seed).unwrap();
    let l = quad.objective.smoothness();
    let step = StepSchedule::Constant(gamma_scale / (4.0 * l));
    let learner = LearnerConfig::accelerated(l).with_steps(step.clone()).with_eta(gamma_scale / (4.0 * l));
    let mut x0: Vec<f64> = (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect();

    let (label, spec, geometry) = match variant {
        0..=5 => {
            let pairs = [
                (YStrategy::OptimisticFtl, XStrategy::MirrorDescent),
                (YStrategy::OptimisticFtl, XStrategy::Ogd),
                (YStrategy::OptimisticFtl, XStrategy::Btrl),
                (YStrategy::Ftl, XStrategy::Ogd),
                (YStrategy::Ftl, XStrategy::MirrorDescent),
                (YStrategy::Ftl, XStrategy::Btrl),
            ];
            let (y, x) = pairs[variant];
            let spec = quad.spec(rounds).with_strategies(y, x).with_learner(learner.clone());
            (format!("quadratic {y:?}+{x:?}"), GameSpec { x0: x0.clone(), ..spec }, BregmanGeometry::Euclidean)
        }
        6 => {
            let spec = quad
                .spec(rounds)
                .with_strategies(YStrategy::OptimisticFtl, XStrategy::StronglyConvexBtl)
                .with_schedule(WeightSchedule::exponential(kappa, rng.gen_range(0.5..2.0)).unwrap());
            ("quadratic linear-rate".into(), spec, BregmanGeometry::Euclidean)
        }
        7 | 13 | 14 => {
            let free = rng.gen_range(0.3..3.0);
            let p = make_ball_quadratic(dim, kappa, 1.0, free, seed).unwrap();
            let x = if variant == 14 { XStrategy::Btrl } else { XStrategy::MirrorDescent };
            let y = if variant == 13 { YStrategy::Ftl } else { YStrategy::OptimisticFtl };
            let spec = p.spec(rounds).with_strategies(y, x).with_learner(learner.clone());
            (format!("ball {y:?}+{x:?}"), spec, BregmanGeometry::Euclidean)
        }
        8..=10 => {
            let (obj, comparator) = simplex_problem(&mut rng, dim);
            let (y, x) = [
                (YStrategy::OptimisticFtl, XStrategy::MirrorDescent),
                (YStrategy::OptimisticFtl, XStrategy::Btrl),
                (YStrategy::Ftl, XStrategy::MirrorDescent),
            ][variant - 8];
            let l = obj.smoothness();
            let entropy = LearnerConfig::accelerated(l)
                .with_steps(StepSchedule::Constant(gamma_scale / (4.0 * l)))
                .with_eta(gamma_scale / (4.0 * l))
                .with_geometry(BregmanGeometry::Entropy);
            let spec = GameSpec::new(obj, Arc::new(Simplex::new(dim)), vec![1.0 / dim as f64; dim], rounds)
                .with_strategies(y, x)
                .with_learner(entropy)
                .with_comparator(comparator);
            (format!("simplex entropy {y:?}+{x:?}"), spec, BregmanGeometry::Entropy)
        }
        11 => {
            let free = rng.gen_range(0.3..3.0);
            let p = make_ball_quadratic(dim, kappa, 1.0, free, seed).unwrap();
            let l = p.objective.smoothness();
            let spec = p
                .spec(rounds)
                .with_strategies(YStrategy::OptimisticFtl, XStrategy::FwGauge)
                .with_learner(LearnerConfig::accelerated(l).with_regularizer(Regularizer::GaugeSquared));
            ("ball frank-wolfe".into(), spec, BregmanGeometry::Euclidean)
        }
        _ => {
            if variant == 12 {
                let p = by_name(
                    "l1-composite",
                    &ProblemParams { dim, kappa, lambda: rng.gen_range(0.01..1.0), seed, ..Default::default() },
                )
                .unwrap();
                let l = p.objective.smoothness();
                let spec = p.spec(rounds).with_learner(
                    LearnerConfig::accelerated(l).with_steps(StepSchedule::Constant(gamma_scale / (4.0 * l))),
                );
                ("l1 composite".into(), spec, BregmanGeometry::Euclidean)
            } else {
                unreachable!()
            }
        }
    };
    // decreasing steps on half of the mirror-descent runs
    let spec = if spec.x_strategy == XStrategy::MirrorDescent && rng.gen_bool(0.5) {
        let l = spec.objective.smoothness();
        let learner = spec.learner.clone().with_steps(StepSchedule::nesterov83(l));
        x0 = spec.x0.clone();
        GameSpec { x0, ..spec.with_learner(learner) }
    } else {
        spec
    };
    let label = format!("seed {seed}: {label} (gamma {:?}, T = {rounds})", spec.learner.steps);
    let trace = run_game(&spec).unwrap_or_else(|e| panic!("{label}: {e}"));
    let certificates = certify_all(&trace, &geometry).unwrap_or_else(|e| panic!("{label}: {e}"));
    SuiteRun { label, certificates }
}

/// Gaps of `trace` at the given horizons.
pub fn gaps_at(trace: &GameTrace, horizons: &[usize]) -> Vec<(f64, f64)> {
    let c = trace.comparator.as_ref().expect("comparator");
    horizons
        .iter()
        .map(|&t| (t as f64, trace.rounds[t - 1].objective_at_average - c.value))
        .collect()
}
