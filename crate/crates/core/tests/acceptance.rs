//! Acceptance suite: one line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::sync::Arc;

use fenchel_core::audit::{certify_rate_bound, regret_x, regret_y};
use fenchel_core::classical::{
    check_equivalence, game_averages, game_hints, nesterov83_run, nesterov_1mem_run, nesterov_infmem_run,
    DEFAULT_EQUIVALENCE_TOL,
};
use fenchel_core::engine::{gap_series, run_game, GameSpec};
use fenchel_core::geometry::BregmanGeometry;
use fenchel_core::learners::{LearnerConfig, Regularizer, XStrategy, YStrategy};
use fenchel_core::problems::{
    by_name, make_ball_quadratic, make_conditioned_quadratic, make_lasso_1d, make_logsumexp, ProblemInstance,
    ProblemParams, Quadratic,
};
use fenchel_core::rates::{fit_linear_rate, fit_rate_slope};
use fenchel_core::schedule::{StepSchedule, WeightSchedule};
use fenchel_core::set::Unconstrained;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const RATE_GRID: [usize; 8] = [32, 64, 128, 256, 512, 1024, 2048, 4096];

/// Reference value of the 20-dimensional l1 problem (`kappa = 100`,
/// `lambda = 1`, seed 0), computed once by proximal gradient iterated to a
/// fixed point.
const FROZEN_L1_OPTIMUM: f64 = -5.202_589_205_577_329e-2;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rate_bound_holds() -> Outcome {
    let p = make_conditioned_quadratic(50, 100.0, 0).map_err(|e| e.to_string())?;
    let mut details = vec![];
    let mut ok = true;
    for t in [10, 100, 1000] {
        let trace = run_game(&p.spec(t).with_strategies(YStrategy::OptimisticFtl, XStrategy::Ogd))
            .map_err(|e| e.to_string())?;
        let d = BregmanGeometry::Euclidean.divergence(&p.x0, &p.optimum.as_ref().unwrap().point);
        let cert = certify_rate_bound(&trace, d).map_err(|e| e.to_string())?;
        ok &= cert.pass;
        details.push(format!("T={t}: {:.3e} <= {:.3e}", cert.measured, cert.bound));
    }
    check(ok, details.join(", "))
}

fn slope_on_grid(spec: GameSpec) -> Result<f64, String> {
    let trace = run_game(&spec).map_err(|e| e.to_string())?;
    let gaps = gap_series(&trace).map_err(|e| e.to_string())?;
    let pts: Vec<(f64, f64)> = RATE_GRID.iter().map(|&t| (t as f64, gaps[t - 1])).collect();
    fit_rate_slope(&pts).map(|f| f.slope).map_err(|e| e.to_string())
}

fn rate_separation() -> Outcome {
    let p = make_logsumexp(20, 100, 0.01, 0).map_err(|e| e.to_string())?;
    let t = *RATE_GRID.last().unwrap();
    let optimistic = slope_on_grid(p.spec(t).with_strategies(YStrategy::OptimisticFtl, XStrategy::Ogd))?;
    let heavy_ball = slope_on_grid(p.spec(t).with_strategies(YStrategy::Ftl, XStrategy::Ogd))?;
    check(
        optimistic <= -1.8 && heavy_ball >= -1.4,
        format!("optimistic slope {optimistic:.3} (<= -1.8), heavy-ball slope {heavy_ball:.3} (>= -1.4)"),
    )
}

fn random_quadratic(seed: u64) -> (ProblemInstance, Vec<f64>) {
    let p = make_conditioned_quadratic(20, 100.0, 100 + seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0: Vec<f64> = (0..20).map(|_| rng.gen_range(-2.0..2.0)).collect();
    (p, x0)
}

fn nesterov83_equivalence() -> Outcome {
    let rounds = 100;
    let mut worst: f64 = 0.0;
    let mut control_failed = true;
    for seed in 0..10 {
        let (p, x0) = random_quadratic(seed);
        let l = p.objective.smoothness();
        let spec = GameSpec { x0: x0.clone(), ..p.spec(rounds) }
            .with_strategies(YStrategy::OptimisticFtl, XStrategy::Ogd)
            .with_learner(LearnerConfig::accelerated(l).with_steps(StepSchedule::nesterov83(l)));
        let trace = run_game(&spec).map_err(|e| e.to_string())?;
        let path = nesterov83_run(p.objective.as_ref(), &x0, 1.0 / (4.0 * l), rounds);
        let w = check_equivalence(&path.w[1..], &game_averages(&trace), DEFAULT_EQUIVALENCE_TOL);
        let z = check_equivalence(&path.z[..rounds], &game_hints(&trace), DEFAULT_EQUIVALENCE_TOL);
        worst = worst.max(w.max_deviation).max(z.max_deviation);
        let wrong = nesterov83_run(p.objective.as_ref(), &x0, 1.0 / (2.0 * l), rounds);
        control_failed &= !check_equivalence(&wrong.w[1..], &game_averages(&trace), DEFAULT_EQUIVALENCE_TOL).pass;
    }
    check(
        worst <= DEFAULT_EQUIVALENCE_TOL && control_failed,
        format!("max relative deviation {worst:.2e} over 10 quadratics; mismatched step control rejected: {control_failed}"),
    )
}

fn momentum_equivalence() -> Outcome {
    let rounds = 100;
    let mut cases: Vec<(ProblemInstance, Vec<f64>)> = (0..10).map(random_quadratic).collect();
    let ball = make_ball_quadratic(20, 100.0, 1.0, 2.0, 7).map_err(|e| e.to_string())?;
    let ball_x0 = ball.x0.clone();
    cases.push((ball, ball_x0));
    let mut worst: f64 = 0.0;
    for (p, x0) in &cases {
        let l = p.objective.smoothness();
        let geometry = BregmanGeometry::Euclidean;
        let base = GameSpec { x0: x0.clone(), ..p.spec(rounds) };
        let md = run_game(&base.clone().with_strategies(YStrategy::OptimisticFtl, XStrategy::MirrorDescent))
            .map_err(|e| e.to_string())?;
        let a = nesterov_1mem_run(p.objective.as_ref(), p.set.as_ref(), &geometry, x0, rounds)
            .map_err(|e| e.to_string())?;
        let btrl = run_game(&base.with_strategies(YStrategy::OptimisticFtl, XStrategy::Btrl))
            .map_err(|e| e.to_string())?;
        let b = nesterov_infmem_run(p.objective.as_ref(), p.set.as_ref(), &geometry, 1.0 / (4.0 * l), x0, rounds)
            .map_err(|e| e.to_string())?;
        for (path, trace) in [(&a, &md), (&b, &btrl)] {
            let w = check_equivalence(&path.w[1..], &game_averages(trace), DEFAULT_EQUIVALENCE_TOL);
            let z = check_equivalence(&path.z[1..], &game_hints(trace), DEFAULT_EQUIVALENCE_TOL);
            worst = worst.max(w.max_deviation).max(z.max_deviation);
        }
    }
    check(
        worst <= DEFAULT_EQUIVALENCE_TOL,
        format!("max relative deviation {worst:.2e} over options A and B, 10 quadratics plus a unit-ball instance"),
    )
}

fn linear_rate() -> Outcome {
    let p = make_conditioned_quadratic(50, 100.0, 0).map_err(|e| e.to_string())?;
    let spec = p
        .spec(300)
        .with_strategies(YStrategy::OptimisticFtl, XStrategy::StronglyConvexBtl)
        .with_schedule(WeightSchedule::exponential(100.0, 1.0).map_err(|e| e.to_string())?);
    let trace = run_game(&spec).map_err(|e| e.to_string())?;
    let gaps = gap_series(&trace).map_err(|e| e.to_string())?;
    let pts: Vec<(f64, f64)> = gaps.iter().enumerate().map(|(i, g)| ((i + 1) as f64, *g)).collect();
    let slope = fit_linear_rate(&pts).map_err(|e| e.to_string())?.slope;
    let target = (1.0 - 1.0 / 600f64.sqrt()).ln();
    let threshold = 0.8 * target;
    let ratio = gaps[299] / p.initial_gap().unwrap();
    check(
        slope <= threshold && ratio < 1e-8,
        format!("slope {slope:.4} (<= {threshold:.4}), final/initial gap {ratio:.2e} (< 1e-8)"),
    )
}

fn composite() -> Outcome {
    let lasso = make_lasso_1d(1.0, 3.0, 1.0).map_err(|e| e.to_string())?;
    let trace = run_game(&lasso.spec(300)).map_err(|e| e.to_string())?;
    let err = (trace.final_average()[0] - 2.0).abs();

    let p = by_name("l1-composite", &ProblemParams { dim: 20, kappa: 100.0, lambda: 1.0, seed: 0, ..Default::default() })
        .map_err(|e| e.to_string())?;
    let reference = p.optimum.as_ref().unwrap().value;
    let drift = (reference - FROZEN_L1_OPTIMUM).abs() / FROZEN_L1_OPTIMUM.abs();
    let mut spec = p.spec(*RATE_GRID.last().unwrap());
    spec.comparator.as_mut().unwrap().value = FROZEN_L1_OPTIMUM;
    let slope = slope_on_grid(spec)?;
    check(
        err <= 1e-3 && drift <= 1e-12 && slope <= -1.8,
        format!("lasso |xbar - 2| = {err:.2e}; 20-d reference drift {drift:.1e}, slope {slope:.3}"),
    )
}

fn frank_wolfe() -> Outcome {
    let mut details = vec![];
    let mut ok = true;
    for (label, free_norm) in [("interior", 0.5), ("binding", 2.0)] {
        let p = make_ball_quadratic(20, 100.0, 1.0, free_norm, 3).map_err(|e| e.to_string())?;
        let l = p.objective.smoothness();
        let spec = p
            .spec(*RATE_GRID.last().unwrap())
            .with_strategies(YStrategy::OptimisticFtl, XStrategy::FwGauge)
            .with_learner(LearnerConfig::accelerated(l).with_regularizer(Regularizer::GaugeSquared));
        let trace = run_game(&spec).map_err(|e| e.to_string())?;
        let max_gauge = trace
            .rounds
            .iter()
            .flat_map(|r| [p.set.gauge(&r.x).unwrap(), p.set.gauge(&r.xbar).unwrap()])
            .fold(0.0, f64::max);
        ok &= max_gauge <= 1.0 + 1e-9;
        let mut detail = format!("{label}: max gauge {max_gauge:.12}");
        if label == "binding" {
            let gaps = gap_series(&trace).map_err(|e| e.to_string())?;
            let pts: Vec<(f64, f64)> = RATE_GRID.iter().map(|&t| (t as f64, gaps[t - 1])).collect();
            let slope = fit_rate_slope(&pts).map_err(|e| e.to_string())?.slope;
            ok &= slope <= -1.8;
            detail.push_str(&format!(", slope {slope:.3}"));
        }
        details.push(detail);
    }
    check(ok, details.join("; "))
}

fn certificate_suite() -> Outcome {
    let mut failures = vec![];
    let mut count = 0;
    for seed in 0..100 {
        let run = common::suite_run(seed);
        for c in &run.certificates {
            count += 1;
            if !c.pass {
                failures.push(format!("{} {} slack {:.2e}", run.label, c.name, c.slack));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{count} certificates over 100 runs, zero failures"))
    } else {
        Err(failures.join("; "))
    }
}

fn fixture() -> Outcome {
    let spec = GameSpec::new(
        Arc::new(Quadratic::diagonal(vec![1.0], vec![0.0])),
        Arc::new(Unconstrained::new(1)),
        vec![1.0],
        3,
    )
    .with_strategies(YStrategy::OptimisticFtl, XStrategy::Ogd)
    .with_learner(LearnerConfig::accelerated(1.0).with_steps(StepSchedule::Constant(0.25)));
    let trace = run_game(&spec).map_err(|e| e.to_string())?;
    let mut two = trace.clone();
    two.rounds.truncate(2);
    let errs = [
        (trace.rounds[0].x[0] - 0.75).abs(),
        (trace.rounds[1].x[0] - 0.375).abs(),
        (trace.rounds[2].x[0] - 0.046875).abs(),
        (trace.final_average()[0] - 0.2734375).abs(),
        (regret_y(&two).map_err(|e| e.to_string())? - 0.125).abs(),
        (regret_x(&two, &[0.0]).map_err(|e| e.to_string())? - 1.3125).abs(),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    check(worst <= 1e-14, format!("max absolute error {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("2CLD/T^2 rate bound on the kappa=100 quadratic", rate_bound_holds),
        ("rate separation on log-sum-exp", rate_separation),
        ("1983 method equals the game", nesterov83_equivalence),
        ("one- and infinite-memory methods equal the game", momentum_equivalence),
        ("linear rate for strongly convex objectives", linear_rate),
        ("composite l1 problems", composite),
        ("accelerated Frank-Wolfe on the ball", frank_wolfe),
        ("certificate suite", certificate_suite),
        ("fixture exactness", fixture),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
