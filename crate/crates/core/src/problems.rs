//! Test problems with known or high-accuracy optima.
//!
//! Quadratics carry closed-form minimizers and conjugates. Log-sum-exp and
//! constrained or composite instances get reference optima from independent
//! solvers (damped Newton, the trust-region secular equation, proximal
//! gradient to a fixed point) rather than from the game engine.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::composite::{CompositeTerm, L1Norm};
use crate::engine::GameSpec;
use crate::error::{Error, Result};
use crate::game::Comparator;
use crate::learners::{XStrategy, YStrategy};
use crate::objective::{Minimizer, Objective};
use crate::set::{FeasibleSet, LpBall, Unconstrained};
use crate::vector::{dist, dot, norm, scaled};

/// `f(x) = x'Qx / 2 - b'x` with symmetric positive semidefinite `Q`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    q: DMatrix<f64>,
    b: DVector<f64>,
    smoothness: f64,
    strong_convexity: f64,
}

impl Quadratic {
    pub fn new(q: DMatrix<f64>, b: Vec<f64>) -> Result<Self> {
        let d = b.len();
        if q.nrows() != d || q.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: q.nrows() });
        }
        let q = (&q + q.transpose()) * 0.5;
        let eig = SymmetricEigen::new(q.clone()).eigenvalues;
        let smoothness = eig.max();
        let strong_convexity = eig.min().max(0.0);
        if eig.min() < -1e-12 * smoothness.abs().max(1.0) {
            return Err(Error::InvalidSpec("quadratic form is not positive semidefinite".into()));
        }
        Ok(Self { q, b: DVector::from_vec(b), smoothness, strong_convexity })
    }

    /// `Q = diag(q)`.
    pub fn diagonal(q: Vec<f64>, b: Vec<f64>) -> Self {
        let smoothness = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let strong_convexity = q.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
        Self {
            q: DMatrix::from_diagonal(&DVector::from_vec(q)),
            b: DVector::from_vec(b),
            smoothness,
            strong_convexity,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn linear_term(&self) -> &[f64] {
        self.b.as_slice()
    }

    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        if !(self.strong_convexity > 0.0) {
            return None;
        }
        self.q.clone().cholesky().map(|c| c.solve(rhs))
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        0.5 * x.dot(&(&self.q * &x)) - self.b.dot(&x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(x);
        (&self.q * x - &self.b).data.into()
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }

    fn conjugate(&self, y: &[f64]) -> Option<f64> {
        let shifted = DVector::from_column_slice(y) + &self.b;
        self.solve(&shifted).map(|s| 0.5 * shifted.dot(&s))
    }

    fn minimizer(&self) -> Option<Minimizer> {
        let x = self.solve(&self.b)?;
        let value = -0.5 * self.b.dot(&x);
        Some(Minimizer { point: x.data.into(), value })
    }
}

/// `f(x) = tau log sum_i exp(<a_i, x> / tau - c_i)`.
#[derive(Debug, Clone)]
pub struct LogSumExp {
    anchors: DMatrix<f64>,
    offsets: DVector<f64>,
    temperature: f64,
    smoothness: f64,
}

impl LogSumExp {
    /// `anchors` holds one anchor per row.
    pub fn new(anchors: DMatrix<f64>, offsets: Vec<f64>, temperature: f64) -> Result<Self> {
        if anchors.nrows() != offsets.len() {
            return Err(Error::DimensionMismatch { expected: anchors.nrows(), got: offsets.len() });
        }
        if !(temperature > 0.0) {
            return Err(Error::InvalidSpec(format!("temperature must be positive, got {temperature}")));
        }
        let max_sq = anchors.row_iter().map(|r| r.norm_squared()).fold(0.0, f64::max);
        Ok(Self {
            anchors,
            offsets: DVector::from_vec(offsets),
            temperature,
            smoothness: max_sq / temperature,
        })
    }

    fn logits(&self, x: &[f64]) -> DVector<f64> {
        &self.anchors * DVector::from_column_slice(x) / self.temperature - &self.offsets
    }

    fn softmax(&self, x: &[f64]) -> DVector<f64> {
        let z = self.logits(x);
        let m = z.max();
        let e = z.map(|v| (v - m).exp());
        let s = e.sum();
        e / s
    }

    /// `(A'PA - (A'p)(A'p)') / tau` with `P = diag(p)`.
    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let p = self.softmax(x);
        let g = self.anchors.transpose() * &p;
        let weighted = DMatrix::from_fn(self.anchors.nrows(), self.anchors.ncols(), |i, j| {
            p[i] * self.anchors[(i, j)]
        });
        (self.anchors.transpose() * weighted - &g * g.transpose()) / self.temperature
    }
}

impl Objective for LogSumExp {
    fn dim(&self) -> usize {
        self.anchors.ncols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let z = self.logits(x);
        let m = z.max();
        self.temperature * (m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln())
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.anchors.transpose() * self.softmax(x)).data.into()
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }
}

/// Objective, constraint set, optional composite term and a reference
/// optimum of `f + psi` over the set.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub name: String,
    pub objective: Arc<dyn Objective>,
    pub set: Arc<dyn FeasibleSet>,
    pub psi: Option<Arc<dyn CompositeTerm>>,
    pub seed: u64,
    pub optimum: Option<Comparator>,
    /// Suggested start point.
    pub x0: Vec<f64>,
}

impl ProblemInstance {
    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// The accelerated game on this problem: optimistic FTL against mirror
    /// descent, or against the proximal player when a composite term is
    /// present.
    pub fn spec(&self, rounds: usize) -> GameSpec {
        let mut spec = GameSpec::new(Arc::clone(&self.objective), Arc::clone(&self.set), self.x0.clone(), rounds);
        if let Some(psi) = &self.psi {
            spec = spec.with_psi(Arc::clone(psi)).with_strategies(YStrategy::OptimisticFtl, XStrategy::ProxMd);
        }
        spec.comparator = self.optimum.clone();
        spec
    }

    /// `f(x0) + psi(x0) - (f + psi)*`.
    pub fn initial_gap(&self) -> Option<f64> {
        let opt = self.optimum.as_ref()?;
        Some(self.full_value(&self.x0) - opt.value)
    }

    pub fn full_value(&self, x: &[f64]) -> f64 {
        self.objective.value(x) + self.psi.as_ref().map_or(0.0, |p| p.value(x))
    }
}

/// `n` values spaced evenly on a log scale from `lo` to `hi`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
            .collect(),
    }
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// A Haar-ish random orthogonal matrix from the QR factorization of a
/// Gaussian matrix, with signs fixed by the diagonal of `R`.
pub fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `x'Qx/2 - b'x` with `Q = U diag(spectrum) U'` for a seeded random
/// orthogonal `U`. A flat spectrum yields `Q = s I` exactly. When `b` is
/// `None` it is drawn from the same seeded stream. The start point is the
/// origin.
pub fn make_quadratic(dim: usize, spectrum: &[f64], b: Option<Vec<f64>>, seed: u64) -> Result<ProblemInstance> {
    if spectrum.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: spectrum.len() });
    }
    if spectrum.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::InvalidSpec("spectrum must be positive".into()));
    }
    if let Some(b) = &b {
        if b.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: b.len() });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flat = spectrum.windows(2).all(|w| w[0] == w[1]);
    let objective = if flat {
        let b = b.unwrap_or_else(|| gaussian_vec(&mut rng, dim));
        Quadratic::diagonal(spectrum.to_vec(), b)
    } else {
        let u = random_orthogonal(dim, &mut rng);
        let b = b.unwrap_or_else(|| gaussian_vec(&mut rng, dim));
        let q = &u * DMatrix::from_diagonal(&DVector::from_column_slice(spectrum)) * u.transpose();
        let mut quad = Quadratic::new(q, b)?;
        // the construction fixes the extreme eigenvalues
        quad.smoothness = spectrum.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        quad.strong_convexity = spectrum.iter().cloned().fold(f64::INFINITY, f64::min);
        quad
    };
    let optimum = objective.minimizer().map(|m| Comparator { point: m.point, value: m.value, exact: true });
    Ok(ProblemInstance {
        name: "quadratic".into(),
        objective: Arc::new(objective),
        set: Arc::new(Unconstrained::new(dim)),
        psi: None,
        seed,
        optimum,
        x0: vec![0.0; dim],
    })
}

/// The `dim`-dimensional quadratic with log-spaced spectrum in `[1, kappa]`.
pub fn make_conditioned_quadratic(dim: usize, kappa: f64, seed: u64) -> Result<ProblemInstance> {
    if !(kappa >= 1.0) {
        return Err(Error::InvalidKappa(kappa));
    }
    make_quadratic(dim, &log_spaced(1.0, kappa, dim), None, seed)
}

/// Scale of the logit offsets `c_i` in [`make_logsumexp`].
pub const LSE_OFFSET_SCALE: f64 = 1.0;
/// Norm of the start point in [`make_logsumexp`].
pub const LSE_START_RADIUS: f64 = 100.0;

/// Log-sum-exp over `anchors` unit-norm Gaussian directions, centered so
/// that the origin is their centroid (which keeps the minimizer finite),
/// with Gaussian offsets. The start point is a random point at distance
/// [`LSE_START_RADIUS`] from the origin.
pub fn make_logsumexp(dim: usize, anchors: usize, temperature: f64, seed: u64) -> Result<ProblemInstance> {
    if anchors <= dim {
        return Err(Error::InvalidSpec(format!(
            "need more anchors than dimensions for a bounded minimizer, got {anchors} <= {dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::from_fn(anchors, dim, |_, _| StandardNormal.sample(&mut rng));
    for mut row in a.row_iter_mut() {
        let n = row.norm();
        row /= n;
    }
    let mean = a.row_mean();
    for mut row in a.row_iter_mut() {
        row -= &mean;
    }
    let offsets: Vec<f64> = gaussian_vec(&mut rng, anchors).iter().map(|v| v * LSE_OFFSET_SCALE).collect();
    let mut x0 = gaussian_vec(&mut rng, dim);
    x0 = scaled(LSE_START_RADIUS / norm(&x0), &x0);
    let lse = LogSumExp::new(a, offsets, temperature)?;
    let optimum = logsumexp_reference(&lse, &x0)?;
    Ok(ProblemInstance {
        name: "logsumexp".into(),
        objective: Arc::new(lse),
        set: Arc::new(Unconstrained::new(dim)),
        psi: None,
        seed,
        optimum: Some(optimum),
        x0,
    })
}

/// Minimizer of a log-sum-exp objective: restarted accelerated gradient
/// steps to get close, then damped Newton to machine precision.
pub fn logsumexp_reference(lse: &LogSumExp, start: &[f64]) -> Result<Comparator> {
    let l = lse.smoothness();
    let mut x = start.to_vec();
    for _ in 0..20 {
        x = restart_block(lse, &x, l, 2000);
    }
    for _ in 0..100 {
        let g = lse.gradient(&x);
        if norm(&g) < 1e-14 {
            break;
        }
        let mut h = lse.hessian(&x);
        let ridge = 1e-14 * l;
        for i in 0..h.nrows() {
            h[(i, i)] += ridge;
        }
        let Some(chol) = h.cholesky() else { break };
        let step = chol.solve(&DVector::from_column_slice(&g));
        let f0 = lse.value(&x);
        let mut s = 1.0;
        let mut improved = false;
        while s > 1e-12 {
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, di)| xi - s * di).collect();
            let fc = lse.value(&cand);
            if fc <= f0 || norm(&lse.gradient(&cand)) < norm(&g) {
                x = cand;
                improved = true;
                break;
            }
            s /= 2.0;
        }
        if !improved {
            break;
        }
    }
    if !crate::vector::all_finite(&x) {
        return Err(Error::InvalidSpec("log-sum-exp reference solve diverged".into()));
    }
    let value = lse.value(&x);
    Ok(Comparator { point: x, value, exact: false })
}

/// One block of the accelerated recursion (`alpha_t = t`, step `1/(4L)`)
/// from `x`, returning its weighted average.
fn restart_block<O: Objective + ?Sized>(obj: &O, x: &[f64], l: f64, rounds: usize) -> Vec<f64> {
    let mut play = x.to_vec();
    let mut avg = x.to_vec();
    let mut total = 0.0;
    for t in 1..=rounds {
        let a = t as f64;
        let next_total = total + a;
        let hint: Vec<f64> = play.iter().zip(&avg).map(|(p, v)| (a * p + total * v) / next_total).collect();
        let g = obj.gradient(&hint);
        for (p, gi) in play.iter_mut().zip(&g) {
            *p -= a * gi / (4.0 * l);
        }
        for (v, p) in avg.iter_mut().zip(&play) {
            *v = (total * *v + a * p) / next_total;
        }
        total = next_total;
    }
    avg
}

/// `f(x) + lambda ||x||_1` for a given smooth quadratic part, with the
/// reference optimum found by proximal gradient iterated to a fixed point.
pub fn make_l1_composite(quadratic: Quadratic, lambda: f64, seed: u64) -> Result<ProblemInstance> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidSpec(format!("lambda must be non-negative, got {lambda}")));
    }
    let dim = quadratic.dim();
    let psi = L1Norm::new(lambda);
    let optimum = proximal_gradient_reference(&quadratic, &psi, &vec![0.0; dim], 1_000_000)?;
    Ok(ProblemInstance {
        name: "l1-composite".into(),
        objective: Arc::new(quadratic),
        set: Arc::new(Unconstrained::new(dim)),
        psi: Some(Arc::new(psi)),
        seed,
        optimum: Some(optimum),
        x0: vec![0.0; dim],
    })
}

/// `q (x - c)^2 / 2 + lambda |x|` with its closed-form minimizer
/// `soft_threshold(c, lambda / q)`. Starts at the origin.
pub fn make_lasso_1d(q: f64, center: f64, lambda: f64) -> Result<ProblemInstance> {
    if !(q > 0.0) || !(lambda >= 0.0) {
        return Err(Error::InvalidSpec("lasso needs q > 0 and lambda >= 0".into()));
    }
    let quad = Quadratic::diagonal(vec![q], vec![q * center]);
    let psi = L1Norm::new(lambda);
    let x = crate::composite::soft_threshold(center, lambda / q);
    // constant q c^2 / 2 dropped from f
    let value = quad.value(&[x]) + psi.value(&[x]);
    Ok(ProblemInstance {
        name: "lasso-1d".into(),
        objective: Arc::new(quad),
        set: Arc::new(Unconstrained::new(1)),
        psi: Some(Arc::new(psi)),
        seed: 0,
        optimum: Some(Comparator { point: vec![x], value, exact: true }),
        x0: vec![0.0],
    })
}

/// Minimizer of `f + psi` by `x <- prox_{psi/L}(x - grad f(x) / L)` until
/// the iterate stops moving.
pub fn proximal_gradient_reference<O: Objective + ?Sized>(
    obj: &O,
    psi: &dyn CompositeTerm,
    start: &[f64],
    max_iter: usize,
) -> Result<Comparator> {
    let step = 1.0 / obj.smoothness();
    let mut x = start.to_vec();
    for _ in 0..max_iter {
        let g = obj.gradient(&x);
        let v: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect();
        let next = psi
            .prox(&v, step)
            .ok_or_else(|| Error::ProxUnavailable(psi.name().to_string()))?;
        let moved = dist(&next, &x);
        x = next;
        if moved <= 1e-16 * (1.0 + norm(&x)) {
            break;
        }
    }
    let value = obj.value(&x) + psi.value(&x);
    Ok(Comparator { point: x, value, exact: false })
}

/// The `l_p` ball of the given radius.
pub fn make_ball_set(dim: usize, p: f64, radius: f64) -> Result<LpBall> {
    LpBall::new(dim, p, radius)
}

/// A conditioned quadratic restricted to the Euclidean ball of `radius`,
/// with `b` scaled so that the unconstrained minimizer has norm
/// `unconstrained_norm`. The start point is the origin.
pub fn make_ball_quadratic(
    dim: usize,
    kappa: f64,
    radius: f64,
    unconstrained_norm: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    let base = make_conditioned_quadratic(dim, kappa, seed)?;
    let x_free = base.optimum.as_ref().expect("strongly convex").point.clone();
    let scale = unconstrained_norm / norm(&x_free);
    let quad = rebuild_quadratic(&base, scale)?;
    let ball = make_ball_set(dim, 2.0, radius)?;
    let point = ball_constrained_minimizer(&quad, radius)?;
    let value = quad.value(&point);
    Ok(ProblemInstance {
        name: "ball-quadratic".into(),
        objective: Arc::new(quad),
        set: Arc::new(ball),
        psi: None,
        seed,
        optimum: Some(Comparator { point, value, exact: false }),
        x0: vec![0.0; dim],
    })
}

fn rebuild_quadratic(base: &ProblemInstance, scale: f64) -> Result<Quadratic> {
    // recover Q and b from gradient probes: grad f(x) = Qx - b
    let d = base.dim();
    let b: Vec<f64> = base.objective.gradient(&vec![0.0; d]).iter().map(|v| -v).collect();
    let q = DMatrix::from_fn(d, d, |i, j| {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        base.objective.gradient(&e)[i] + b[i]
    });
    let mut quad = Quadratic::new(q, scaled(scale, &b))?;
    quad.smoothness = base.objective.smoothness();
    quad.strong_convexity = base.objective.strong_convexity();
    Ok(quad)
}

/// `argmin_{||x|| <= r} x'Qx/2 - b'x` through the secular equation
/// `||(Q + lambda I)^{-1} b|| = r` in the eigenbasis of `Q`.
pub fn ball_constrained_minimizer(quad: &Quadratic, radius: f64) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::new(quad.matrix().clone());
    let coeffs = eig.eigenvectors.transpose() * DVector::from_column_slice(quad.linear_term());
    let point_for = |lambda: f64| -> DVector<f64> {
        let c = DVector::from_fn(coeffs.len(), |i, _| coeffs[i] / (eig.eigenvalues[i] + lambda));
        &eig.eigenvectors * c
    };
    let free = point_for(0.0);
    if free.norm() <= radius {
        return Ok(free.data.into());
    }
    let excess = |lambda: f64| point_for(lambda).norm() - radius;
    let (mut lo, mut hi) = (0.0, 1.0);
    while excess(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::ProjectionFailure("ball-constrained quadratic: no multiplier".into()));
        }
    }
    // bisect down to adjacent floats
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = hi;
    let mut x: Vec<f64> = point_for(lambda).data.into();
    // land exactly on the sphere
    let n = norm(&x);
    if n > radius {
        x = scaled(radius / n, &x);
    }
    Ok(x)
}

/// Construction parameters understood by [`by_name`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemParams {
    pub dim: usize,
    pub kappa: f64,
    pub seed: u64,
    pub anchors: usize,
    pub temperature: f64,
    pub lambda: f64,
    pub radius: f64,
    /// Norm of the unconstrained minimizer for `ball-quadratic`.
    pub unconstrained_norm: f64,
    pub center: f64,
}

impl Default for ProblemParams {
    fn default() -> Self {
        Self {
            dim: 20,
            kappa: 100.0,
            seed: 0,
            anchors: 100,
            temperature: 0.01,
            lambda: 1.0,
            radius: 1.0,
            unconstrained_norm: 2.0,
            center: 3.0,
        }
    }
}

/// Names accepted by [`by_name`].
pub const PROBLEM_NAMES: &[&str] = &["quadratic", "logsumexp", "l1-composite", "lasso-1d", "ball-quadratic"];

/// Builds a registered problem.
pub fn by_name(name: &str, p: &ProblemParams) -> Result<ProblemInstance> {
    let mut instance = match name {
        "quadratic" => make_conditioned_quadratic(p.dim, p.kappa, p.seed),
        "logsumexp" => make_logsumexp(p.dim, p.anchors, p.temperature, p.seed),
        "l1-composite" => {
            let base = make_conditioned_quadratic(p.dim, p.kappa, p.seed)?;
            let quad = rebuild_quadratic(&base, 1.0)?;
            make_l1_composite(quad, p.lambda, p.seed)
        }
        "lasso-1d" => make_lasso_1d(1.0, p.center, p.lambda),
        "ball-quadratic" => make_ball_quadratic(p.dim, p.kappa, p.radius, p.unconstrained_norm, p.seed),
        other => Err(Error::InvalidSpec(format!(
            "unknown problem `{other}` (known: {})",
            PROBLEM_NAMES.join(", ")
        ))),
    }?;
    instance.seed = p.seed;
    Ok(instance)
}

/// `max |grad f(x*)|`, the first-order residual of a smooth minimizer.
pub fn stationarity_residual<O: Objective + ?Sized>(obj: &O, x: &[f64]) -> f64 {
    crate::vector::max_abs(&obj.gradient(x))
}

/// `<grad f(x*), x - x*> >= 0` violation over sample points: the largest
/// negative value seen (zero when none).
pub fn variational_violation<O: Objective + ?Sized>(obj: &O, x_star: &[f64], samples: &[Vec<f64>]) -> f64 {
    let g = obj.gradient(x_star);
    samples
        .iter()
        .map(|u| dot(&g, &crate::vector::sub(u, x_star)))
        .fold(0.0_f64, |m, v| m.min(v))
        .abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::conjugate_at_gradient;
    use crate::objective::check_objective;
    use rand::Rng;

    #[test]
    fn flat_spectrum_is_identity() {
        let p = make_quadratic(4, &[1.0; 4], Some(vec![1.0, -2.0, 0.5, 3.0]), 9).unwrap();
        let opt = p.optimum.unwrap();
        assert_eq!(opt.point, vec![1.0, -2.0, 0.5, 3.0]);
    }

    #[test]
    fn scalar_quadratic() {
        let p = make_quadratic(1, &[2.0], Some(vec![2.0]), 0).unwrap();
        let opt = p.optimum.unwrap();
        assert!((opt.point[0] - 1.0).abs() < 1e-15);
        assert!((opt.value + 1.0).abs() < 1e-15);
        assert_eq!(p.objective.smoothness(), 2.0);
        assert_eq!(p.objective.strong_convexity(), 2.0);
    }

    #[test]
    fn conditioned_quadratic_minimizer_is_stationary() {
        let p = make_conditioned_quadratic(50, 100.0, 3).unwrap();
        assert!((p.objective.condition_number() - 100.0).abs() < 1e-9);
        let x = &p.optimum.as_ref().unwrap().point;
        assert!(stationarity_residual(p.objective.as_ref(), x) < 1e-10);
        // the extreme eigenvalues agree with a fresh decomposition
        let q = rebuild_quadratic(&p, 1.0).unwrap();
        let eig = SymmetricEigen::new(q.matrix().clone()).eigenvalues;
        assert!((eig.max() - 100.0).abs() < 1e-9 && (eig.min() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quadratic_constants_and_conjugate_are_consistent() {
        let p = make_conditioned_quadratic(8, 30.0, 1).unwrap();
        let check = check_objective(p.objective.as_ref(), &[0.0; 8], 3.0, 1000, 4);
        assert!(check.is_clean(), "{check:?}");
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let w: Vec<f64> = (0..8).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let y = p.objective.gradient(&w);
            let a = p.objective.conjugate(&y).unwrap();
            let b = conjugate_at_gradient(p.objective.as_ref(), &w);
            assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn symmetric_anchors_put_minimizer_at_origin() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0]);
        let lse = LogSumExp::new(a, vec![0.0; 4], 0.5).unwrap();
        let opt = logsumexp_reference(&lse, &[3.0, -2.0]).unwrap();
        assert!(norm(&opt.point) < 1e-10);
        assert!((opt.value - 0.5 * 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn logsumexp_gradient_and_smoothness() {
        let p = make_logsumexp(6, 20, 0.5, 7).unwrap();
        let check = check_objective(p.objective.as_ref(), &[0.0; 6], 2.0, 1000, 8);
        assert!(check.is_clean(), "{check:?}");
        let x = &p.optimum.as_ref().unwrap().point;
        assert!(stationarity_residual(p.objective.as_ref(), x) < 1e-10);
    }

    #[test]
    fn lasso_closed_form() {
        let p = make_lasso_1d(1.0, 3.0, 1.0).unwrap();
        assert_eq!(p.optimum.as_ref().unwrap().point, vec![2.0]);
        let smooth = make_lasso_1d(1.0, 3.0, 0.0).unwrap();
        assert_eq!(smooth.optimum.as_ref().unwrap().point, vec![3.0]);
        let dominated = make_lasso_1d(1.0, 3.0, 100.0).unwrap();
        assert_eq!(dominated.optimum.as_ref().unwrap().point, vec![0.0]);
    }

    #[test]
    fn proximal_reference_matches_closed_form_lasso() {
        let quad = Quadratic::diagonal(vec![1.0], vec![3.0]);
        let c = proximal_gradient_reference(&quad, &L1Norm::new(1.0), &[0.0], 10_000).unwrap();
        assert!((c.point[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn l1_reference_satisfies_subgradient_condition() {
        let p = by_name("l1-composite", &ProblemParams { dim: 20, kappa: 10.0, lambda: 0.5, seed: 4, ..Default::default() }).unwrap();
        let x = &p.optimum.as_ref().unwrap().point;
        let g = p.objective.gradient(x);
        for (xi, gi) in x.iter().zip(&g) {
            if *xi == 0.0 {
                assert!(gi.abs() <= 0.5 + 1e-10);
            } else {
                assert!((gi + 0.5 * xi.signum()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ball_minimizer_is_interior_or_on_the_sphere() {
        let inside = make_ball_quadratic(10, 50.0, 1.0, 0.5, 1).unwrap();
        let xi = &inside.optimum.as_ref().unwrap().point;
        assert!((norm(xi) - 0.5).abs() < 1e-10);
        assert!(stationarity_residual(inside.objective.as_ref(), xi) < 1e-10);

        let outside = make_ball_quadratic(10, 50.0, 1.0, 3.0, 1).unwrap();
        let xo = &outside.optimum.as_ref().unwrap().point;
        assert!((norm(xo) - 1.0).abs() < 1e-12);
        // KKT: the gradient points inward along x*
        let g = outside.objective.gradient(xo);
        let lambda = -dot(&g, xo);
        assert!(lambda > 0.0);
        let residual: f64 = g.iter().zip(xo).map(|(gi, x)| (gi + lambda * x).abs()).fold(0.0, f64::max);
        assert!(residual < 1e-9);
        // dense check against random feasible points
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<Vec<f64>> = (0..2000)
            .map(|_| {
                let v = gaussian_vec(&mut rng, 10);
                let r: f64 = rng.gen_range(0.0..1.0);
                scaled(r / norm(&v), &v)
            })
            .collect();
        let fstar = outside.objective.value(xo);
        assert!(samples.iter().all(|u| outside.objective.value(u) >= fstar - 1e-12));
    }

    #[test]
    fn registry_knows_its_names() {
        for name in PROBLEM_NAMES {
            let p = by_name(name, &ProblemParams { dim: 5, anchors: 12, temperature: 0.5, ..Default::default() }).unwrap();
            assert_eq!(&p.name, name);
        }
        assert!(by_name("rosenbrock", &ProblemParams::default()).is_err());
    }

    #[test]
    fn ball_set_gauge() {
        let b = make_ball_set(2, 2.0, 5.0).unwrap();
        assert_eq!(b.gauge(&[3.0, 4.0]), Some(1.0));
    }
}
