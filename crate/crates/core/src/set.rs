//! Constraint sets for the x-player.
//!
//! Every set answers membership queries and solves the Bregman proximal
//! problem `argmin_{x in K} <x, g> + V_c(x)` for the geometries it supports.
//! Sets that contain the origin also expose a gauge and a linear
//! minimization oracle for the Frank–Wolfe player.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::geometry::BregmanGeometry;
use crate::vector::{norm, p_norm};

/// Tolerance and iteration cap of the one-dimensional multiplier searches
/// used by projections without a closed form.
pub const MULTIPLIER_TOL: f64 = 1e-12;
pub const MULTIPLIER_MAX_ITER: usize = 200;

pub trait FeasibleSet: Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn contains(&self, x: &[f64], tol: f64) -> bool;

    /// `argmin_{x in K} <x, linear> + V_center(x)` under `geometry`.
    fn bregman_project(
        &self,
        geometry: &BregmanGeometry,
        center: &[f64],
        linear: &[f64],
    ) -> Result<Vec<f64>>;

    /// `argmin_{x in K} <x, g>`.
    fn linear_oracle(&self, _g: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Minkowski functional `inf { c >= 0 : x / c in K }`.
    fn gauge(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    /// Upper bound on `V_x(u)` over pairs in the set (Euclidean geometry).
    fn divergence_bound(&self) -> Option<f64> {
        None
    }

    fn is_unconstrained(&self) -> bool {
        false
    }
}

fn unconstrained_step(geometry: &BregmanGeometry, center: &[f64], linear: &[f64]) -> Vec<f64> {
    let mut theta = geometry.potential_gradient(center);
    for (t, g) in theta.iter_mut().zip(linear) {
        *t -= g;
    }
    geometry.mirror_inverse(&theta)
}

fn check_dims(expected: usize, center: &[f64], linear: &[f64]) -> Result<()> {
    for got in [center.len(), linear.len()] {
        if got != expected {
            return Err(Error::DimensionMismatch { expected, got });
        }
    }
    Ok(())
}

/// Root of a non-increasing function on `[0, inf)`, assuming `h(0) > 0`.
///
/// Expands the bracket by doubling, then bisects until the bracket is
/// narrower than `MULTIPLIER_TOL * (1 + hi)`.
pub(crate) fn bisect_multiplier(mut h: impl FnMut(f64) -> f64, what: &str) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut expansions = 0;
    while h(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > MULTIPLIER_MAX_ITER || !hi.is_finite() {
            return Err(Error::ProjectionFailure(format!(
                "{what}: could not bracket the multiplier"
            )));
        }
    }
    for _ in 0..MULTIPLIER_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= MULTIPLIER_TOL * (1.0 + hi) {
            return Ok(hi);
        }
    }
    Err(Error::ProjectionFailure(format!(
        "{what}: multiplier search did not converge in {MULTIPLIER_MAX_ITER} steps"
    )))
}

/// The whole space `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unconstrained {
    pub dim: usize,
}

impl Unconstrained {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl FeasibleSet for Unconstrained {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64], _tol: f64) -> bool {
        x.len() == self.dim && x.iter().all(|v| v.is_finite())
    }

    fn bregman_project(
        &self,
        geometry: &BregmanGeometry,
        center: &[f64],
        linear: &[f64],
    ) -> Result<Vec<f64>> {
        check_dims(self.dim, center, linear)?;
        Ok(unconstrained_step(geometry, center, linear))
    }

    fn is_unconstrained(&self) -> bool {
        true
    }
}

/// The nonnegative orthant `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonNegative {
    pub dim: usize,
}

impl NonNegative {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl FeasibleSet for NonNegative {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim && x.iter().all(|v| *v >= -tol)
    }

    fn bregman_project(
        &self,
        geometry: &BregmanGeometry,
        center: &[f64],
        linear: &[f64],
    ) -> Result<Vec<f64>> {
        check_dims(self.dim, center, linear)?;
        // every supported potential is separable, so the clamp is exact
        Ok(unconstrained_step(geometry, center, linear)
            .into_iter()
            .map(|v| v.max(0.0))
            .collect())
    }
}

/// The probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub dim: usize,
}

impl Simplex {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl FeasibleSet for Simplex {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim
            && x.iter().all(|v| *v >= -tol)
            && (x.iter().sum::<f64>() - 1.0).abs() <= tol * self.dim as f64
    }

    fn bregman_project(
        &self,
        geometry: &BregmanGeometry,
        center: &[f64],
        linear: &[f64],
    ) -> Result<Vec<f64>> {
        check_dims(self.dim, center, linear)?;
        match geometry {
            BregmanGeometry::Entropy => {
                // multiplicative weights, normalized in log space
                let logits: Vec<f64> = center
                    .iter()
                    .zip(linear)
                    .map(|(c, g)| c.ln() - g)
                    .collect();
                let m = logits.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
                let w: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
                let s: f64 = w.iter().sum();
                Ok(w.into_iter().map(|v| v / s).collect())
            }
            BregmanGeometry::Euclidean => {
                let u: Vec<f64> = center.iter().zip(linear).map(|(c, g)| c - g).collect();
                Ok(euclidean_simplex_projection(&u))
            }
            BregmanGeometry::Diagonal(w) => {
                // x_i = max(c_i - (g_i + nu) / w_i, 0) with sum x = 1
                let x_of = |nu: f64| -> Vec<f64> {
                    center
                        .iter()
                        .zip(linear)
                        .zip(w)
                        .map(|((c, g), w)| (c - (g + nu) / w).max(0.0))
                        .collect()
                };
                // shift so the root lies in [0, inf)
                let base = center
                    .iter()
                    .zip(linear)
                    .zip(w)
                    .map(|((c, g), w)| w * c - g - w)
                    .fold(f64::INFINITY, f64::min);
                let nu = bisect_multiplier(
                    |s| x_of(base + s).iter().sum::<f64>() - 1.0,
                    "simplex (diagonal geometry)",
                )?;
                let x = x_of(base + nu);
                let s: f64 = x.iter().sum();
                Ok(x.into_iter().map(|v| v / s).collect())
            }
        }
    }

    /// Vertex with the smallest coefficient; ties go to the lowest index.
    fn linear_oracle(&self, g: &[f64]) -> Option<Vec<f64>> {
        let (best, _) = g
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (i, v)| {
                if *v < bv {
                    (i, *v)
                } else {
                    (bi, bv)
                }
            });
        let mut e = vec![0.0; self.dim];
        e[best] = 1.0;
        Some(e)
    }
}

fn euclidean_simplex_projection(u: &[f64]) -> Vec<f64> {
    let mut sorted = u.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite coordinates"));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - 1.0) / (k as f64 + 1.0);
        if v - candidate > 0.0 {
            tau = candidate;
        }
    }
    u.iter().map(|v| (v - tau).max(0.0)).collect()
}

/// `{ x : ||x||_p <= radius }` for `p` in `(1, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpBall {
    pub dim: usize,
    pub p: f64,
    pub radius: f64,
}

impl LpBall {
    pub fn new(dim: usize, p: f64, radius: f64) -> Result<Self> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(Error::InvalidSpec(format!("ball exponent p must lie in (1, 2], got {p}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidSpec(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { dim, p, radius })
    }

    pub fn unit_l2(dim: usize) -> Self {
        Self { dim, p: 2.0, radius: 1.0 }
    }

    fn euclidean_projection(&self, u: &[f64]) -> Result<Vec<f64>> {
        let r = self.radius;
        if p_norm(u, self.p) <= r {
            return Ok(u.to_vec());
        }
        if self.p == 2.0 {
            let n = norm(u);
            return Ok(u.iter().map(|v| v * r / n).collect());
        }
        // KKT: x_i = sign(u_i) s_i with s_i + lambda p s_i^(p-1) = |u_i|
        let p = self.p;
        let coords = |lambda: f64| -> Vec<f64> {
            u.iter()
                .map(|&ui| {
                    let a = ui.abs();
                    if a == 0.0 {
                        return 0.0;
                    }
                    let (mut lo, mut hi) = (0.0, a);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if mid + lambda * p * mid.powf(p - 1.0) > a {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                        if hi - lo <= 1e-16 * a {
                            break;
                        }
                    }
                    ui.signum() * 0.5 * (lo + hi)
                })
                .collect()
        };
        let lambda = bisect_multiplier(
            |l| p_norm(&coords(l), p).powf(p) - r.powf(p),
            "lp ball (euclidean geometry)",
        )?;
        Ok(coords(lambda))
    }
}

impl FeasibleSet for LpBall {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim && p_norm(x, self.p) <= self.radius * (1.0 + tol)
    }

    fn bregman_project(
        &self,
        geometry: &BregmanGeometry,
        center: &[f64],
        linear: &[f64],
    ) -> Result<Vec<f64>> {
        check_dims(self.dim, center, linear)?;
        match geometry {
            BregmanGeometry::Euclidean => {
                let u: Vec<f64> = center.iter().zip(linear).map(|(c, g)| c - g).collect();
                self.euclidean_projection(&u)
            }
            BregmanGeometry::Diagonal(w) if self.p == 2.0 => {
                // x_i = (w_i c_i - g_i) / (w_i + lambda), lambda >= 0
                let num: Vec<f64> = center
                    .iter()
                    .zip(linear)
                    .zip(w)
                    .map(|((c, g), w)| w * c - g)
                    .collect();
                let x_of = |lambda: f64| -> Vec<f64> {
                    num.iter().zip(w).map(|(n, w)| n / (w + lambda)).collect()
                };
                let free = x_of(0.0);
                if norm(&free) <= self.radius {
                    return Ok(free);
                }
                let lambda = bisect_multiplier(
                    |l| norm(&x_of(l)) - self.radius,
                    "l2 ball (diagonal geometry)",
                )?;
                Ok(x_of(lambda))
            }
            other => Err(Error::ProjectionFailure(format!(
                "no projection onto the l{} ball under {other:?} geometry",
                self.p
            ))),
        }
    }

    /// `-r * sign(g) |g|^(q-1) / ||g||_q^(q-1)` with `q` the dual exponent;
    /// `g = 0` returns the origin.
    fn linear_oracle(&self, g: &[f64]) -> Option<Vec<f64>> {
        let r = self.radius;
        if g.iter().all(|v| *v == 0.0) {
            return Some(vec![0.0; self.dim]);
        }
        if self.p == 2.0 {
            let n = norm(g);
            return Some(g.iter().map(|v| -r * v / n).collect());
        }
        let q = self.p / (self.p - 1.0);
        let gmax = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let scaled: Vec<f64> = g.iter().map(|v| v / gmax).collect();
        let nq = p_norm(&scaled, q);
        Some(
            scaled
                .iter()
                .map(|v| -r * v.signum() * (v.abs() / nq).powf(q - 1.0))
                .collect(),
        )
    }

    fn gauge(&self, x: &[f64]) -> Option<f64> {
        Some(p_norm(x, self.p) / self.radius)
    }

    fn divergence_bound(&self) -> Option<f64> {
        // for p <= 2 the l2 diameter is at most 2r
        Some(2.0 * self.radius * self.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::dot;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn halfline_clamps() {
        let set = NonNegative::new(1);
        let x = set
            .bregman_project(&BregmanGeometry::Euclidean, &[0.1], &[0.5])
            .unwrap();
        assert_eq!(x, vec![0.0]);
    }

    #[test]
    fn ball_gauge_and_oracle() {
        let ball = LpBall::new(2, 2.0, 5.0).unwrap();
        assert!((ball.gauge(&[3.0, 4.0]).unwrap() - 1.0).abs() < 1e-15);
        let unit = LpBall::unit_l2(2);
        assert_eq!(unit.linear_oracle(&[0.0, 1.0]).unwrap(), vec![0.0, -1.0]);
        assert_eq!(unit.linear_oracle(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn lp_oracle_beats_dense_boundary_search() {
        let ball = LpBall::new(2, 1.5, 1.0).unwrap();
        let g = [0.7, -0.3];
        let v = ball.linear_oracle(&g).unwrap();
        assert!((p_norm(&v, 1.5) - 1.0).abs() < 1e-12);
        let best = (0..200_000)
            .map(|k| {
                let th = k as f64 * std::f64::consts::TAU / 200_000.0;
                let (c, s) = (th.cos(), th.sin());
                let n = p_norm(&[c, s], 1.5);
                (c / n) * g[0] + (s / n) * g[1]
            })
            .fold(f64::INFINITY, f64::min);
        assert!(dot(&v, &g) <= best + 1e-12);
        assert!(dot(&v, &g) >= best - 1e-8);
    }

    #[test]
    fn lp_projection_satisfies_optimality() {
        let ball = LpBall::new(3, 1.5, 1.0).unwrap();
        let u = [2.0, -0.5, 0.3];
        let x = ball
            .bregman_project(&BregmanGeometry::Euclidean, &u, &[0.0; 3])
            .unwrap();
        assert!((p_norm(&x, 1.5) - 1.0).abs() < 1e-9);
        // variational inequality <u - x, z - x> <= 0 on boundary samples
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let z: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = p_norm(&z, 1.5);
            let z: Vec<f64> = z.iter().map(|v| v / n * rng.gen_range(0.0..1.0)).collect();
            let lhs: f64 = (0..3).map(|i| (u[i] - x[i]) * (z[i] - x[i])).sum();
            assert!(lhs <= 1e-8, "{lhs}");
        }
    }

    #[test]
    fn simplex_entropy_is_multiplicative_weights() {
        let set = Simplex::new(2);
        let x = set
            .bregman_project(&BregmanGeometry::Entropy, &[0.5, 0.5], &[-1.0, 0.0])
            .unwrap();
        let e = std::f64::consts::E;
        assert_close(&x, &[e / (e + 1.0), 1.0 / (e + 1.0)], 1e-15);
    }

    #[test]
    fn simplex_projections_agree_with_grid() {
        let set = Simplex::new(2);
        let center = [0.3, 0.7];
        let g = [0.4, -0.2];
        for geom in [
            BregmanGeometry::Euclidean,
            BregmanGeometry::Entropy,
            BregmanGeometry::diagonal(vec![2.0, 1.0]).unwrap(),
        ] {
            let x = set.bregman_project(&geom, &center, &g).unwrap();
            assert!(set.contains(&x, 1e-9));
            let obj = |p: &[f64]| dot(p, &g) + geom.divergence(&center, p);
            let grid_best = (1..100_000)
                .map(|k| {
                    let a = k as f64 / 100_000.0;
                    obj(&[a, 1.0 - a])
                })
                .fold(f64::INFINITY, f64::min);
            assert!(obj(&x) <= grid_best + 1e-10, "{geom:?}");
        }
    }

    #[test]
    fn diagonal_ball_projection_is_feasible_and_optimal() {
        let ball = LpBall::unit_l2(2);
        let geom = BregmanGeometry::diagonal(vec![1.0, 4.0]).unwrap();
        let c = [0.5, 0.5];
        let g = [-3.0, 1.0];
        let x = ball.bregman_project(&geom, &c, &g).unwrap();
        assert!(ball.contains(&x, 1e-9));
        let obj = |p: &[f64]| dot(p, &g) + geom.divergence(&c, p);
        let best = (0..400_000)
            .map(|k| {
                let th = k as f64 * std::f64::consts::TAU / 400_000.0;
                obj(&[th.cos(), th.sin()])
            })
            .fold(f64::INFINITY, f64::min);
        assert!(obj(&x) <= best + 1e-9);
    }

    #[test]
    fn unsupported_geometry_is_reported() {
        let ball = LpBall::unit_l2(2);
        let err = ball.bregman_project(&BregmanGeometry::Entropy, &[0.5, 0.5], &[0.0, 0.0]);
        assert!(matches!(err, Err(Error::ProjectionFailure(_))));
    }
}
