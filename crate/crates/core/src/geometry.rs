//! Distance-generating functions and their Bregman divergences.

use crate::vector::dot;

/// A 1-strongly convex potential `phi` and the divergence it induces,
/// `V_c(x) = phi(x) - <grad phi(c), x - c> - phi(c)`.
#[derive(Debug, Clone, PartialEq)]
pub enum BregmanGeometry {
    /// `phi(x) = ||x||^2 / 2`.
    Euclidean,
    /// Negative entropy `phi(x) = sum x_i ln x_i`, used on the simplex.
    Entropy,
    /// `phi(x) = sum w_i x_i^2 / 2` with every `w_i >= 1`.
    Diagonal(Vec<f64>),
}

impl BregmanGeometry {
    /// Returns `None` if any weight is below one (the potential would not be
    /// 1-strongly convex).
    pub fn diagonal(weights: Vec<f64>) -> Option<Self> {
        weights
            .iter()
            .all(|w| *w >= 1.0 && w.is_finite())
            .then_some(Self::Diagonal(weights))
    }

    pub fn potential(&self, x: &[f64]) -> f64 {
        match self {
            Self::Euclidean => 0.5 * dot(x, x),
            Self::Entropy => x.iter().map(|&v| xlogx(v)).sum(),
            Self::Diagonal(w) => 0.5 * x.iter().zip(w).map(|(v, w)| w * v * v).sum::<f64>(),
        }
    }

    pub fn potential_gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Self::Euclidean => x.to_vec(),
            Self::Entropy => x.iter().map(|v| v.ln() + 1.0).collect(),
            Self::Diagonal(w) => x.iter().zip(w).map(|(v, w)| w * v).collect(),
        }
    }

    /// Solves `grad phi(x) = theta` over the potential's natural domain.
    pub fn mirror_inverse(&self, theta: &[f64]) -> Vec<f64> {
        match self {
            Self::Euclidean => theta.to_vec(),
            Self::Entropy => theta.iter().map(|t| (t - 1.0).exp()).collect(),
            Self::Diagonal(w) => theta.iter().zip(w).map(|(t, w)| t / w).collect(),
        }
    }

    pub fn divergence(&self, c: &[f64], x: &[f64]) -> f64 {
        match self {
            Self::Euclidean => 0.5 * crate::vector::dist_sq(x, c),
            Self::Entropy => x
                .iter()
                .zip(c)
                .map(|(&xi, &ci)| {
                    if xi == 0.0 {
                        ci
                    } else {
                        xi * (xi / ci).ln() - xi + ci
                    }
                })
                .sum(),
            Self::Diagonal(w) => {
                0.5 * x
                    .iter()
                    .zip(c)
                    .zip(w)
                    .map(|((xi, ci), wi)| wi * (xi - ci) * (xi - ci))
                    .sum::<f64>()
            }
        }
    }

    /// The unconstrained minimizer of the potential, where it exists.
    pub fn potential_minimizer(&self, dim: usize) -> Vec<f64> {
        match self {
            Self::Entropy => vec![1.0 / dim as f64; dim],
            _ => vec![0.0; dim],
        }
    }
}

fn xlogx(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v * v.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::dist_sq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn simplex_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.01..1.0)).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / s).collect()
    }

    #[test]
    fn divergence_dominates_half_squared_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let geoms = [
            BregmanGeometry::Euclidean,
            BregmanGeometry::Entropy,
            BregmanGeometry::diagonal(vec![1.0, 2.5, 4.0, 1.0]).unwrap(),
        ];
        for g in &geoms {
            for _ in 0..500 {
                let (c, x) = (simplex_point(&mut rng, 4), simplex_point(&mut rng, 4));
                let v = g.divergence(&c, &x);
                assert!(v >= 0.5 * dist_sq(&x, &c) - 1e-12, "{g:?}: {v}");
                assert!(g.divergence(&c, &c).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn divergence_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for g in [BregmanGeometry::Entropy, BregmanGeometry::Euclidean] {
            let (c, x) = (simplex_point(&mut rng, 5), simplex_point(&mut rng, 5));
            let gc = g.potential_gradient(&c);
            let direct = g.potential(&x)
                - dot(&gc, &crate::vector::sub(&x, &c))
                - g.potential(&c);
            assert!((direct - g.divergence(&c, &x)).abs() < 1e-14);
        }
    }

    #[test]
    fn mirror_inverse_inverts_gradient() {
        let g = BregmanGeometry::diagonal(vec![1.0, 3.0]).unwrap();
        let x = [0.4, -1.2];
        let back = g.mirror_inverse(&g.potential_gradient(&x));
        assert!((back[0] - x[0]).abs() < 1e-15 && (back[1] - x[1]).abs() < 1e-15);
        let e = BregmanGeometry::Entropy;
        let p = [0.2, 0.8];
        let back = e.mirror_inverse(&e.potential_gradient(&p));
        assert!((back[0] - 0.2).abs() < 1e-15 && (back[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn diagonal_rejects_weak_weights() {
        assert!(BregmanGeometry::diagonal(vec![1.0, 0.5]).is_none());
    }
}
