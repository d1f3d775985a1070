use thiserror::Error;

use crate::game::GameTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no conjugate available at the requested point (no analytic form and no gradient witness)")]
    ConjugateUnavailable,

    #[error("condition number must be at least 1, got {0}")]
    InvalidKappa(f64),

    #[error("invalid schedule parameter: {0}")]
    InvalidSchedule(String),

    #[error("bregman projection failed: {0}")]
    ProjectionFailure(String),

    #[error("composite term `{0}` has no proximal map")]
    ProxUnavailable(String),

    #[error("strategy requires a strongly convex objective (mu > 0)")]
    RequiresStrongConvexity,

    #[error("feasible set is missing its {0}")]
    MissingOracle(&'static str),

    #[error("non-finite iterate at round {round}")]
    NonFiniteIterate {
        round: usize,
        /// Rounds completed before the failure.
        partial: Box<GameTrace>,
    },

    #[error("no reference minimizer available for regret or gap evaluation")]
    NoReferenceMinimizer,

    #[error("rate fit is degenerate: {0}")]
    DegenerateFit(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid game specification: {0}")]
    InvalidSpec(String),
}
