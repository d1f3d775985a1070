//! Accelerated convex optimization as weighted no-regret dynamics on the
//! Fenchel game.
//!
//! Minimizing a smooth convex `f` is recast as the zero-sum game with payoff
//! `g(x, y) = <x, y> - f*(y)`. A gradient player (`y`) and an iterate player
//! (`x`) run online learners against each other with round weights
//! `alpha_t`; the weighted average of the x-player's plays is an approximate
//! minimizer whose error is bounded by the players' average regrets.
//! Choosing optimistic follow-the-leader for `y` and mirror descent for `x`
//! with `alpha_t = t` gives the accelerated `O(1/T^2)` rate, and the
//! resulting iterates coincide with classical Nesterov-type recursions.
//!
//! * [`engine::run_game`] plays the game and records a [`game::GameTrace`].
//! * [`audit`] turns a trace into regret values and bound certificates.
//! * [`classical`] holds the closed-form recursions and equivalence checks.
//! * [`problems`] builds test objectives with known optima.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` rejects NaN too

pub mod audit;
pub mod classical;
pub mod composite;
pub mod engine;
pub mod error;
pub mod game;
pub mod geometry;
pub mod learners;
pub mod objective;
pub mod problems;
pub mod rates;
pub mod schedule;
pub mod set;
pub mod vector;

pub use error::{Error, Result};
