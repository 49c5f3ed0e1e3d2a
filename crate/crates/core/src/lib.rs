//! Conjunction probabilities of smooth stationary Gaussian fields.
//!
//! For `n` independent copies `X_1, ..., X_n` of a smooth, stationary,
//! unit-variance Gaussian field on `S ⊂ R^d`, the crate evaluates the
//! leading-order asymptotic of `P(max_{t in S} min_i X_i(t) >= u)`, the
//! Euler-characteristic prediction for the same probability, and the volume
//! polynomial of ball-centre configurations behind the asymptotic constant.
//! Every closed form comes with an independent check: nested sums against
//! product formulas, ball-intersection Monte Carlo, field simulation and a
//! Pickands-constant experiment.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod ball_geometry;
pub mod cli;
pub mod ec_heuristic;
pub mod error;
pub mod estimate;
pub mod mc_sim;
pub mod special_fn;

pub use error::{Error, Result};
pub use estimate::EstimateWithCI;
