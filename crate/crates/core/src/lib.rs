//! Toolkit for the self-repelling random walk with directed edges.
//!
//! The walk moves on `Z` and at each step prefers the directed edge out of
//! the current site that has been crossed less often, through a
//! nondecreasing weight `w`. The crate is organised in four layers:
//!
//! * [`walk`]: exact dynamics, directed-edge local times, inverse local
//!   times and extraction of the embedded `eta` chains from paths.
//! * [`ray_knight`]: the `eta` transition kernel, its stationary law, chain
//!   sampling and the Ray-Knight local-time profile sampler.
//! * [`lclt`]: exact lattice computations (bivariate sums, conditional
//!   laws, discrete Gaussian convolutions) compared against Gaussian
//!   predictions.
//! * [`harness`]: replica-parallel Monte Carlo campaigns and their
//!   statistical reductions.
//!
//! Replicas are seeded from `(master seed, replica index)` so every
//! campaign is reproducible bit-for-bit with any thread budget.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expectations;
pub mod harness;
pub mod lclt;
pub mod par;
pub mod ray_knight;
pub mod rng;
pub mod stats;
pub mod walk;
pub mod weight;

pub use error::{Error, Result};
pub use weight::WeightFunction;
