//! Seeded Monte Carlo laboratory for classical decision-theoretic
//! demonstrations: loss and risk functions, shrinkage estimators, grid
//! dominance, conjugate Bayes actions, confidence-interval coverage and
//! one-sided Normal test error probabilities.
//!
//! Everything is deterministic given a master seed: replication streams are
//! counter-based, reductions happen in fixed chunk order, and re-running any
//! experiment with the same configuration reproduces its report bit for bit,
//! independent of thread count.
//!
//! The crate is organized around a handful of layers:
//!
//! - [`model`]: sampling models and seeded draws ([`model::draw_sample`],
//!   [`model::empirical_sampling_distribution`]).
//! - [`estimator`]: the estimators under study, from the coordinate mean to
//!   positive-part James-Stein shrinkage and its regression analogue.
//! - [`loss`] and [`risk`]: loss functions, Monte Carlo risk curves over
//!   explicit parameter grids, grid-dominance verdicts, maximum and
//!   prior-weighted risk reductions, and rule selection.
//! - [`bayes`]: conjugate Normal posteriors, posterior-risk minimization and
//!   its closed-form cross-checks.
//! - [`testci`]: the pivot, confidence intervals and coverage, the one-sided
//!   test, p-values and power.
//! - [`experiments`]: named end-to-end demonstrations emitting serializable
//!   [`report::ExperimentReport`]s.

pub mod bayes;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod experiments;
pub mod linalg;
pub mod loss;
pub mod model;
pub mod normal;
pub mod quad;
pub mod report;
pub mod risk;
pub mod rng;
pub mod testci;

pub use error::{Error, Result};
