//! Assortment optimization under the sequential multinomial logit (SML)
//! choice model and its k-level generalization, the perception-adjusted
//! Luce model (PALM).
//!
//! The crate is organised as:
//!
//! * [`model`]: products, instances and assortments.
//! * [`choice`]: choice probabilities, expected revenue and the auxiliary
//!   quantities `U`, `alpha` and `lambda`.
//! * [`optimizer`]: revenue-ordered-by-level (ROL) exact solver, the
//!   revenue-ordered (RO) heuristic, a brute-force oracle, first-gap
//!   diagnostics and optimality-bound checks.
//! * [`phenomena`]: regularity-violation and choice-overload detection.
//! * [`experiments`]: seeded random instance families and RO-vs-ROL
//!   benchmark statistics.
//! * [`io`]: the versioned JSON instance format and result documents.

pub mod choice;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod optimizer;
pub mod phenomena;

pub use error::{Error, Result};
pub use model::{Assortment, Instance, Probability, Product};

/// Absolute tolerance used for equality checks between real quantities.
pub const EPSILON: f64 = 1e-9;
