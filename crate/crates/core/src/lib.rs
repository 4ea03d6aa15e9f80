//! Monte Carlo verification of section-moment and random-simplex moment
//! inequalities for convex bodies.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod body;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod kernel;
pub mod lp;
pub mod parallel;
pub mod polytope;
pub mod rng;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
