//! Safe navigation of a constant-speed evader through the reachability
//! region of range-limited pursuers.
//!
//! The evader steers by maximum safe cutting angles derived from
//! engagement-zone geometry, at three levels of knowledge about its
//! pursuers. [`engine::run`] closes the loop against pursuers flying
//! proportional navigation (or other laws) and [`oracle`] holds independent
//! brute-force checks.

// `!(x > 0.0)` is deliberate: it rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod cutting;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod output;
pub mod scenario;

pub use error::{NavError, Result};
