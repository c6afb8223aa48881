//! Exact experiments on the sequence `a(n) = floor(alpha + log_k(n + 1))`.
//!
//! The sequence is `k`-regular exactly when `k^alpha` is rational. This crate
//! computes the objects that separate the two cases: exact floors of powers of
//! `k`, the coefficients of the length-graded series `f(x)` (by brute force and
//! in closed form), the digit transform `g(x)`, kernel rank profiles, and
//! bounded recurrence, rational-function and periodicity detectors.

pub mod alpha;
pub mod arith;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod poly;
pub mod recur;
pub mod seq;
pub mod series;

pub use alpha::{AlphaSpec, ExactAlpha, KAlphaClass};
pub use error::{Error, Result};
