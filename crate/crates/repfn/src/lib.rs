//! Weighted additive representation functions over random integer sets.
//!
//! The library is organized around the representation function
//! `r_{A,l}(n) = #{(k_1,...,k_l) in A^l : b_1 k_1 + ... + b_l k_l = n}`
//! for a fixed coefficient tuple `(b_1,...,b_l)` and a set `A` of nonnegative
//! integers, together with the product measure on random sets `A` in which
//! `0` is forced and each `n >= 1` is included independently with probability
//! `min(c f(n)/n, 1)` for a growth function `f(x) = (x F(x))^{1/h}`.
//!
//! Modules:
//!
//! - [`model`] — equations, growth/measure specifications, regularity checks.
//! - [`enumeration`] — brute-force ground truth: solution enumeration,
//!   exact/non-exact decomposition over set partitions, disjoint families,
//!   dyadic box counts.
//! - [`counting`] — count profiles via dilated convolution and exact
//!   expectation profiles under the product measure.
//! - [`sampler`] — reproducible counter-based sampling of random sets.
//! - [`asymptotics`] — Gamma-function closed forms and their numeric
//!   verification against direct summation.
//! - [`experiments`] — Monte Carlo harnesses: concentration, zero density,
//!   pair correlations, tail bounds, and the Raikov–Stöhr construction.
//! - [`report`] — deterministic CSV/JSON rendering of profiles and reports.

pub mod asymptotics;
pub mod counting;
pub mod enumeration;
mod error;
pub mod experiments;
pub mod model;
pub mod numeric;
pub mod report;
pub mod sampler;

pub use error::{Error, Result};
