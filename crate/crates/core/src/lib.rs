//! Exact and numeric tooling for Reed-Solomon codes whose evaluation set is
//! the value set of a Dickson polynomial: finite-field arithmetic, value-set
//! and preimage formulas, additive character sums, the distinct-coordinate
//! sieve, and deep-hole tests.

pub mod charsum;
pub mod dickson;
pub mod error;
pub mod gf;
pub mod poly;
pub mod rscode;
pub mod sieve;

pub use error::{Error, Result};
pub use gf::{Elem, FiniteField};
pub use poly::Polynomial;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub struct ReadmeDoctests;
