//! Executable algebra of non-negative pseudo-Boolean functions.
//!
//! The crate stores functions `{0,1}^k -> R` as dense tables of `2^k`
//! values and builds everything else on top of that representation:
//! the normalized Walsh-Hadamard transform and its identities, clone
//! closure operations (argument permutation, fictitious arguments,
//! pointwise product, summation), brute-force evaluators for weighted
//! match-circuits and even-circuits, membership predicates for the
//! self-dual / positive-spectrum / log-supermodular function classes,
//! Ising-style gadget constructions with explicit approximation plans,
//! and product-summation formulas over a set of atoms.

pub mod circuit;
pub mod fourier;
pub mod ising;
pub mod json;
pub mod membership;
pub mod pps;
pub mod table;
pub mod verify;

mod error;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Largest supported table arity (4096 entries); keeps every
/// brute-force enumeration in the crate comfortably sub-second.
pub const MAX_ARITY: usize = 12;

/// Default absolute tolerance for sign and equality tests on doubles.
pub const DEFAULT_TOL: f64 = 1e-9;
