//! Sidon sets built from the angles of Gaussian primes.
//!
//! Every prime `p ≡ 1 (mod 4)` splits as `p = a² + b²` in the Gaussian
//! integers, and the normalized angles `φ_p = arctan(b/a)/π` form a Sidon
//! set of reals. This crate turns that fact into integer Sidon sets:
//!
//! * [`finite`] holds the greedy, logarithmic and Gaussian finite
//!   constructions;
//! * [`infinite`] builds the infinite construction class by class,
//!   truncating `α·φ_p`, spreading the digits into spaced blocks, finding
//!   every bad 4-tuple and pruning it;
//! * [`verifier`] certifies (or refutes, with a witness) the Sidon property;
//! * [`alpha_lab`] runs grid experiments over the dilation parameter `α`.
//!
//! No floor in any construction is computed in floating point. All real
//! quantities live in [`precision::FixedReal`] enclosures and every floor
//! goes through [`precision::floor_scaled`], escalating precision until the
//! result is determined.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod alpha_lab;
mod error;
pub mod finite;
pub mod gaussian;
pub mod infinite;
pub mod precision;
pub mod primes;
pub mod verifier;

pub use error::{Error, Result};
pub use num_bigint::{BigInt, BigUint};
