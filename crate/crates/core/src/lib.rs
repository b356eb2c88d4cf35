//! Number-theory kernels for desk-scale experiments on Liouville correlations.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation over immutable inputs; threading, timing and file formats live
//! in the `chowla-lab` companion crate.
//!
//! Modules:
//! - [`arith`]: smallest-prime-factor tables and the multiplicative functions
//!   built on them (λ, μ, Ω, ω, τ_κ, smooth/rough splits, lcm).
//! - [`characters`]: real primitive Dirichlet characters via the Kronecker
//!   symbol, complete character sums of products of linear forms and the
//!   quadratic Weil bound.
//! - [`diophantine`]: Smith normal form over ℤ and the lcm-parametrized
//!   solution family of `a_i b_i = a_0 b_0 + h_i`.
//! - [`sieve`]: root counts ν(p), ν(d), N(p), exact sifted counts and the
//!   fundamental-lemma estimate.
//! - [`experiments`]: correlation sums, the hybrid function λ_r, and the
//!   moment/Chebyshev tail experiment.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod characters;
pub mod diophantine;
mod error;
pub mod experiments;
pub mod sieve;
pub mod sum;

pub use error::{Error, Result};
