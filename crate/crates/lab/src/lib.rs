//! Command-line experiments over the `chowla-core` kernels.

pub mod cli;
pub mod error;
pub mod manifest;
pub mod output;
pub mod parallel;
pub mod selftest;

pub use cli::{run, run_with};
