//! Exact infinitesimal calculus over a truncated non-Archimedean continuum.

pub mod lc;
pub mod rational;

pub use lc::{Classification, LcError, LcNumber, DEFAULT_PRECISION};
pub use rational::Rational;
pub mod calculus;
pub mod cli;
pub mod dsl;
pub mod gallery;
pub mod report;
