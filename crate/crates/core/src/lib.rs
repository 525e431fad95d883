//! Scoring of text-recognition output against ground truth, plus a
//! classification-tree test model for organizing the evaluation.
//!
//! The metrics side compares normalized texts at four granularities:
//! flexible character accuracy, string segment accuracy (order-free and
//! ordered), and text-line accuracy, with per-character-class and
//! per-section breakdowns. The modeling side builds decision tables over
//! context/input/output classification trees, checks coverage, computes
//! test complexity, and derives one-factor-at-a-time suites. The harness
//! runs whole suites from a manifest and renders reports.
//!
//! All score arithmetic is generic over [`scalar::Scalar`]; [`Score`] is
//! the reporting default and [`ExactScore`] the exact-rational
//! instantiation the test suites use.

pub mod alignment;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod scalar;
pub mod testmodel;
pub mod textmodel;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default score type for reporting.
pub type Score = f64;

/// Exact score type; division never rounds.
pub type ExactScore = num_rational::Rational64;

/// Exact score type with arbitrary precision, for long aggregations.
pub type BigExactScore = num_rational::BigRational;
