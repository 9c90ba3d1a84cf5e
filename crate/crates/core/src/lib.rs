//! Toolkit for quantifying evidence of *absence* of an effect in
//! original/replication study pairs.
//!
//! Given an original study and one or more replications — each summarised by
//! an effect estimate and standard error on a common scale — this crate
//! answers two questions: *was the replication consistent with the original?*
//! and, for null results specifically, *is "no effect" actually supported by
//! the data, or merely not ruled out?*
//!
//! The main entry points:
//!
//! * [`criteria::evaluate_pair`] scores a pair against eight
//!   replication-success criteria (non-significance, meta-analytic
//!   non-significance, four interval-consistency checks, the two-trials rule,
//!   frequentist equivalence via TOST, and a Bayes factor threshold).
//! * [`sensitivity`] sweeps the equivalence margin and the Bayes prior width
//!   to show how conclusions depend on those choices.
//! * [`calibration`] estimates the error rates of each criterion by Monte
//!   Carlo simulation.
//! * [`data`] reads and validates study-pair CSV files; [`fixtures`] bundles
//!   two checksummed example datasets.
//!
//! Lower-level building blocks live in [`stats`] (normal distribution
//! kernel), [`evidence`] (p-values, TOST, Bayes factors, intervals) and
//! [`meta`] (fixed-effect meta-analysis). [`format`] provides the compact
//! display rounding used in reports.

pub mod calibration;
pub mod criteria;
pub mod data;
pub mod error;
pub mod evidence;
pub mod fixtures;
pub mod format;
pub mod meta;
pub mod sensitivity;
pub mod stats;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
