//! Percentile-based citation impact analysis.
//!
//! The crate is organised along the analysis pipeline:
//!
//! - [`data`]: ingestion of publication records, reference sets and
//!   institution samples.
//! - [`percentile`]: percentile ranks within reference sets, top-x%
//!   classification, fractional counting and MNCS.
//! - [`stats`]: summary statistics, t and z tests, Cohen's d and h,
//!   confidence intervals and the distribution kernels behind them.
//! - [`resampling`]: seeded bootstrap and the Mann-Whitney rank-sum test.
//! - [`report`]: report tables, SVG confidence-interval charts and the
//!   command implementations used by the `pct-impact` binary.

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod percentile;
pub mod report;
pub mod resampling;
pub mod stats;
pub mod synthetic;

pub use error::{Error, Result};
