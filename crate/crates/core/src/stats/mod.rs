//! Closed-form inference: summaries, t and z tests, effect sizes and
//! confidence intervals.

pub mod effect;
pub mod kernels;
pub mod means;
pub mod proportions;
pub mod summary;

pub use effect::{ci_overlap_verdict, classify_magnitude, CiOverlap, EffectMagnitude};
pub use kernels::{beta_inc_reg, normal_cdf, normal_quantile, t_cdf, t_quantile};
pub use means::{
    cohens_d_one, one_sample_t, one_sample_t_at, pooled_sd, two_sample_pooled_t,
    two_sample_pooled_t_at, two_sample_welch_t, two_sample_welch_t_at, MeanTestResult,
};
pub use proportions::{
    cohens_h_one, one_sample_prop_z, one_sample_prop_z_at, one_sample_share_z_at,
    two_sample_prop_z, two_sample_prop_z_at, two_sample_share_z_at, ProportionTestResult,
};
pub use summary::{summarize, SummaryStats};

/// Confidence level used when none is configured.
pub const DEFAULT_CI_LEVEL: f64 = 0.95;

pub(crate) fn check_level(level: f64) -> crate::Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(crate::Error::Parameter(format!(
            "confidence level {level} outside (0, 1)"
        )));
    }
    Ok(())
}
