//! One- and two-sample t tests with Cohen's d.

use serde::Serialize;

use super::effect::{classify_magnitude, EffectMagnitude};
use super::kernels::{t_quantile, t_two_tailed_p};
use super::summary::SummaryStats;
use super::{check_level, DEFAULT_CI_LEVEL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanTestMethod {
    OneSampleT,
    PooledT,
    WelchT,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanTestResult {
    /// Mean (one sample) or difference of means `a - b`.
    pub estimate: f64,
    /// Standard error of `estimate`.
    pub se: f64,
    #[serde(rename = "t")]
    pub statistic_t: f64,
    pub df: f64,
    #[serde(rename = "p")]
    pub p_two_tailed: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_level: f64,
    #[serde(rename = "d")]
    pub effect_d: f64,
    pub magnitude: EffectMagnitude,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pooled_sd: Option<f64>,
    pub method: MeanTestMethod,
}

#[allow(clippy::too_many_arguments)]
fn finish(
    estimate: f64,
    null: f64,
    se: f64,
    df: f64,
    effect_d: f64,
    pooled_sd: Option<f64>,
    method: MeanTestMethod,
    level: f64,
) -> Result<MeanTestResult> {
    check_level(level)?;
    let t = (estimate - null) / se;
    let p = t_two_tailed_p(t, df)?;
    let half = t_quantile(0.5 + level / 2.0, df)? * se;
    Ok(MeanTestResult {
        estimate,
        se,
        statistic_t: t,
        df,
        p_two_tailed: p,
        ci_low: estimate - half,
        ci_high: estimate + half,
        ci_level: level,
        effect_d,
        magnitude: classify_magnitude(effect_d)?,
        pooled_sd,
        method,
    })
}

/// `d = (mean - mu0) / sd`, which equals `t / sqrt(n)`.
pub fn cohens_d_one(stats: &SummaryStats, mu0: f64) -> Result<f64> {
    let (sd, _) = stats.spread()?;
    if sd == 0.0 {
        return Err(Error::DegenerateVariance(
            "sample standard deviation is zero".into(),
        ));
    }
    Ok((stats.mean - mu0) / sd)
}

/// One-sample t test of `mean = mu0` with a 95% interval for the mean.
pub fn one_sample_t(stats: &SummaryStats, mu0: f64) -> Result<MeanTestResult> {
    one_sample_t_at(stats, mu0, DEFAULT_CI_LEVEL)
}

pub fn one_sample_t_at(stats: &SummaryStats, mu0: f64, level: f64) -> Result<MeanTestResult> {
    if stats.n < 2 {
        return Err(Error::Precondition("one-sample t test needs n >= 2".into()));
    }
    let (_, se) = stats.spread()?;
    let d = cohens_d_one(stats, mu0)?;
    finish(
        stats.mean,
        mu0,
        se,
        (stats.n - 1) as f64,
        d,
        None,
        MeanTestMethod::OneSampleT,
        level,
    )
}

/// `s_p = sqrt(((n1 - 1) s1^2 + (n2 - 1) s2^2) / (n1 + n2 - 2))`
pub fn pooled_sd(a: &SummaryStats, b: &SummaryStats) -> Result<f64> {
    if a.n + b.n < 3 {
        return Err(Error::Precondition("pooled SD needs n1 + n2 >= 3".into()));
    }
    let va = a.variance().unwrap_or(0.0);
    let vb = b.variance().unwrap_or(0.0);
    if va == 0.0 && vb == 0.0 {
        return Err(Error::DegenerateVariance(
            "both groups have zero variance".into(),
        ));
    }
    let ss = (a.n as f64 - 1.0) * va + (b.n as f64 - 1.0) * vb;
    Ok((ss / (a.n + b.n - 2) as f64).sqrt())
}

/// Equal-variance two-sample t test of `mean(a) - mean(b)`.
pub fn two_sample_pooled_t(a: &SummaryStats, b: &SummaryStats) -> Result<MeanTestResult> {
    two_sample_pooled_t_at(a, b, DEFAULT_CI_LEVEL)
}

pub fn two_sample_pooled_t_at(
    a: &SummaryStats,
    b: &SummaryStats,
    level: f64,
) -> Result<MeanTestResult> {
    let sp = pooled_sd(a, b)?;
    let (n1, n2) = (a.n as f64, b.n as f64);
    let se = (sp * sp * (n1 + n2) / (n1 * n2)).sqrt();
    let diff = a.mean - b.mean;
    finish(
        diff,
        0.0,
        se,
        n1 + n2 - 2.0,
        diff / sp,
        Some(sp),
        MeanTestMethod::PooledT,
        level,
    )
}

/// Unequal-variance (Welch) t test with Welch-Satterthwaite degrees of
/// freedom. Cohen's d still uses the pooled SD as standardizer.
pub fn two_sample_welch_t(a: &SummaryStats, b: &SummaryStats) -> Result<MeanTestResult> {
    two_sample_welch_t_at(a, b, DEFAULT_CI_LEVEL)
}

pub fn two_sample_welch_t_at(
    a: &SummaryStats,
    b: &SummaryStats,
    level: f64,
) -> Result<MeanTestResult> {
    if a.n < 2 || b.n < 2 {
        return Err(Error::Precondition(
            "Welch t test needs n >= 2 in both groups".into(),
        ));
    }
    let sp = pooled_sd(a, b)?;
    let va = a.variance().unwrap_or(0.0) / a.n as f64;
    let vb = b.variance().unwrap_or(0.0) / b.n as f64;
    let se = (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (a.n as f64 - 1.0) + vb * vb / (b.n as f64 - 1.0));
    let diff = a.mean - b.mean;
    finish(
        diff,
        0.0,
        se,
        df,
        diff / sp,
        Some(sp),
        MeanTestMethod::WelchT,
        level,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: usize, mean: f64, sd: f64) -> SummaryStats {
        SummaryStats::from_moments(n, mean, sd).unwrap()
    }

    #[test]
    fn institution_two_vs_fifty() {
        let r = one_sample_t(&inst(549, 32.15, 27.49), 50.0).unwrap();
        assert!((r.statistic_t + 15.21).abs() < 0.01);
        assert!(r.p_two_tailed < 1e-4);
        assert!((r.ci_low - 29.85).abs() < 0.01);
        assert!((r.ci_high - 34.46).abs() < 0.01);
        assert!((r.effect_d + 0.649).abs() < 5e-4);
        assert_eq!(r.magnitude, EffectMagnitude::Medium);
        assert_eq!(r.df, 548.0);
    }

    #[test]
    fn institution_three_vs_fifty() {
        let r = one_sample_t(&inst(488, 45.98, 29.40), 50.0).unwrap();
        assert!((r.statistic_t + 3.02).abs() < 0.01);
        assert!((r.p_two_tailed - 0.003).abs() < 0.001);
    }

    #[test]
    fn mean_at_null() {
        let r = one_sample_t(&inst(30, 50.0, 10.0), 50.0).unwrap();
        assert_eq!(r.statistic_t, 0.0);
        assert_eq!(r.p_two_tailed, 1.0);
        assert!(((r.ci_low + r.ci_high) / 2.0 - 50.0).abs() < 1e-12);
        assert_eq!(cohens_d_one(&inst(30, 50.0, 10.0), 50.0).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            one_sample_t(&inst(10, 5.0, 0.0), 50.0),
            Err(Error::DegenerateVariance(_))
        ));
        assert!(one_sample_t(&inst(1, 5.0, 0.0), 50.0).is_err());
        assert!(matches!(
            pooled_sd(&inst(3, 1.0, 0.0), &inst(4, 2.0, 0.0)),
            Err(Error::DegenerateVariance(_))
        ));
        assert!(pooled_sd(&inst(1, 1.0, 0.0), &inst(1, 2.0, 0.0)).is_err());
    }

    #[test]
    fn pooled_sd_values() {
        let sp = pooled_sd(&inst(268, 49.67, 30.66), &inst(549, 32.15, 27.49)).unwrap();
        assert!((sp - 28.57).abs() < 0.005);
        let sp13 = pooled_sd(&inst(268, 49.67, 30.66), &inst(488, 45.98, 29.40)).unwrap();
        assert!((sp13 - 29.85).abs() < 0.005);
        assert_eq!(
            pooled_sd(&inst(10, 1.0, 3.0), &inst(20, 2.0, 3.0)).unwrap(),
            3.0
        );
    }

    #[test]
    fn pooled_t_one_vs_two() {
        let r = two_sample_pooled_t(&inst(268, 49.67, 30.66), &inst(549, 32.15, 27.49)).unwrap();
        assert!((r.estimate - 17.52).abs() < 1e-9);
        assert!((r.se - 2.13).abs() < 0.005);
        assert!((r.statistic_t - 8.23).abs() < 0.01);
        assert!((r.ci_low - 13.34).abs() < 0.05);
        assert!((r.ci_high - 21.70).abs() < 0.05);
        assert!((r.effect_d - 0.613).abs() < 5e-4);
    }

    #[test]
    fn pooled_t_identical_groups() {
        let g = inst(40, 12.0, 4.0);
        let r = two_sample_pooled_t(&g, &g).unwrap();
        assert_eq!(r.statistic_t, 0.0);
        assert_eq!(r.effect_d, 0.0);
        assert!((r.ci_low + r.ci_high).abs() < 1e-12);
    }

    #[test]
    fn welch_matches_pooled_for_balanced_equal_variance() {
        let a = inst(50, 10.0, 3.0);
        let b = inst(50, 11.5, 3.0);
        let p = two_sample_pooled_t(&a, &b).unwrap();
        let w = two_sample_welch_t(&a, &b).unwrap();
        assert!((p.statistic_t - w.statistic_t).abs() < 1e-9);
        assert!((p.df - w.df).abs() < 1e-9);
    }

    #[test]
    fn welch_on_institutions() {
        let w = two_sample_welch_t(&inst(268, 49.67, 30.66), &inst(549, 32.15, 27.49)).unwrap();
        let se = (30.66_f64.powi(2) / 268.0 + 27.49_f64.powi(2) / 549.0).sqrt();
        assert!((w.se - se).abs() < 1e-12);
        assert!((w.statistic_t - 7.93).abs() < 0.01);
        assert!((w.pooled_sd.unwrap() - 28.57).abs() < 0.005);
    }

    #[test]
    fn welch_df_is_dominated_by_the_noisy_small_group() {
        let a = inst(5, 0.0, 10.0);
        let b = inst(500, 1.0, 1.0);
        let w = two_sample_welch_t(&a, &b).unwrap();
        // direct Welch-Satterthwaite evaluation
        let (va, vb) = (100.0 / 5.0, 1.0 / 500.0);
        let df = (va + vb) * (va + vb) / (va * va / 4.0 + vb * vb / 499.0);
        assert!((w.df - df).abs() < 1e-9);
        assert!(w.df > 4.0 && w.df < 4.01);
    }
}
