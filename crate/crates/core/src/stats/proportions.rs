//! Large-sample (Wald) proportion tests with Cohen's h.

use serde::Serialize;

use super::effect::{classify_magnitude, EffectMagnitude};
use super::kernels::{normal_quantile, normal_two_tailed_p};
use super::{check_level, DEFAULT_CI_LEVEL};
use crate::error::{Error, Result};

/// Method tag carried into serialized results.
pub const PROPORTION_CI_METHOD: &str = "wald";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProportionTestResult {
    /// Proportion (one sample) or difference of proportions `p1 - p2`.
    pub estimate: f64,
    /// Unpooled standard error of `estimate`, the one behind the interval.
    pub se: f64,
    #[serde(rename = "z")]
    pub statistic_z: f64,
    #[serde(rename = "p")]
    pub p_two_tailed: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ci_level: f64,
    #[serde(rename = "h")]
    pub effect_h: f64,
    pub magnitude: EffectMagnitude,
    pub method: &'static str,
}

fn check_counts(count: u64, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("sample size is zero".into()));
    }
    if count > n {
        return Err(Error::Precondition(format!("count {count} exceeds n {n}")));
    }
    Ok(())
}

fn check_share(p: f64, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("sample size is zero".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("proportion {p} outside [0, 1]")));
    }
    Ok(())
}

fn arcsine(p: f64) -> f64 {
    2.0 * p.sqrt().asin()
}

/// `h = 2 asin(sqrt(p)) - 2 asin(sqrt(p0))`
pub fn cohens_h_one(p: f64, p0: f64) -> Result<f64> {
    for v in [p, p0] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Parameter(format!("proportion {v} outside [0, 1]")));
        }
    }
    Ok(arcsine(p) - arcsine(p0))
}

/// z test of `p = p0` using the null standard deviation; Wald interval.
pub fn one_sample_prop_z(count: u64, n: u64, p0: f64) -> Result<ProportionTestResult> {
    one_sample_prop_z_at(count, n, p0, DEFAULT_CI_LEVEL)
}

pub fn one_sample_prop_z_at(
    count: u64,
    n: u64,
    p0: f64,
    level: f64,
) -> Result<ProportionTestResult> {
    check_counts(count, n)?;
    one_sample_share_z_at(count as f64 / n as f64, n, p0, level)
}

/// As [`one_sample_prop_z_at`] for a share that need not come from an
/// integer count (fractional counting).
pub fn one_sample_share_z_at(p: f64, n: u64, p0: f64, level: f64) -> Result<ProportionTestResult> {
    check_share(p, n)?;
    check_level(level)?;
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::Parameter(format!(
            "null proportion {p0} outside (0, 1)"
        )));
    }
    let nf = n as f64;
    let z = (p - p0) / (p0 * (1.0 - p0) / nf).sqrt();
    let se = (p * (1.0 - p) / nf).sqrt();
    let half = normal_quantile(0.5 + level / 2.0)? * se;
    let h = cohens_h_one(p, p0)?;
    Ok(ProportionTestResult {
        estimate: p,
        se,
        statistic_z: z,
        p_two_tailed: normal_two_tailed_p(z),
        ci_low: p - half,
        ci_high: p + half,
        ci_level: level,
        effect_h: h,
        magnitude: classify_magnitude(h)?,
        method: PROPORTION_CI_METHOD,
    })
}

/// Two-sample z test of `p1 = p2`: pooled SE for the statistic, unpooled SE
/// for the interval of the difference.
pub fn two_sample_prop_z(
    count1: u64,
    n1: u64,
    count2: u64,
    n2: u64,
) -> Result<ProportionTestResult> {
    two_sample_prop_z_at(count1, n1, count2, n2, DEFAULT_CI_LEVEL)
}

pub fn two_sample_prop_z_at(
    count1: u64,
    n1: u64,
    count2: u64,
    n2: u64,
    level: f64,
) -> Result<ProportionTestResult> {
    check_counts(count1, n1)?;
    check_counts(count2, n2)?;
    two_sample_share_z_at(
        count1 as f64 / n1 as f64,
        n1,
        count2 as f64 / n2 as f64,
        n2,
        level,
    )
}

pub fn two_sample_share_z_at(
    p1: f64,
    n1: u64,
    p2: f64,
    n2: u64,
    level: f64,
) -> Result<ProportionTestResult> {
    check_share(p1, n1)?;
    check_share(p2, n2)?;
    check_level(level)?;
    let (a, b) = (n1 as f64, n2 as f64);
    let pooled = (p1 * a + p2 * b) / (a + b);
    if pooled <= 0.0 || pooled >= 1.0 {
        return Err(Error::DegenerateVariance(format!(
            "pooled proportion is {pooled}"
        )));
    }
    let diff = p1 - p2;
    let z = diff / (pooled * (1.0 - pooled) * (1.0 / a + 1.0 / b)).sqrt();
    let se = (p1 * (1.0 - p1) / a + p2 * (1.0 - p2) / b).sqrt();
    let half = normal_quantile(0.5 + level / 2.0)? * se;
    let h = arcsine(p1) - arcsine(p2);
    Ok(ProportionTestResult {
        estimate: diff,
        se,
        statistic_z: z,
        p_two_tailed: normal_two_tailed_p(z),
        ci_low: diff - half,
        ci_high: diff + half,
        ci_level: level,
        effect_h: h,
        magnitude: classify_magnitude(h)?,
        method: PROPORTION_CI_METHOD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn institution_two_against_ten_percent() {
        let r = one_sample_prop_z(160, 549, 0.10).unwrap();
        assert!((r.statistic_z - 14.95).abs() < 0.01);
        assert!((r.ci_low - 0.2534).abs() < 5e-4);
        assert!((r.ci_high - 0.3295).abs() < 5e-4);
        assert!((r.effect_h - 0.497).abs() < 5e-4);
    }

    #[test]
    fn institution_one_against_ten_percent() {
        let r = one_sample_prop_z(30, 268, 0.10).unwrap();
        assert!((r.statistic_z - 0.65).abs() < 0.01);
        assert!((r.p_two_tailed - 0.51).abs() < 0.005);
    }

    #[test]
    fn at_null_and_zero_count() {
        let r = one_sample_prop_z(10, 100, 0.10).unwrap();
        assert!(r.statistic_z.abs() < 1e-12);
        assert!(r.effect_h.abs() < 1e-12);
        let r = one_sample_prop_z(0, 50, 0.10).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert!((r.effect_h + 2.0 * 0.1f64.sqrt().asin()).abs() < 1e-15);
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            one_sample_prop_z(1, 10, 0.0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            one_sample_prop_z(1, 10, 1.0),
            Err(Error::Parameter(_))
        ));
        assert!(one_sample_prop_z(11, 10, 0.5).is_err());
        assert!(matches!(
            two_sample_prop_z(0, 10, 0, 20),
            Err(Error::DegenerateVariance(_))
        ));
        assert!(matches!(
            two_sample_prop_z(10, 10, 20, 20),
            Err(Error::DegenerateVariance(_))
        ));
    }

    #[test]
    fn h_worked_values() {
        assert!((arcsine(0.2914) - 1.140_434_1).abs() < 5e-8);
        assert!((arcsine(0.10) - 0.643_501_11).abs() < 5e-9);
        assert!((cohens_h_one(0.2914, 0.10).unwrap() - 0.497).abs() < 5e-4);
        assert_eq!(cohens_h_one(0.3, 0.3).unwrap(), 0.0);
        assert_eq!(cohens_h_one(1.0, 0.0).unwrap(), std::f64::consts::PI);
        // near p0 = .5, h ~ 2 (p - .5)
        assert!((cohens_h_one(0.55, 0.5).unwrap() - 0.1).abs() < 0.005);
        assert!(cohens_h_one(1.2, 0.5).is_err());
    }

    #[test]
    fn two_sample_one_vs_two() {
        let r = two_sample_prop_z(30, 268, 160, 549).unwrap();
        assert!((r.estimate + 0.1795).abs() < 5e-4);
        assert!((r.statistic_z + 5.70).abs() < 0.01);
        assert!((r.ci_low + 0.2331).abs() < 5e-4);
        assert!((r.ci_high + 0.1259).abs() < 5e-4);
        assert!((r.effect_h + 0.458).abs() < 5e-4);
    }

    #[test]
    fn two_sample_identical() {
        let r = two_sample_prop_z(12, 100, 12, 100).unwrap();
        assert_eq!(r.statistic_z, 0.0);
        assert_eq!(r.effect_h, 0.0);
        assert!((r.ci_low + r.ci_high).abs() < 1e-15);
        assert_eq!(r.p_two_tailed, 1.0);
    }
}
