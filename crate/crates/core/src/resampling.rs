//! Seeded bootstrap and the Mann-Whitney rank-sum test.
//!
//! Every bootstrap replicate draws from its own ChaCha8 stream: the master
//! seed fixes the key and the replicate index selects the stream. Results
//! are therefore identical whatever the number of worker threads.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::kernels::{normal_quantile, normal_two_tailed_p};

pub const DEFAULT_REPLICATES: usize = 1000;
pub const DEFAULT_SEED: u64 = 20_140_410;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    /// `point +/- z * se_boot`
    NormalApprox,
    /// Empirical quantiles of the replicate distribution.
    Percentile,
}

impl FromStr for CiMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" | "normal_approx" => Ok(CiMethod::NormalApprox),
            "percentile" => Ok(CiMethod::Percentile),
            other => Err(Error::Config(format!(
                "unknown bootstrap CI method {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Statistic {
    Mean,
    MeanDiff,
    Proportion,
    PropDiff,
}

impl Statistic {
    fn two_sample(self) -> bool {
        matches!(self, Statistic::MeanDiff | Statistic::PropDiff)
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::Mean => "MEAN",
            Statistic::MeanDiff => "MEAN_DIFF",
            Statistic::Proportion => "PROPORTION",
            Statistic::PropDiff => "PROP_DIFF",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapSpec {
    pub replicates: usize,
    pub seed: u64,
    pub ci_method: CiMethod,
    pub ci_level: f64,
}

impl Default for BootstrapSpec {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            seed: DEFAULT_SEED,
            ci_method: CiMethod::NormalApprox,
            ci_level: 0.95,
        }
    }
}

/// One sample, or two independently resampled groups.
#[derive(Debug, Clone, Copy)]
pub enum Samples<'a> {
    One(&'a [f64]),
    Two(&'a [f64], &'a [f64]),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub statistic: Statistic,
    pub point: f64,
    pub se_boot: f64,
    pub ci_method: CiMethod,
    pub ci_low: f64,
    pub ci_high: f64,
    #[serde(rename = "replicates")]
    pub replicates_used: usize,
    pub seed: u64,
    /// Set when every replicate equals the point estimate.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl BootstrapResult {
    /// Bootstrap analogue of a significance test: does the interval leave out
    /// the null value?
    pub fn excludes(&self, null: f64) -> bool {
        null < self.ci_low || null > self.ci_high
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn check_binary(xs: &[f64]) -> Result<()> {
    if xs.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::Parameter(
            "proportion bootstrap needs 0/1 data".into(),
        ));
    }
    Ok(())
}

fn resampled_mean(xs: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    let n = xs.len();
    let mut sum = 0.0;
    for _ in 0..n {
        sum += xs[rng.random_range(0..n)];
    }
    sum / n as f64
}

/// Type 7 (linear interpolation) sample quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Bootstrap standard error and interval of a mean, mean difference,
/// proportion or proportion difference.
pub fn bootstrap_statistic(
    samples: Samples<'_>,
    statistic: Statistic,
    spec: &BootstrapSpec,
) -> Result<BootstrapResult> {
    if spec.replicates == 0 {
        return Err(Error::Parameter(
            "bootstrap needs at least one replicate".into(),
        ));
    }
    crate::stats::check_level(spec.ci_level)?;
    let (a, b) = match (samples, statistic.two_sample()) {
        (Samples::One(a), false) => (a, None),
        (Samples::Two(a, b), true) => (a, Some(b)),
        _ => {
            return Err(Error::Parameter(format!(
                "statistic {statistic} does not match the number of samples"
            )))
        }
    };
    for xs in std::iter::once(a).chain(b) {
        if xs.len() < 2 {
            return Err(Error::Precondition(
                "bootstrap needs at least two observations per sample".into(),
            ));
        }
        if xs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter(
                "bootstrap data contain non-finite values".into(),
            ));
        }
        if matches!(statistic, Statistic::Proportion | Statistic::PropDiff) {
            check_binary(xs)?;
        }
    }

    let point = match b {
        None => mean(a),
        Some(b) => mean(a) - mean(b),
    };
    let seed = spec.seed;
    let replicates: Vec<f64> = (0..spec.replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let ra = resampled_mean(a, &mut rng);
            match b {
                None => ra,
                Some(b) => ra - resampled_mean(b, &mut rng),
            }
        })
        .collect();

    let m = mean(&replicates);
    let se_boot = if replicates.len() > 1 {
        (replicates.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / (replicates.len() - 1) as f64)
            .sqrt()
    } else {
        0.0
    };
    let degenerate = replicates.iter().all(|&r| r == point);
    let alpha = 1.0 - spec.ci_level;
    let (ci_low, ci_high) = if degenerate {
        (point, point)
    } else {
        match spec.ci_method {
            CiMethod::NormalApprox => {
                let z = normal_quantile(1.0 - alpha / 2.0)?;
                (point - z * se_boot, point + z * se_boot)
            }
            CiMethod::Percentile => {
                let mut sorted = replicates;
                sorted.sort_by(f64::total_cmp);
                (
                    quantile_sorted(&sorted, alpha / 2.0),
                    quantile_sorted(&sorted, 1.0 - alpha / 2.0),
                )
            }
        }
    };
    Ok(BootstrapResult {
        statistic,
        point,
        se_boot: if degenerate { 0.0 } else { se_boot },
        ci_method: spec.ci_method,
        ci_low,
        ci_high,
        replicates_used: spec.replicates,
        seed,
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankSumResult {
    /// U for the first sample: the number of (a, b) pairs with a > b, ties counting one half.
    pub u_statistic: f64,
    pub rank_sum_a: f64,
    pub n1: usize,
    pub n2: usize,
    /// Positive when the first sample tends to be larger.
    pub z_approx: f64,
    pub p_two_tailed: f64,
    pub continuity_correction: bool,
}

/// Joint midranks of `a` followed by `b`, plus the tie term `sum(t^3 - t)`.
pub fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let mid = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = mid;
        }
        let t = (end - start) as f64;
        tie_term += t * t * t - t;
        start = end;
    }
    (ranks, tie_term)
}

/// Mann-Whitney rank-sum test, normal approximation with tie-corrected
/// variance and a continuity correction of one half.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<RankSumResult> {
    mann_whitney_with(a, b, true)
}

pub fn mann_whitney_with(
    a: &[f64],
    b: &[f64],
    continuity_correction: bool,
) -> Result<RankSumResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition(
            "rank-sum test needs two non-empty samples".into(),
        ));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::Parameter("rank-sum data contain NaN".into()));
    }
    let joint: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, tie_term) = midranks(&joint);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let rank_sum_a: f64 = ranks[..a.len()].iter().sum();
    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if !(variance > 0.0) {
        return Err(Error::DegenerateVariance(
            "all values are identical across both groups".into(),
        ));
    }
    let dev = u - n1 * n2 / 2.0;
    let adj = if continuity_correction {
        (dev.abs() - 0.5).max(0.0).copysign(dev)
    } else {
        dev
    };
    let z = adj / variance.sqrt();
    Ok(RankSumResult {
        u_statistic: u,
        rank_sum_a,
        n1: a.len(),
        n2: b.len(),
        z_approx: z,
        p_two_tailed: normal_two_tailed_p(z),
        continuity_correction,
    })
}
