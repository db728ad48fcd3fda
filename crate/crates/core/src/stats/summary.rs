use serde::Serialize;

use crate::error::{Error, Result};

/// Mean, sample standard deviation (divisor n - 1) and standard error.
/// `sd` and `se` are `None` for a single observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub sd: Option<f64>,
    pub se: Option<f64>,
}

impl SummaryStats {
    /// Builds a summary from published moments.
    pub fn from_moments(n: usize, mean: f64, sd: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition(
                "summary needs at least one observation".into(),
            ));
        }
        if !mean.is_finite() || !sd.is_finite() || sd < 0.0 {
            return Err(Error::Parameter(format!(
                "invalid moments mean={mean} sd={sd}"
            )));
        }
        if n == 1 {
            return Ok(Self {
                n,
                mean,
                sd: None,
                se: None,
            });
        }
        Ok(Self {
            n,
            mean,
            sd: Some(sd),
            se: Some(sd / (n as f64).sqrt()),
        })
    }

    pub(crate) fn spread(&self) -> Result<(f64, f64)> {
        match (self.sd, self.se) {
            (Some(sd), Some(se)) => Ok((sd, se)),
            _ => Err(Error::Precondition(format!(
                "standard deviation undefined for n = {}",
                self.n
            ))),
        }
    }

    pub fn variance(&self) -> Option<f64> {
        self.sd.map(|s| s * s)
    }
}

/// Single-pass (Welford) summary of a sample.
pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::Precondition(
            "cannot summarize an empty sample".into(),
        ));
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Parameter(format!("non-finite value {v}")));
        }
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    let n = values.len();
    let sd = (m2 / (n.max(2) - 1) as f64).sqrt();
    SummaryStats::from_moments(n, mean, sd)
}
