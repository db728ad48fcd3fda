use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Cohen's conventional small / medium / large cut points, applied to |d| or |h|.
pub const MAGNITUDE_THRESHOLDS: [f64; 3] = [0.2, 0.5, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectMagnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl fmt::Display for EffectMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EffectMagnitude::Negligible => "negligible",
            EffectMagnitude::Small => "small",
            EffectMagnitude::Medium => "medium",
            EffectMagnitude::Large => "large",
        })
    }
}

/// Boundaries belong to the larger class: |e| = 0.5 is medium.
pub fn classify_magnitude(effect: f64) -> Result<EffectMagnitude> {
    if !effect.is_finite() {
        return Err(Error::Parameter(format!(
            "effect size {effect} is not finite"
        )));
    }
    let e = effect.abs();
    let [small, medium, large] = MAGNITUDE_THRESHOLDS;
    Ok(if e >= large {
        EffectMagnitude::Large
    } else if e >= medium {
        EffectMagnitude::Medium
    } else if e >= small {
        EffectMagnitude::Small
    } else {
        EffectMagnitude::Negligible
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CiOverlap {
    Overlap,
    Disjoint,
}

impl CiOverlap {
    /// What non-overlap of two 95% intervals licenses. Overlap says nothing
    /// about the .05 level.
    pub fn verdict(&self) -> &'static str {
        match self {
            CiOverlap::Overlap => "not significant at .01",
            CiOverlap::Disjoint => "significant at .01",
        }
    }
}

/// Compares two 95% confidence intervals given as `(low, high)`.
pub fn ci_overlap_verdict(a: (f64, f64), b: (f64, f64)) -> Result<CiOverlap> {
    for (lo, hi) in [a, b] {
        if !(lo <= hi) {
            return Err(Error::Parameter(format!("invalid interval [{lo}, {hi}]")));
        }
    }
    Ok(if a.0 <= b.1 && b.0 <= a.1 {
        CiOverlap::Overlap
    } else {
        CiOverlap::Disjoint
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn magnitudes() {
        assert_eq!(classify_magnitude(-0.649).unwrap(), EffectMagnitude::Medium);
        assert_eq!(
            classify_magnitude(0.124).unwrap(),
            EffectMagnitude::Negligible
        );
        assert_eq!(classify_magnitude(0.2).unwrap(), EffectMagnitude::Small);
        assert_eq!(classify_magnitude(0.5).unwrap(), EffectMagnitude::Medium);
        assert_eq!(classify_magnitude(-0.8).unwrap(), EffectMagnitude::Large);
        assert!(classify_magnitude(f64::NAN).is_err());
        assert!(classify_magnitude(f64::INFINITY).is_err());
    }

    #[test]
    fn overlap_rule() {
        let inst1 = (45.99, 53.36);
        assert_eq!(
            ci_overlap_verdict(inst1, (29.85, 34.46)).unwrap(),
            CiOverlap::Disjoint
        );
        assert_eq!(
            ci_overlap_verdict(inst1, (43.37, 48.59)).unwrap(),
            CiOverlap::Overlap
        );
        assert_eq!(
            ci_overlap_verdict(inst1, inst1).unwrap(),
            CiOverlap::Overlap
        );
        assert_eq!(CiOverlap::Disjoint.verdict(), "significant at .01");
        assert!(ci_overlap_verdict((2.0, 1.0), inst1).is_err());
    }
}
