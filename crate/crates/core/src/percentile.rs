//! Percentile ranks within reference sets, top-x% indicators and MNCS.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::data::{group_reference_sets, Dataset, InstitutionSample, ReferenceSetKey};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    /// `100 * (i - 1) / n`
    Common,
    /// `100 * i / n`, as used by InCites.
    Incites,
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "common" => Ok(Formula::Common),
            "incites" => Ok(Formula::Incites),
            other => Err(Error::Config(format!(
                "unknown percentile formula {other:?}"
            ))),
        }
    }
}

/// Which rank a group of tied papers shares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Highest rank of the tie group under the active ordering.
    #[default]
    Max,
    /// Lowest rank of the tie group under the active ordering.
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PercentileScheme {
    pub formula: Formula,
    /// Rank by descending citations so that 100 is the worst value.
    pub inverted: bool,
    /// Pin zero-cited papers to the worst value (0, or 100 when inverted).
    pub zero_rank_adjust: bool,
    pub ties: TiePolicy,
}

impl PercentileScheme {
    /// The InCites convention: `100 * i / n` over descending ranks.
    pub fn incites() -> Self {
        Self {
            formula: Formula::Incites,
            inverted: true,
            zero_rank_adjust: true,
            ties: TiePolicy::Max,
        }
    }

    pub fn common() -> Self {
        Self {
            formula: Formula::Common,
            inverted: false,
            zero_rank_adjust: false,
            ties: TiePolicy::Max,
        }
    }

    pub fn worst_value(&self) -> f64 {
        if self.inverted {
            100.0
        } else {
            0.0
        }
    }

    /// Re-expresses a percentile of this scheme in the inverted orientation
    /// (lower is better) used for top-x classification.
    pub fn to_inverted(&self, percentile: f64) -> f64 {
        if self.inverted {
            percentile
        } else {
            100.0 - percentile
        }
    }

    /// True when `a` is a better percentile than `b` under this scheme.
    pub fn is_better(&self, a: f64, b: f64) -> bool {
        if self.inverted {
            a < b
        } else {
            a > b
        }
    }
}

/// Rank and percentile of one paper within its reference set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankedPercentile {
    pub rank: usize,
    pub percentile: f64,
    pub tied_with: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercentileAssignment {
    pub paper_id: String,
    pub reference_set: ReferenceSetKey,
    pub rank: usize,
    pub percentile: f64,
    pub tied_with: usize,
    pub top_x_weight: f64,
}

fn non_empty(citations: &[u64]) -> Result<()> {
    if citations.is_empty() {
        return Err(Error::Precondition("citation list is empty".into()));
    }
    Ok(())
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 100.0) {
        return Err(Error::Parameter(format!(
            "top-x threshold {x} outside (0, 100)"
        )));
    }
    Ok(())
}

/// Ranks in ascending order of citations (1 = fewest).
pub fn rank_ascending(citations: &[u64], ties: TiePolicy) -> Result<Vec<usize>> {
    rank_by(citations, ties, false)
}

/// Ranks in descending order of citations (1 = most cited).
pub fn rank_descending(citations: &[u64], ties: TiePolicy) -> Result<Vec<usize>> {
    rank_by(citations, ties, true)
}

fn rank_by(citations: &[u64], ties: TiePolicy, descending: bool) -> Result<Vec<usize>> {
    non_empty(citations)?;
    let mut sorted = citations.to_vec();
    sorted.sort_unstable();
    Ok(citations
        .iter()
        .map(|&c| {
            let below = sorted.partition_point(|&v| v < c);
            let upto = sorted.partition_point(|&v| v <= c);
            let above = sorted.len() - upto;
            // positions occupied by the tie group under the active ordering
            let (first, last) = if descending {
                (above + 1, sorted.len() - below)
            } else {
                (below + 1, upto)
            };
            match ties {
                TiePolicy::Max => last,
                TiePolicy::Min => first,
            }
        })
        .collect())
}

fn tie_sizes(citations: &[u64]) -> Vec<usize> {
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for &c in citations {
        *counts.entry(c).or_default() += 1;
    }
    citations.iter().map(|c| counts[c]).collect()
}

/// Percentile rank of every paper in one reference set.
pub fn percentile_rank(
    citations: &[u64],
    scheme: &PercentileScheme,
) -> Result<Vec<RankedPercentile>> {
    let ranks = rank_by(citations, scheme.ties, scheme.inverted)?;
    let n = citations.len() as f64;
    let tied = tie_sizes(citations);
    Ok(citations
        .iter()
        .zip(ranks)
        .zip(tied)
        .map(|((&c, rank), tied_with)| {
            let i = rank as f64;
            let mut percentile = match scheme.formula {
                Formula::Common => 100.0 * (i - 1.0) / n,
                Formula::Incites => 100.0 * i / n,
            };
            if scheme.zero_rank_adjust && c == 0 {
                percentile = scheme.worst_value();
            }
            RankedPercentile {
                rank,
                percentile,
                tied_with,
            }
        })
        .collect())
}

/// 1 when an inverted percentile falls in the top `x` percent.
pub fn classify_top_x(inv_percentile: f64, x: f64) -> u8 {
    u8::from(inv_percentile <= x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalShare {
    pub weights: Vec<f64>,
    pub share: f64,
    /// Citation count of the paper sitting on the threshold slot.
    pub threshold_citations: u64,
}

/// Fractional top-x% attribution: papers above the threshold citation
/// value count fully, papers tied at it split the remaining slots.
pub fn fractional_top_share(citations: &[u64], x: f64) -> Result<FractionalShare> {
    non_empty(citations)?;
    check_x(x)?;
    let n = citations.len();
    let slots = n as f64 * x / 100.0;
    let mut desc = citations.to_vec();
    desc.sort_unstable_by(|a, b| b.cmp(a));
    let k = ((slots - 1e-9).ceil() as usize).clamp(1, n);
    let threshold = desc[k - 1];
    let above = desc.iter().filter(|&&c| c > threshold).count();
    let tied = desc.iter().filter(|&&c| c == threshold).count();
    let tied_total = (slots - above as f64).clamp(0.0, tied as f64);
    let tied_weight = tied_total / tied as f64;
    let weights = citations
        .iter()
        .map(|&c| match c.cmp(&threshold) {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Equal => tied_weight,
            std::cmp::Ordering::Less => 0.0,
        })
        .collect();
    let numerator = above as f64 + tied_total;
    Ok(FractionalShare {
        weights,
        share: numerator / n as f64,
        threshold_citations: threshold,
    })
}

/// Percentile assignments for a whole dataset, one per paper, taken from
/// the reference set in which the paper performs best.
#[derive(Debug, Clone)]
pub struct PaperPercentiles {
    pub scheme: PercentileScheme,
    pub top_x: f64,
    by_id: HashMap<String, (PercentileAssignment, f64)>,
    order: Vec<String>,
    pub set_sizes: Vec<(ReferenceSetKey, usize, usize)>,
}

impl PaperPercentiles {
    pub fn get(&self, id: &str) -> Option<&PercentileAssignment> {
        self.by_id.get(id).map(|(a, _)| a)
    }

    /// Mean citations of the reference set the paper's assignment comes from.
    pub fn reference_mean(&self, id: &str) -> Option<f64> {
        self.by_id.get(id).map(|(_, m)| *m)
    }

    /// Assignments in dataset order.
    pub fn iter(&self) -> impl Iterator<Item = &PercentileAssignment> {
        self.order.iter().map(|id| &self.by_id[id].0)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Normalizes every paper of the dataset against its reference sets.
pub fn normalize_dataset(
    dataset: &Dataset,
    scheme: &PercentileScheme,
    top_x: f64,
) -> Result<PaperPercentiles> {
    check_x(top_x)?;
    let mut by_id: HashMap<String, (PercentileAssignment, f64)> = HashMap::new();
    let mut set_sizes = Vec::new();
    for set in group_reference_sets(dataset) {
        let citations = set.citations();
        let ranked = percentile_rank(&citations, scheme)?;
        let fractional = fractional_top_share(&citations, top_x)?;
        let mean = set.mean_citations();
        let tie_groups = {
            let mut distinct = citations.clone();
            distinct.sort_unstable();
            distinct.dedup();
            citations.len() - distinct.len()
        };
        set_sizes.push((set.key.clone(), set.members.len(), tie_groups));
        for ((member, r), w) in set.members.iter().zip(ranked).zip(fractional.weights) {
            let candidate = PercentileAssignment {
                paper_id: member.id.clone(),
                reference_set: set.key.clone(),
                rank: r.rank,
                percentile: r.percentile,
                tied_with: r.tied_with,
                top_x_weight: w,
            };
            match by_id.get(&member.id) {
                Some((current, _))
                    if !scheme.is_better(candidate.percentile, current.percentile) => {}
                _ => {
                    by_id.insert(member.id.clone(), (candidate, mean));
                }
            }
        }
    }
    let order = dataset.records().iter().map(|r| r.id.clone()).collect();
    Ok(PaperPercentiles {
        scheme: *scheme,
        top_x,
        by_id,
        order,
        set_sizes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Counting {
    Binary,
    Fractional,
}

impl FromStr for Counting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "binary" => Ok(Counting::Binary),
            "fractional" => Ok(Counting::Fractional),
            other => Err(Error::Config(format!("unknown counting method {other:?}"))),
        }
    }
}

impl fmt::Display for Counting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Counting::Binary => "binary",
            Counting::Fractional => "fractional",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopShareResult {
    pub institution: String,
    pub n: usize,
    /// PP_top x% as a proportion.
    pub share: f64,
    /// Number of top-x papers (an integer under binary counting).
    pub count: f64,
    pub threshold_x: f64,
    pub counting: Counting,
}

/// The inverted percentile used for a record: the pre-supplied value when
/// present, otherwise the one computed from its reference sets.
pub fn inverted_percentile_of(
    record: &crate::data::PublicationRecord,
    computed: Option<&PaperPercentiles>,
) -> Option<f64> {
    record.inv_percentile.or_else(|| {
        computed.and_then(|pp| {
            pp.get(&record.id)
                .map(|a| pp.scheme.to_inverted(a.percentile))
        })
    })
}

/// PP_top x% of one institution.
pub fn institution_top_share(
    sample: &InstitutionSample,
    x: f64,
    counting: Counting,
    computed: Option<&PaperPercentiles>,
) -> Result<TopShareResult> {
    check_x(x)?;
    if sample.n == 0 {
        return Err(Error::Precondition("institution sample is empty".into()));
    }
    let count = match counting {
        Counting::Binary => {
            let mut k = 0u64;
            for r in &sample.records {
                let p = inverted_percentile_of(r, computed).ok_or_else(|| {
                    Error::Capability(format!(
                        "paper {:?} has neither a supplied nor a computed percentile",
                        r.id
                    ))
                })?;
                k += u64::from(classify_top_x(p, x));
            }
            k as f64
        }
        Counting::Fractional => {
            let pp = computed.ok_or_else(|| {
                Error::Capability(
                    "fractional counting needs the full reference-set citation counts".into(),
                )
            })?;
            if (pp.top_x - x).abs() > 1e-12 {
                return Err(Error::Capability(format!(
                    "fractional weights were computed for x = {}, not {x}",
                    pp.top_x
                )));
            }
            let mut sum = 0.0;
            for r in &sample.records {
                sum += pp
                    .get(&r.id)
                    .ok_or_else(|| {
                        Error::Capability(format!("no reference-set weight for paper {:?}", r.id))
                    })?
                    .top_x_weight;
            }
            sum
        }
    };
    Ok(TopShareResult {
        institution: sample.institution.clone(),
        n: sample.n,
        share: count / sample.n as f64,
        count,
        threshold_x: x,
        counting,
    })
}

/// Mean normalized citation score: the mean of citations over reference-set mean.
pub fn mncs(citations: &[u64], reference_means: &[f64]) -> Result<f64> {
    if citations.len() != reference_means.len() {
        return Err(Error::Precondition(format!(
            "{} citation counts but {} reference means",
            citations.len(),
            reference_means.len()
        )));
    }
    non_empty(citations)?;
    let mut sum = 0.0;
    for (&c, &m) in citations.iter().zip(reference_means) {
        if !(m > 0.0) {
            return Err(Error::DegenerateReference(format!(
                "reference mean {m} is not positive"
            )));
        }
        sum += c as f64 / m;
    }
    Ok(sum / citations.len() as f64)
}

/// One paper of an institution as seen by the outlier contrast.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlierInput {
    pub citations: u64,
    pub reference_mean: f64,
    pub top_x_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierReport {
    pub n: usize,
    pub max_citations: u64,
    pub mncs_with: f64,
    pub mncs_without: f64,
    pub mncs_delta: f64,
    pub mncs_relative_delta: f64,
    pub share_with: f64,
    pub share_without: f64,
    /// Share change in percentage points.
    pub share_delta_points: f64,
    pub top_x: f64,
}

fn mncs_and_share<'a>(papers: impl Iterator<Item = &'a OutlierInput>) -> Result<(f64, f64)> {
    let mut cites = Vec::new();
    let mut means = Vec::new();
    let mut weight = 0.0;
    for p in papers {
        cites.push(p.citations);
        means.push(p.reference_mean);
        weight += p.top_x_weight;
    }
    let share = weight / cites.len() as f64;
    Ok((mncs(&cites, &means)?, share))
}

/// MNCS and fractional PP_top x% with and without the single most-cited paper.
/// Reference sets are left untouched; only the institution sample shrinks.
pub fn outlier_sensitivity(sample: &[OutlierInput], x: f64) -> Result<OutlierReport> {
    check_x(x)?;
    if sample.len() < 2 {
        return Err(Error::Precondition(
            "outlier contrast needs at least two papers".into(),
        ));
    }
    let top = sample
        .iter()
        .enumerate()
        .max_by_key(|(i, p)| (p.citations, std::cmp::Reverse(*i)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let (mncs_with, share_with) = mncs_and_share(sample.iter())?;
    let (mncs_without, share_without) = mncs_and_share(
        sample
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != top)
            .map(|(_, p)| p),
    )?;
    let mncs_delta = mncs_with - mncs_without;
    Ok(OutlierReport {
        n: sample.len(),
        max_citations: sample[top].citations,
        mncs_with,
        mncs_without,
        mncs_delta,
        mncs_relative_delta: mncs_delta / mncs_with,
        share_with,
        share_without,
        share_delta_points: 100.0 * (share_with - share_without),
        top_x: x,
    })
}
