//! Deterministic synthetic data for demonstrations and tests.
//!
//! The generators reproduce published summary moments exactly, so that
//! record-level pipelines can be checked against tables that were computed
//! from data we do not have.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, PublicationRecord};
use crate::error::{Error, Result};
use crate::stats::beta_inc_reg;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn mean_and_pop_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, v.sqrt())
}

/// Rescales `xs` in place to the given mean and population SD.
fn affine_to(xs: &mut [f64], mean: f64, pop_sd: f64) {
    let (m, s) = mean_and_pop_sd(xs);
    let scale = if s > 0.0 { pop_sd / s } else { 0.0 };
    for x in xs.iter_mut() {
        *x = mean + (*x - m) * scale;
    }
}

/// `n` uniform draws on [0, 100].
pub fn uniform_percentiles(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| 100.0 * r.random::<f64>()).collect()
}

/// `n >= 2` normal-shaped values with exactly the given sample mean and SD.
pub fn with_moments(n: usize, mean: f64, sd: f64, seed: u64) -> Result<Vec<f64>> {
    if n < 2 || !(sd >= 0.0) {
        return Err(Error::Parameter(format!(
            "cannot synthesize n={n}, sd={sd}"
        )));
    }
    let mut r = rng(seed);
    let mut xs: Vec<f64> = (0..n).map(|_| standard_normal(&mut r)).collect();
    let pop_sd = sd * ((n - 1) as f64 / n as f64).sqrt();
    affine_to(&mut xs, mean, pop_sd);
    Ok(xs)
}

const TOP_BOUND: f64 = 10.0;
const REST_FLOOR: f64 = 10.01;

/// Inverted percentiles on [0, 100] with exactly `top` values at or below
/// 10 and the given sample mean and SD.
pub fn percentiles_with_moments(
    n: usize,
    top: usize,
    mean: f64,
    sd: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if top >= n || n < 3 {
        return Err(Error::Parameter(format!(
            "need top < n and n >= 3 (n={n}, top={top})"
        )));
    }
    let rest_n = n - top;
    let tops: Vec<f64> = (0..top)
        .map(|j| TOP_BOUND * (j + 1) as f64 / (top + 1) as f64)
        .collect();
    let top_sum: f64 = tops.iter().sum();
    let top_sq: f64 = tops.iter().map(|t| t * t).sum();
    let rest_mean = (n as f64 * mean - top_sum) / rest_n as f64;
    let total_sq = (n - 1) as f64 * sd * sd + n as f64 * mean * mean;
    let rest_var = (total_sq - top_sq) / rest_n as f64 - rest_mean * rest_mean;
    if !(rest_var > 0.0) || !(REST_FLOOR..=100.0).contains(&rest_mean) {
        return Err(Error::Parameter(
            "moments are infeasible for bounded percentiles".into(),
        ));
    }
    let rest_sd = rest_var.sqrt();

    // stratified quantiles of a moment-matched Beta on [REST_FLOOR, 100]
    let width = 100.0 - REST_FLOOR;
    let m = (rest_mean - REST_FLOOR) / width;
    let v = rest_var / (width * width);
    let k = m * (1.0 - m) / v - 1.0;
    if !(k > 0.0) {
        return Err(Error::Parameter(
            "moments are infeasible for bounded percentiles".into(),
        ));
    }
    let (a, b) = (m * k, (1.0 - m) * k);
    let mut rest: Vec<f64> = (0..rest_n)
        .map(|i| REST_FLOOR + width * beta_quantile(a, b, (i as f64 + 0.5) / rest_n as f64))
        .collect();
    for _ in 0..500 {
        affine_to(&mut rest, rest_mean, rest_sd);
        if rest.iter().all(|v| (REST_FLOOR..=100.0).contains(v)) {
            let mut out = tops;
            out.extend(rest);
            let mut r = rng(seed);
            // interleave so file order does not reveal the construction
            for i in (1..out.len()).rev() {
                out.swap(i, r.random_range(0..=i));
            }
            return Ok(out);
        }
        for v in rest.iter_mut() {
            *v = v.clamp(REST_FLOOR, 100.0);
        }
    }
    Err(Error::Parameter(
        "could not fit bounded percentiles to the requested moments".into(),
    ))
}

fn beta_quantile(a: f64, b: f64, q: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if beta_inc_reg(a, b, mid, 1.0 - mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Moments and top-10% counts of the three institutions analysed in the
/// worked examples: (label, n, mean, sd, top-10% count).
pub const PAPER_INSTITUTIONS: [(&str, usize, f64, f64, usize); 3] = [
    ("1", 268, 49.67, 30.66, 30),
    ("2", 549, 32.15, 27.49, 160),
    ("3", 488, 45.98, 29.40, 57),
];

const CATEGORIES: [&str; 6] = [
    "PHYS_CM",
    "CHEM_PHYS",
    "BIOCHEM",
    "MATH_APPL",
    "NEUROSCI",
    "ECOLOGY",
];

/// A 1305-record dataset whose supplied inverted percentiles reproduce the
/// published per-institution means, SDs and top-10% counts.
pub fn paper_like_dataset(seed: u64) -> Result<Dataset> {
    let mut records = Vec::new();
    let mut r = rng(seed.wrapping_add(1));
    for (k, &(label, n, mean, sd, top)) in PAPER_INSTITUTIONS.iter().enumerate() {
        let ps = percentiles_with_moments(n, top, mean, sd, seed.wrapping_add(k as u64 * 7919))?;
        for (i, p) in ps.into_iter().enumerate() {
            // four decimals in files; keep values exactly representable as written
            let p = (p * 1e4).round() / 1e4;
            let category = CATEGORIES[r.random_range(0..CATEGORIES.len())];
            let year = 2001 + (r.random::<f64>() < 0.5) as i32;
            let citations = (150.0 * (1.0 - p / 100.0).powi(4)).round() as u64;
            records.push(PublicationRecord::new(
                format!("i{label}-{i:04}"),
                label,
                year,
                vec![category.to_string()],
                citations,
                Some(p),
            )?);
        }
    }
    Dataset::new(records)
}

fn lognormal_citations(rng: &mut ChaCha8Rng, mu: f64, sigma: f64) -> u64 {
    (mu + sigma * standard_normal(rng)).exp().floor() as u64
}

/// Reference sets of "world" papers plus one institution of `institution_n`
/// papers drawn from the same citation distribution. When `outlier` is
/// set, the institution's first paper is replaced by one with that many
/// citations.
pub fn outlier_world(institution_n: usize, outlier: Option<u64>, seed: u64) -> Result<Dataset> {
    let mut r = rng(seed);
    let mut records = Vec::new();
    let sets = [
        ("PHYS_CM", 2001),
        ("PHYS_CM", 2002),
        ("CHEM_PHYS", 2001),
        ("CHEM_PHYS", 2002),
    ];
    for (s, &(cat, year)) in sets.iter().enumerate() {
        for i in 0..1000 {
            records.push(PublicationRecord::new(
                format!("w{s}-{i:04}"),
                "world",
                year,
                vec![cat.to_string()],
                lognormal_citations(&mut r, 2.0, 1.0),
                None,
            )?);
        }
    }
    for i in 0..institution_n {
        let (cat, year) = sets[i % sets.len()];
        let citations = match (i, outlier) {
            (0, Some(c)) => c,
            _ => lognormal_citations(&mut r, 2.0, 1.0),
        };
        records.push(PublicationRecord::new(
            format!("g-{i:04}"),
            "G",
            year,
            vec![cat.to_string()],
            citations,
            None,
        )?);
    }
    Dataset::new(records)
}
