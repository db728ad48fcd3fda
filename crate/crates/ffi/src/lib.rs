//! C ABI over `pct_impact`.
//!
//! Every fallible function returns a [`PctStatus`] and writes its result
//! through an out-pointer. On failure the out-pointer is left untouched and
//! [`pct_last_error_message`] describes the error on the calling thread.
//! Datasets are opaque handles created by `pct_dataset_from_*` and released
//! with [`pct_dataset_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pct_impact::data::{parse_records, Dataset, IngestConfig};
use pct_impact::percentile::{fractional_top_share, percentile_rank, Counting, PercentileScheme};
use pct_impact::report::{institution_indicators, AnalysisConfig};
use pct_impact::stats::{
    one_sample_prop_z_at, one_sample_t_at, summarize, two_sample_pooled_t_at, two_sample_prop_z_at,
    two_sample_welch_t_at, MeanTestResult, ProportionTestResult, SummaryStats,
};
use pct_impact::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PctStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    InvalidParameter = 3,
    Precondition = 4,
    DegenerateVariance = 5,
    DegenerateReference = 6,
    EmptyDataset = 7,
    UnknownInstitution = 8,
    Config = 9,
    TooManyRejects = 10,
    Capability = 11,
    Io = 12,
    Parse = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PctScheme {
    /// 100·i/n, descending, zero-cited papers pinned to 100.
    Incites = 0,
    /// 100·(i−1)/n, ascending.
    Common = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PctCounting {
    Binary = 0,
    Fractional = 1,
}

/// Mean test result. `pooled_sd` is NaN for one-sample tests.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PctMeanTest {
    pub estimate: f64,
    pub se: f64,
    pub t: f64,
    pub df: f64,
    pub p: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub d: f64,
    pub pooled_sd: f64,
}

/// Proportion test result; all values are proportions, not percentages.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PctProportionTest {
    pub estimate: f64,
    pub se: f64,
    pub z: f64,
    pub p: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub h: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PctTopShare {
    pub n: u64,
    pub share: f64,
    /// Number of top papers; fractional under fractional counting.
    pub count: f64,
}

/// Opaque parsed dataset.
pub struct PctDataset {
    dataset: Dataset,
    rejects: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PctStatus {
    match e {
        Error::Parameter(_) => PctStatus::InvalidParameter,
        Error::Precondition(_) => PctStatus::Precondition,
        Error::DegenerateVariance(_) => PctStatus::DegenerateVariance,
        Error::DegenerateReference(_) => PctStatus::DegenerateReference,
        Error::EmptyDataset(_) => PctStatus::EmptyDataset,
        Error::UnknownInstitution { .. } => PctStatus::UnknownInstitution,
        Error::Config(_) => PctStatus::Config,
        Error::TooManyRejects { .. } => PctStatus::TooManyRejects,
        Error::Capability(_) => PctStatus::Capability,
        Error::Io(_) => PctStatus::Io,
        Error::Csv(_) | Error::Json(_) => PctStatus::Parse,
    }
}

struct Failure(PctStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

/// Runs `f`, converting errors and panics into a status and the last-error slot.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> PctStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PctStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            PctStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(PctStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` is null or points to a NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure(
            PctStatus::InvalidString,
            format!("{what} is not valid UTF-8"),
        )
    })
}

/// # Safety
/// `p` is null or valid for writes of `T`.
unsafe fn write_out<T>(p: *mut T, v: T, what: &str) -> FfiResult<()> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

/// # Safety
/// `p` is null or points to a live handle.
unsafe fn dataset_ref<'a>(p: *const PctDataset) -> FfiResult<&'a PctDataset> {
    p.as_ref().ok_or_else(|| null("dataset"))
}

/// # Safety
/// `p` is null or valid for `n` reads; a null pointer is accepted when `n` is 0.
unsafe fn slice_arg<'a, T>(p: *const T, n: usize, what: &str) -> FfiResult<&'a [T]> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

fn scheme(s: PctScheme) -> PercentileScheme {
    match s {
        PctScheme::Incites => PercentileScheme::incites(),
        PctScheme::Common => PercentileScheme::common(),
    }
}

fn mean_out(r: MeanTestResult) -> PctMeanTest {
    PctMeanTest {
        estimate: r.estimate,
        se: r.se,
        t: r.statistic_t,
        df: r.df,
        p: r.p_two_tailed,
        ci_low: r.ci_low,
        ci_high: r.ci_high,
        d: r.effect_d,
        pooled_sd: r.pooled_sd.unwrap_or(f64::NAN),
    }
}

fn prop_out(r: ProportionTestResult) -> PctProportionTest {
    PctProportionTest {
        estimate: r.estimate,
        se: r.se,
        z: r.statistic_z,
        p: r.p_two_tailed,
        ci_low: r.ci_low,
        ci_high: r.ci_high,
        h: r.effect_h,
    }
}

fn dataset_from(source: &[u8]) -> FfiResult<Box<PctDataset>> {
    let outcome = parse_records(source, &IngestConfig::default())?;
    Ok(Box::new(PctDataset {
        dataset: outcome.dataset,
        rejects: outcome.rejects.len(),
    }))
}

/// Message for the last failed call on this thread, or null after a
/// success. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pct_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated library version.
#[no_mangle]
pub extern "C" fn pct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a CSV file. Rows with bad values are skipped and counted.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn pct_dataset_from_path(
    path: *const c_char,
    out: *mut *mut PctDataset,
) -> PctStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let bytes = std::fs::read(path).map_err(Error::from)?;
        write_out(out, Box::into_raw(dataset_from(&bytes)?), "out")
    })
}

/// Parses CSV text held in memory.
///
/// # Safety
/// `csv` is a NUL-terminated string; `out` is valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn pct_dataset_from_csv(
    csv: *const c_char,
    out: *mut *mut PctDataset,
) -> PctStatus {
    guard(|| {
        let text = str_arg(csv, "csv")?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_out(out, Box::into_raw(dataset_from(text.as_bytes())?), "out")
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `dataset` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pct_dataset_free(dataset: *mut PctDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Number of papers.
///
/// # Safety
/// `dataset` is a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pct_dataset_len(dataset: *const PctDataset, out: *mut usize) -> PctStatus {
    guard(|| write_out(out, dataset_ref(dataset)?.dataset.len(), "out"))
}

/// Number of rejected input rows.
///
/// # Safety
/// `dataset` is a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pct_dataset_reject_count(
    dataset: *const PctDataset,
    out: *mut usize,
) -> PctStatus {
    guard(|| write_out(out, dataset_ref(dataset)?.rejects, "out"))
}

/// Number of distinct institutions.
///
/// # Safety
/// `dataset` is a live handle; `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pct_dataset_institution_count(
    dataset: *const PctDataset,
    out: *mut usize,
) -> PctStatus {
    guard(|| {
        write_out(
            out,
            dataset_ref(dataset)?.dataset.institutions().len(),
            "out",
        )
    })
}

/// Copies the label of institution `index` (sorted order) into `buf` with a
/// terminating NUL. `required` receives the needed size including the NUL;
/// `BufferTooSmall` is returned when `buf_len` is short.
///
/// # Safety
/// `dataset` is a live handle; `buf` is valid for `buf_len` bytes or null
/// when `buf_len` is 0; `required` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pct_dataset_institution_label(
    dataset: *const PctDataset,
    index: usize,
    buf: *mut c_char,
    buf_len: usize,
    required: *mut usize,
) -> PctStatus {
    guard(|| {
        let labels = dataset_ref(dataset)?.dataset.institutions();
        let label = labels.get(index).ok_or_else(|| {
            Failure(
                PctStatus::InvalidParameter,
                format!(
                    "institution index {index} out of range (count {})",
                    labels.len()
                ),
            )
        })?;
        let need = label.len() + 1;
        if !required.is_null() {
            required.write(need);
        }
        if buf_len < need {
            return Err(Failure(
                PctStatus::BufferTooSmall,
                format!("label needs {need} bytes, buffer has {buf_len}"),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(label.as_ptr(), buf.cast::<u8>(), label.len());
        buf.add(label.len()).write(0);
        Ok(())
    })
}

fn analysis_config(s: PctScheme, top_x: f64, counting: PctCounting) -> AnalysisConfig {
    AnalysisConfig {
        scheme: scheme(s),
        top_x,
        counting: match counting {
            PctCounting::Binary => Counting::Binary,
            PctCounting::Fractional => Counting::Fractional,
        },
        ..AnalysisConfig::default()
    }
}

/// One-sample t test of an institution's mean percentile against `mu0`.
/// Percentiles are taken from the file when every row supplies one and
/// are computed under `scheme` otherwise.
///
/// # Safety
/// `dataset` is a live handle; `institution` is a NUL-terminated string;
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pct_institution_mean_test(
    dataset: *const PctDataset,
    institution: *const c_char,
    scheme: PctScheme,
    mu0: f64,
    ci_level: f64,
    out: *mut PctMeanTest,
) -> PctStatus {
    guard(|| {
        let ds = dataset_ref(dataset)?;
        let inst = str_arg(institution, "institution")?;
        let cfg = analysis_config(scheme, 10.0, PctCounting::Binary);
        let values = institution_indicators(&cfg, &ds.dataset, inst)?.percentiles;
        let r = one_sample_t_at(&summarize(&values)?, mu0, ci_level)?;
        write_out(out, mean_out(r), "out")
    })
}

/// PP_top x% of an institution.
///
/// # Safety
/// `dataset` is a live handle; `institution` is a NUL-terminated string;
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pct_institution_top_share(
    dataset: *const PctDataset,
    institution: *const c_char,
    scheme: PctScheme,
    top_x: f64,
    counting: PctCounting,
    out: *mut PctTopShare,
) -> PctStatus {
    guard(|| {
        let ds = dataset_ref(dataset)?;
        let inst = str_arg(institution, "institution")?;
        let cfg = analysis_config(scheme, top_x, counting);
        let r = institution_indicators(&cfg, &ds.dataset, inst)?.top_share;
        write_out(
            out,
            PctTopShare {
                n: r.n as u64,
                share: r.share,
                count: r.count,
            },
            "out",
        )
    })
}

/// One-sample t test from published moments.
///
/// # Safety
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pct_one_sample_t(
    n: usize,
    mean: f64,
    sd: f64,
    mu0: f64,
    ci_level: f64,
    out: *mut PctMeanTest,
) -> PctStatus {
    guard(|| {
        let r = one_sample_t_at(&SummaryStats::from_moments(n, mean, sd)?, mu0, ci_level)?;
        write_out(out, mean_out(r), "out")
    })
}

/// Two-sample t test of `mean1 - mean2`; pooled variance unless `welch`.
///
/// # Safety
/// `out` is valid for writes.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn pct_two_sample_t(
    n1: usize,
    mean1: f64,
    sd1: f64,
    n2: usize,
    mean2: f64,
    sd2: f64,
    welch: bool,
    ci_level: f64,
    out: *mut PctMeanTest,
) -> PctStatus {
    guard(|| {
        let a = SummaryStats::from_moments(n1, mean1, sd1)?;
        let b = SummaryStats::from_moments(n2, mean2, sd2)?;
        let r = if welch {
            two_sample_welch_t_at(&a, &b, ci_level)?
        } else {
            two_sample_pooled_t_at(&a, &b, ci_level)?
        };
        write_out(out, mean_out(r), "out")
    })
}

/// One-sample z test of `count / n` against `p0`.
///
/// # Safety
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pct_one_sample_prop_z(
    count: u64,
    n: u64,
    p0: f64,
    ci_level: f64,
    out: *mut PctProportionTest,
) -> PctStatus {
    guard(|| {
        write_out(
            out,
            prop_out(one_sample_prop_z_at(count, n, p0, ci_level)?),
            "out",
        )
    })
}

/// Two-sample z test of `count1/n1 - count2/n2`.
///
/// # Safety
/// `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pct_two_sample_prop_z(
    count1: u64,
    n1: u64,
    count2: u64,
    n2: u64,
    ci_level: f64,
    out: *mut PctProportionTest,
) -> PctStatus {
    guard(|| {
        let r = two_sample_prop_z_at(count1, n1, count2, n2, ci_level)?;
        write_out(out, prop_out(r), "out")
    })
}

/// Percentile of each paper in one reference set, written to `out[0..n]`.
///
/// # Safety
/// `citations` and `out` are valid for `n` elements.
#[no_mangle]
pub unsafe extern "C" fn pct_percentile_ranks(
    citations: *const u64,
    n: usize,
    scheme: PctScheme,
    out: *mut f64,
) -> PctStatus {
    guard(|| {
        let cites = slice_arg(citations, n, "citations")?;
        let ranked = percentile_rank(cites, &self::scheme(scheme))?;
        if out.is_null() {
            return Err(null("out"));
        }
        for (i, r) in ranked.iter().enumerate() {
            out.add(i).write(r.percentile);
        }
        Ok(())
    })
}

/// Fractional top-x% weights of one reference set, written to
/// `weights[0..n]`; `share` receives their mean.
///
/// # Safety
/// `citations` and `weights` are valid for `n` elements; `share` is valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn pct_fractional_weights(
    citations: *const u64,
    n: usize,
    top_x: f64,
    weights: *mut f64,
    share: *mut f64,
) -> PctStatus {
    guard(|| {
        let cites = slice_arg(citations, n, "citations")?;
        let f = fractional_top_share(cites, top_x)?;
        if weights.is_null() {
            return Err(null("weights"));
        }
        write_out(share, f.share, "share")?;
        for (i, w) in f.weights.iter().enumerate() {
            weights.add(i).write(*w);
        }
        Ok(())
    })
}
