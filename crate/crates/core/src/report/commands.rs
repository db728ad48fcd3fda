//! Command implementations behind the `pct-impact` subcommands.
//!
//! Each command turns a dataset and an [`AnalysisConfig`] into a
//! [`CommandOutput`]; rendering and writing are shared.

use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::PathBuf;

use serde_json::{json, Value};

use super::chart::{render_ci_chart, ChartSeries, CiChartSpec};
use super::config::{AnalysisConfig, OutputFormat};
use super::table::{Cell, Precision, ReportTable};
use crate::data::{
    filter_years, parse_records, select_institution_sample, write_rejects, Dataset,
    InstitutionSample, PublicationRecord, Reject,
};
use crate::error::{Error, Result};
use crate::percentile::{
    institution_top_share, normalize_dataset, outlier_sensitivity, Counting, OutlierInput,
    PaperPercentiles, TopShareResult,
};
use crate::resampling::{bootstrap_statistic, mann_whitney, Samples, Statistic};
use crate::stats::{
    ci_overlap_verdict, one_sample_share_z_at, one_sample_t_at, summarize, two_sample_pooled_t_at,
    two_sample_share_z_at, two_sample_welch_t_at, MeanTestResult,
};

/// Everything a command produces before rendering.
#[derive(Debug, Clone, Default)]
pub struct CommandOutput {
    /// `(file stem, table)`
    pub tables: Vec<(String, ReportTable)>,
    /// `(file stem, chart)`
    pub charts: Vec<(String, CiChartSpec)>,
    /// Extra machine-readable results, written as `<stem>.json`.
    pub json: Vec<(String, Value)>,
    /// `(file name, contents)` written regardless of `--format`.
    pub files: Vec<(String, String)>,
    pub warnings: Vec<String>,
    pub log: Vec<String>,
}

/// A rendered output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct LoadedInput {
    pub dataset: Dataset,
    pub rejects: Vec<Reject>,
    pub rows_read: usize,
}

/// Reads and validates the configured input file, applying `last_year`.
pub fn load_input(cfg: &AnalysisConfig) -> Result<LoadedInput> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("no input file given (--input)".into()))?;
    let file = fs::File::open(path)?;
    let outcome = parse_records(BufReader::new(file), &cfg.ingest)?;
    let dataset = match cfg.last_year {
        Some(y) => filter_years(&outcome.dataset, y)?,
        None => outcome.dataset,
    };
    Ok(LoadedInput {
        dataset,
        rejects: outcome.rejects,
        rows_read: outcome.rows_read,
    })
}

/// Where per-paper percentiles come from. Supplied values are used only
/// when every record carries one; otherwise all are computed so that one
/// analysis never mixes conventions.
struct Analysis {
    dataset: Dataset,
    computed: Option<PaperPercentiles>,
    supplied: bool,
}

fn prepare(dataset: &Dataset, cfg: &AnalysisConfig, need_computed: bool) -> Result<Analysis> {
    let supplied = dataset.records().iter().all(|r| r.inv_percentile.is_some());
    let dataset = if supplied {
        dataset.clone()
    } else {
        let stripped: Vec<PublicationRecord> = dataset
            .records()
            .iter()
            .map(|r| PublicationRecord {
                inv_percentile: None,
                ..r.clone()
            })
            .collect();
        Dataset::new(stripped)?
    };
    let computed = if !supplied || need_computed {
        Some(normalize_dataset(&dataset, &cfg.scheme, cfg.top_x)?)
    } else {
        None
    };
    Ok(Analysis {
        dataset,
        computed,
        supplied,
    })
}

impl Analysis {
    fn sample(&self, institution: &str) -> Result<InstitutionSample> {
        select_institution_sample(&self.dataset, institution)
    }

    /// Percentiles of an institution's papers, in the active scheme's orientation.
    fn values(&self, sample: &InstitutionSample, cfg: &AnalysisConfig) -> Result<Vec<f64>> {
        sample
            .records
            .iter()
            .map(
                |r| match (self.supplied, r.inv_percentile, &self.computed) {
                    (true, Some(p), _) => Ok(if cfg.scheme.inverted { p } else { 100.0 - p }),
                    (_, _, Some(pp)) => pp.get(&r.id).map(|a| a.percentile).ok_or_else(|| {
                        Error::Capability(format!("no percentile for paper {:?}", r.id))
                    }),
                    _ => Err(Error::Capability(format!(
                        "no percentile for paper {:?}",
                        r.id
                    ))),
                },
            )
            .collect()
    }

    fn top_share(
        &self,
        sample: &InstitutionSample,
        cfg: &AnalysisConfig,
    ) -> Result<TopShareResult> {
        institution_top_share(sample, cfg.top_x, cfg.counting, self.computed.as_ref())
    }

    /// Per-paper top-x contributions: 0/1 under binary counting, weights
    /// under fractional counting.
    fn top_indicators(&self, sample: &InstitutionSample, cfg: &AnalysisConfig) -> Result<Vec<f64>> {
        sample
            .records
            .iter()
            .map(|r| {
                let single = InstitutionSample {
                    institution: sample.institution.clone(),
                    records: vec![r.clone()],
                    n: 1,
                };
                Ok(self.top_share(&single, cfg)?.count)
            })
            .collect()
    }
}

/// One institution's per-paper percentiles, in the scheme orientation,
/// and its PP_top x% under the configured counting.
#[derive(Debug, Clone, PartialEq)]
pub struct InstitutionIndicators {
    pub percentiles: Vec<f64>,
    pub top_share: TopShareResult,
}

/// Indicators for one institution under the same percentile source policy
/// as the commands.
pub fn institution_indicators(
    cfg: &AnalysisConfig,
    dataset: &Dataset,
    institution: &str,
) -> Result<InstitutionIndicators> {
    let analysis = prepare(dataset, cfg, cfg.counting == Counting::Fractional)?;
    let sample = analysis.sample(institution)?;
    Ok(InstitutionIndicators {
        percentiles: analysis.values(&sample, cfg)?,
        top_share: analysis.top_share(&sample, cfg)?,
    })
}

fn source_note(a: &Analysis) -> String {
    if a.supplied {
        "percentiles: supplied inv_percentile column".into()
    } else {
        "percentiles: computed from citation counts".into()
    }
}

fn all_pairs(dataset: &Dataset) -> Vec<(String, String)> {
    let inst = dataset.institutions();
    let mut v = Vec::new();
    for i in 0..inst.len() {
        for j in i + 1..inst.len() {
            v.push((inst[i].clone(), inst[j].clone()));
        }
    }
    v
}

fn pairs_or_all(cfg: &AnalysisConfig, dataset: &Dataset) -> Vec<(String, String)> {
    if cfg.pairs.is_empty() {
        all_pairs(dataset)
    } else {
        cfg.pairs.clone()
    }
}

fn pair_label(a: &str, b: &str) -> String {
    format!("{a} vs {b}")
}

fn level_pct(level: f64) -> String {
    let pct = 100.0 * level;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("{}%", pct.round())
    } else {
        format!("{pct}%")
    }
}

fn num(v: f64, p: Precision) -> Cell {
    Cell::num(v, p)
}

/// Per-paper percentile assignments as CSV.
pub fn cmd_percentiles(cfg: &AnalysisConfig, dataset: &Dataset) -> Result<CommandOutput> {
    let pp = normalize_dataset(dataset, &cfg.scheme, cfg.top_x)?;
    let mut csv =
        String::from("paper_id,reference_set,rank,percentile,tie_group_size,top_x_weight\n");
    let mut rows = Vec::with_capacity(pp.len());
    for a in pp.iter() {
        let _ = writeln!(
            csv,
            "{},{},{},{:.6},{},{:.6}",
            csv_field(&a.paper_id),
            csv_field(&a.reference_set.to_string()),
            a.rank,
            a.percentile,
            a.tied_with,
            a.top_x_weight
        );
        rows.push(serde_json::to_value(a)?);
    }
    let mut out = CommandOutput::default();
    for (key, size, tied) in &pp.set_sizes {
        out.log.push(format!(
            "reference set {key}: {size} papers, {tied} in tie groups"
        ));
    }
    out.files.push(("percentiles.csv".into(), csv));
    if cfg.wants(OutputFormat::Json) {
        out.json.push(("percentiles".into(), Value::Array(rows)));
    }
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

const SUMMARY_ROWS: [&str; 9] = [
    "Mean",
    "SD",
    "SE",
    "CI low",
    "CI high",
    "t",
    "N",
    "p",
    "Cohen's d",
];

/// Mean percentile per institution against `mu0`, with Figure 1.
pub fn cmd_summary(cfg: &AnalysisConfig, dataset: &Dataset) -> Result<CommandOutput> {
    let analysis = prepare(dataset, cfg, false)?;
    let institutions = dataset.institutions().to_vec();
    let mut out = CommandOutput::default();
    out.log.push(source_note(&analysis));
    let mut columns: Vec<Vec<Cell>> = Vec::new();
    let mut series = Vec::new();
    for inst in &institutions {
        let sample = analysis.sample(inst)?;
        let values = analysis.values(&sample, cfg)?;
        let stats = summarize(&values)?;
        match one_sample_t_at(&stats, cfg.mu0, cfg.ci_level) {
            Ok(r) => {
                columns.push(vec![
                    num(stats.mean, Precision::MOMENT),
                    num(stats.sd.unwrap_or(f64::NAN), Precision::MOMENT),
                    num(r.se, Precision::MOMENT),
                    num(r.ci_low, Precision::MOMENT),
                    num(r.ci_high, Precision::MOMENT),
                    num(r.statistic_t, Precision::MOMENT),
                    num(stats.n as f64, Precision::Count),
                    num(r.p_two_tailed, Precision::PValue),
                    num(r.effect_d, Precision::EFFECT),
                ]);
                series.push(ChartSeries {
                    label: inst.clone(),
                    point: r.estimate,
                    ci_low: r.ci_low,
                    ci_high: r.ci_high,
                });
            }
            Err(e) => {
                out.warnings.push(format!("institution {inst}: {e}"));
                let mut col = vec![Cell::num(stats.mean, Precision::MOMENT)];
                col.extend([Precision::MOMENT; 5].map(Cell::undefined));
                col.push(num(stats.n as f64, Precision::Count));
                col.push(Cell::undefined(Precision::PValue));
                col.push(Cell::undefined(Precision::EFFECT));
                columns.push(col);
            }
        }
    }
    let mut table = ReportTable::new(
        format!(
            "Mean percentile by institution, t test against {} with {} CI",
            cfg.mu0,
            level_pct(cfg.ci_level)
        ),
        institutions.clone(),
    );
    for (i, label) in SUMMARY_ROWS.iter().enumerate() {
        table.push_row(*label, columns.iter().map(|c| c[i].clone()).collect())?;
    }
    out.tables.push(("summary".into(), table));
    if !series.is_empty() {
        out.charts.push((
            "figure1".into(),
            CiChartSpec {
                title: format!(
                    "Mean percentile by institution, with {} CIs",
                    level_pct(cfg.ci_level)
                ),
                series,
                reference_line: Some(cfg.mu0),
                x_label: "Institution".into(),
                y_label: "Mean percentile".into(),
                scale: 1.0,
            },
        ));
    }
    Ok(out)
}

fn mean_cells(r: &MeanTestResult) -> Vec<Cell> {
    vec![
        num(r.estimate, Precision::MOMENT),
        num(r.pooled_sd.unwrap_or(f64::NAN), Precision::MOMENT),
        num(r.se, Precision::MOMENT),
        num(r.ci_low, Precision::MOMENT),
        num(r.ci_high, Precision::MOMENT),
        num(r.statistic_t, Precision::MOMENT),
        num(r.df, Precision::MOMENT),
        num(r.p_two_tailed, Precision::PValue),
        num(r.effect_d, Precision::EFFECT),
    ]
}

/// Pairwise differences in mean percentile, with Figure 2.
pub fn cmd_compare(cfg: &AnalysisConfig, dataset: &Dataset) -> Result<CommandOutput> {
    let analysis = prepare(dataset, cfg, false)?;
    let pairs = pairs_or_all(cfg, dataset);
    if pairs.is_empty() {
        return Err(Error::Config(
            "compare needs at least one pair (--pairs a:b)".into(),
        ));
    }
    let mut out = CommandOutput::default();
    out.log.push(source_note(&analysis));
    let mut labels: Vec<&str> = vec![
        "Difference",
        "Pooled SD",
        "SE",
        "CI low",
        "CI high",
        "t",
        "df",
        "p",
        "Cohen's d",
        "Mean CIs",
    ];
    if cfg.welch {
        labels.extend([
            "Welch SE",
            "Welch t",
            "Welch df",
            "Welch p",
            "Welch CI low",
            "Welch CI high",
        ]);
    }
    if cfg.mann_whitney {
        labels.extend(["Mann-Whitney U", "Mann-Whitney z", "Mann-Whitney p"]);
    }
    let mut columns = Vec::new();
    let mut series = Vec::new();
    for (a, b) in &pairs {
        let (sa, sb) = (analysis.sample(a)?, analysis.sample(b)?);
        let (va, vb) = (analysis.values(&sa, cfg)?, analysis.values(&sb, cfg)?);
        let (ma, mb) = (summarize(&va)?, summarize(&vb)?);
        if ma.n < 2 || mb.n < 2 {
            return Err(Error::Precondition(format!(
                "pair {a}:{b} needs n >= 2 in both groups"
            )));
        }
        let r = two_sample_pooled_t_at(&ma, &mb, cfg.ci_level)?;
        let overlap = ci_overlap_verdict(
            {
                let t = one_sample_t_at(&ma, cfg.mu0, cfg.ci_level)?;
                (t.ci_low, t.ci_high)
            },
            {
                let t = one_sample_t_at(&mb, cfg.mu0, cfg.ci_level)?;
                (t.ci_low, t.ci_high)
            },
        )?;
        let mut col = mean_cells(&r);
        col.push(Cell::text(format!("{overlap:?}").to_lowercase()));
        if cfg.welch {
            let w = two_sample_welch_t_at(&ma, &mb, cfg.ci_level)?;
            col.extend([
                num(w.se, Precision::MOMENT),
                num(w.statistic_t, Precision::MOMENT),
                num(w.df, Precision::MOMENT),
                num(w.p_two_tailed, Precision::PValue),
                num(w.ci_low, Precision::MOMENT),
                num(w.ci_high, Precision::MOMENT),
            ]);
        }
        if cfg.mann_whitney {
            let m = mann_whitney(&va, &vb)?;
            col.extend([
                num(m.u_statistic, Precision::Fixed(1)),
                num(m.z_approx, Precision::MOMENT),
                num(m.p_two_tailed, Precision::PValue),
            ]);
        }
        columns.push(col);
        series.push(ChartSeries {
            label: pair_label(a, b),
            point: r.estimate,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
        });
    }
    let mut table = ReportTable::new(
        format!(
            "Differences in mean percentile, pooled t test with {} CI",
            level_pct(cfg.ci_level)
        ),
        pairs.iter().map(|(a, b)| pair_label(a, b)).collect(),
    );
    for (i, label) in labels.iter().enumerate() {
        table.push_row(*label, columns.iter().map(|c| c[i].clone()).collect())?;
    }
    table.footnote = Some("Mean CIs: overlap of the two single-institution intervals; disjoint intervals imply p < .01.".into());
    out.tables.push(("compare".into(), table));
    out.charts.push((
        "figure2".into(),
        CiChartSpec {
            title: format!(
                "Differences in mean percentile, with {} CIs",
                level_pct(cfg.ci_level)
            ),
            series,
            reference_line: Some(0.0),
            x_label: "Pair".into(),
            y_label: "Difference in mean percentile".into(),
            scale: 1.0,
        },
    ));
    Ok(out)
}

fn top_label(cfg: &AnalysisConfig) -> String {
    format!("PP_top{}", cfg.top_x)
}

const TIMES_100: &str = "Shares, SEs and CI bounds are multiplied by 100.";

/// PP_top x% per institution against `p0`, with Figure 3.
pub fn cmd_topshare(cfg: &AnalysisConfig, dataset: &Dataset) -> Result<CommandOutput> {
    let analysis = prepare(dataset, cfg, cfg.counting == Counting::Fractional)?;
    let institutions = dataset.institutions().to_vec();
    let mut out = CommandOutput::default();
    out.log.push(source_note(&analysis));
    out.log.push(format!("counting: {}", cfg.counting));
    let mut columns = Vec::new();
    let mut series = Vec::new();
    for inst in &institutions {
        let sample = analysis.sample(inst)?;
        let share = analysis.top_share(&sample, cfg)?;
        let r = one_sample_share_z_at(share.share, share.n as u64, cfg.p0, cfg.ci_level)?;
        columns.push(vec![
            num(100.0 * r.estimate, Precision::MOMENT),
            num(100.0 * r.se, Precision::MOMENT),
            num(100.0 * r.ci_low, Precision::MOMENT),
            num(100.0 * r.ci_high, Precision::MOMENT),
            num(r.statistic_z, Precision::MOMENT),
            num(r.p_two_tailed, Precision::PValue),
            num(r.effect_h, Precision::EFFECT),
            num(share.n as f64, Precision::Count),
        ]);
        series.push(ChartSeries {
            label: inst.clone(),
            point: r.estimate,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
        });
    }
    let labels = [
        top_label(cfg),
        "SE".into(),
        "CI low".into(),
        "CI high".into(),
        "z".into(),
        "p".into(),
        "Cohen's h".into(),
        "N".into(),
    ];
    let mut table = ReportTable::new(
        format!(
            "{} by institution ({} counting), z test against {} with {} CI",
            top_label(cfg),
            cfg.counting.to_string().to_lowercase(),
            cfg.p0,
            level_pct(cfg.ci_level)
        ),
        institutions,
    );
    for (i, label) in labels.iter().enumerate() {
        table.push_row(
            label.as_str(),
            columns.iter().map(|c| c[i].clone()).collect(),
        )?;
    }
    table.footnote = Some(TIMES_100.into());
    out.tables.push(("topshare".into(), table));
    out.charts.push((
        "figure3".into(),
        CiChartSpec {
            title: format!(
                "{} by institution, with {} CIs",
                top_label(cfg),
                level_pct(cfg.ci_level)
            ),
            series,
            reference_line: Some(100.0 * cfg.p0),
            x_label: "Institution".into(),
            y_label: format!("{} (x 100)", top_label(cfg)),
            scale: 100.0,
        },
    ));
    Ok(out)
}

/// Pairwise differences in PP_top x%.
pub fn cmd_topcompare(cfg: &AnalysisConfig, dataset: &Dataset) -> Result<CommandOutput> {
    let analysis = prepare(dataset, cfg, cfg.counting == Counting::Fractional)?;
    let pairs = pairs_or_all(cfg, dataset);
    if pairs.is_empty() {
        return Err(Error::Config(
            "topcompare needs at least one pair (--pairs a:b)".into(),
        ));
    }
    let mut out = CommandOutput::default();
    out.log.push(source_note(&analysis));
    let mut columns = Vec::new();
    for (a, b) in &pairs {
        let sa = analysis.top_share(&analysis.sample(a)?, cfg)?;
        let sb = analysis.top_share(&analysis.sample(b)?, cfg)?;
        let r = two_sample_share_z_at(sa.share, sa.n as u64, sb.share, sb.n as u64, cfg.ci_level)?;
        columns.push(vec![
            num(100.0 * r.estimate, Precision::MOMENT),
            num(100.0 * r.se, Precision::MOMENT),
            num(100.0 * r.ci_low, Precision::MOMENT),
            num(100.0 * r.ci_high, Precision::MOMENT),
            num(r.statistic_z, Precision::MOMENT),
            num(r.effect_h, Precision::EFFECT),
            num(r.p_two_tailed, Precision::PValue),
        ]);
    }
    let labels = [
        "Difference",
        "SE",
        "CI low",
        "CI high",
        "z",
        "Cohen's h",
        "p",
    ];
    let mut table = ReportTable::new(
        format!(
            "Differences in {} ({} counting), pooled z test with {} CI",
            top_label(cfg),
            cfg.counting.to_string().to_lowercase(),
            level_pct(cfg.ci_level)
        ),
        pairs.iter().map(|(a, b)| pair_label(a, b)).collect(),
    );
    for (i, label) in labels.iter().enumerate() {
        table.push_row(*label, columns.iter().map(|c| c[i].clone()).collect())?;
    }
    table.footnote = Some(TIMES_100.into());
    out.tables.push(("topcompare".into(), table));
    Ok(out)
}

/// MNCS and fractional PP_top x% with and without each institution's most
/// cited paper.
pub fn cmd_robustness(cfg: &AnalysisConfig, dataset: &Dataset) -> Result<CommandOutput> {
    let pp = normalize_dataset(dataset, &cfg.scheme, cfg.top_x)?;
    let mut out = CommandOutput::default();
    let mut columns = Vec::new();
    let mut names = Vec::new();
    let mut reports = Vec::new();
    for inst in dataset.institutions() {
        let sample = select_institution_sample(dataset, inst)?;
        if sample.n < 2 {
            out.warnings.push(format!(
                "institution {inst}: skipped, needs at least two papers"
            ));
            continue;
        }
        let inputs = sample
            .records
            .iter()
            .map(|r| {
                let a = pp.get(&r.id).ok_or_else(|| {
                    Error::Capability(format!("no reference set for paper {:?}", r.id))
                })?;
                Ok(OutlierInput {
                    citations: r.citations,
                    reference_mean: pp.reference_mean(&r.id).unwrap_or(f64::NAN),
                    top_x_weight: a.top_x_weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let rep = match outlier_sensitivity(&inputs, cfg.top_x) {
            Ok(rep) => rep,
            Err(e) => {
                out.warnings
                    .push(format!("institution {inst}: skipped, {e}"));
                continue;
            }
        };
        columns.push(vec![
            num(rep.n as f64, Precision::Count),
            num(rep.max_citations as f64, Precision::Count),
            num(rep.mncs_with, Precision::MOMENT),
            num(rep.mncs_without, Precision::MOMENT),
            num(100.0 * rep.mncs_relative_delta, Precision::Fixed(1)),
            num(100.0 * rep.share_with, Precision::MOMENT),
            num(100.0 * rep.share_without, Precision::MOMENT),
            num(rep.share_delta_points, Precision::MOMENT),
        ]);
        names.push(inst.clone());
        let mut v = serde_json::to_value(&rep)?;
        v["institution"] = json!(inst);
        reports.push(v);
    }
    let top = top_label(cfg);
    let labels = [
        "N".to_string(),
        "Max citations".into(),
        "MNCS".into(),
        "MNCS without max".into(),
        "MNCS change (%)".into(),
        format!("{top} fractional"),
        format!("{top} fractional without max"),
        format!("{top} change (points)"),
    ];
    let mut table = ReportTable::new("Sensitivity to the most cited paper", names);
    for (i, label) in labels.iter().enumerate() {
        table.push_row(
            label.as_str(),
            columns.iter().map(|c| c[i].clone()).collect(),
        )?;
    }
    table.footnote = Some(format!(
        "{top} values are multiplied by 100; reference sets are unchanged."
    ));
    out.tables.push(("robustness".into(), table));
    if cfg.wants(OutputFormat::Json) {
        out.json
            .push(("robustness_detail".into(), Value::Array(reports)));
    }
    Ok(out)
}

/// Bootstrap intervals for mean percentiles and PP_top x%, per
/// institution and per pair, next to the analytic intervals.
pub fn cmd_bootstrap(cfg: &AnalysisConfig, dataset: &Dataset) -> Result<CommandOutput> {
    let analysis = prepare(dataset, cfg, cfg.counting == Counting::Fractional)?;
    let spec = cfg.bootstrap_spec();
    let pairs = pairs_or_all(cfg, dataset);
    let mut out = CommandOutput::default();
    out.log.push(source_note(&analysis));
    out.log.push(format!(
        "bootstrap: {} replicates, seed {}, {:?} intervals",
        spec.replicates, spec.seed, spec.ci_method
    ));

    let institutions = dataset.institutions().to_vec();
    let mut values = Vec::new();
    let mut indicators = Vec::new();
    for inst in &institutions {
        let s = analysis.sample(inst)?;
        values.push(analysis.values(&s, cfg)?);
        indicators.push(analysis.top_indicators(&s, cfg)?);
    }
    let idx = |label: &str| -> Result<usize> {
        institutions
            .iter()
            .position(|i| i == label)
            .ok_or_else(|| Error::UnknownInstitution {
                label: label.to_string(),
                known: institutions.clone(),
            })
    };
    let prop_stat = |two: bool| match (cfg.counting, two) {
        (Counting::Binary, false) => Statistic::Proportion,
        (Counting::Binary, true) => Statistic::PropDiff,
        (Counting::Fractional, false) => Statistic::Mean,
        (Counting::Fractional, true) => Statistic::MeanDiff,
    };

    let mut columns: Vec<String> = institutions.clone();
    columns.extend(pairs.iter().map(|(a, b)| pair_label(a, b)));
    let mut mean_cols = Vec::new();
    let mut prop_cols = Vec::new();
    let mut results = Vec::new();

    let mut record = |label: String,
                      kind: &str,
                      r: &crate::resampling::BootstrapResult,
                      analytic: (f64, f64),
                      null: f64,
                      scale: f64| {
        let cells = vec![
            Cell::text(r.statistic.to_string()),
            num(scale * r.point, Precision::MOMENT),
            num(scale * r.se_boot, Precision::MOMENT),
            num(scale * r.ci_low, Precision::MOMENT),
            num(scale * r.ci_high, Precision::MOMENT),
            num(scale * analytic.0, Precision::MOMENT),
            num(scale * analytic.1, Precision::MOMENT),
            Cell::text(if r.excludes(null) { "yes" } else { "no" }),
        ];
        let mut v = serde_json::to_value(r).unwrap_or(Value::Null);
        v["label"] = json!(label);
        v["quantity"] = json!(kind);
        v["analytic_ci_low"] = json!(analytic.0);
        v["analytic_ci_high"] = json!(analytic.1);
        v["excludes_null"] = json!(r.excludes(null));
        results.push(v);
        cells
    };

    for (k, inst) in institutions.iter().enumerate() {
        let ms = summarize(&values[k])?;
        let t = one_sample_t_at(&ms, cfg.mu0, cfg.ci_level)?;
        let b = bootstrap_statistic(Samples::One(&values[k]), Statistic::Mean, &spec)?;
        mean_cols.push(record(
            inst.clone(),
            "mean",
            &b,
            (t.ci_low, t.ci_high),
            cfg.mu0,
            1.0,
        ));

        let share = analysis.top_share(&analysis.sample(inst)?, cfg)?;
        let z = one_sample_share_z_at(share.share, share.n as u64, cfg.p0, cfg.ci_level)?;
        let b = bootstrap_statistic(Samples::One(&indicators[k]), prop_stat(false), &spec)?;
        prop_cols.push(record(
            inst.clone(),
            "top_share",
            &b,
            (z.ci_low, z.ci_high),
            cfg.p0,
            100.0,
        ));
    }
    for (a, b) in &pairs {
        let (i, j) = (idx(a)?, idx(b)?);
        let label = pair_label(a, b);
        let t = two_sample_pooled_t_at(
            &summarize(&values[i])?,
            &summarize(&values[j])?,
            cfg.ci_level,
        )?;
        let r = bootstrap_statistic(
            Samples::Two(&values[i], &values[j]),
            Statistic::MeanDiff,
            &spec,
        )?;
        mean_cols.push(record(
            label.clone(),
            "mean",
            &r,
            (t.ci_low, t.ci_high),
            0.0,
            1.0,
        ));

        let n_i = indicators[i].len() as u64;
        let n_j = indicators[j].len() as u64;
        let p_i = indicators[i].iter().sum::<f64>() / n_i as f64;
        let p_j = indicators[j].iter().sum::<f64>() / n_j as f64;
        let z = two_sample_share_z_at(p_i, n_i, p_j, n_j, cfg.ci_level)?;
        let r = bootstrap_statistic(
            Samples::Two(&indicators[i], &indicators[j]),
            prop_stat(true),
            &spec,
        )?;
        prop_cols.push(record(
            label,
            "top_share",
            &r,
            (z.ci_low, z.ci_high),
            0.0,
            100.0,
        ));
    }

    let labels = [
        "Statistic",
        "Point",
        "Bootstrap SE",
        "CI low",
        "CI high",
        "Analytic CI low",
        "Analytic CI high",
        "Excludes null",
    ];
    let method = format!("{:?}", spec.ci_method);
    let mut tm = ReportTable::new(
        format!(
            "Bootstrap of mean percentiles ({} replicates, seed {}, {method} {} CI)",
            spec.replicates,
            spec.seed,
            level_pct(spec.ci_level)
        ),
        columns.clone(),
    );
    let mut tp = ReportTable::new(
        format!(
            "Bootstrap of {} ({} counting, {} replicates, seed {}, {method} {} CI)",
            top_label(cfg),
            cfg.counting.to_string().to_lowercase(),
            spec.replicates,
            spec.seed,
            level_pct(spec.ci_level)
        ),
        columns,
    );
    for (i, label) in labels.iter().enumerate() {
        tm.push_row(*label, mean_cols.iter().map(|c| c[i].clone()).collect())?;
        tp.push_row(*label, prop_cols.iter().map(|c| c[i].clone()).collect())?;
    }
    tm.footnote = Some(format!(
        "Null value: {} for institutions, 0 for pairs.",
        cfg.mu0
    ));
    tp.footnote = Some(format!(
        "{TIMES_100} Null value: {} for institutions, 0 for pairs.",
        100.0 * cfg.p0
    ));
    out.tables.push(("bootstrap_mean".into(), tm));
    out.tables.push(("bootstrap_topshare".into(), tp));
    if cfg.wants(OutputFormat::Json) {
        out.json
            .push(("bootstrap_detail".into(), Value::Array(results)));
    }
    Ok(out)
}

/// Renders tables, charts and extra JSON according to the configured formats.
pub fn render(output: &CommandOutput, cfg: &AnalysisConfig) -> Result<Vec<Artifact>> {
    let mut arts = Vec::new();
    for (name, contents) in &output.files {
        arts.push(Artifact {
            name: name.clone(),
            contents: contents.clone(),
        });
    }
    for (stem, table) in &output.tables {
        if cfg.wants(OutputFormat::Tsv) {
            arts.push(Artifact {
                name: format!("{stem}.tsv"),
                contents: table.to_tsv(),
            });
        }
        if cfg.wants(OutputFormat::Json) {
            arts.push(Artifact {
                name: format!("{stem}.json"),
                contents: serde_json::to_string_pretty(&table.to_json())? + "\n",
            });
        }
    }
    for (stem, value) in &output.json {
        arts.push(Artifact {
            name: format!("{stem}.json"),
            contents: serde_json::to_string_pretty(value)? + "\n",
        });
    }
    if cfg.wants(OutputFormat::Svg) {
        for (stem, chart) in &output.charts {
            arts.push(Artifact {
                name: format!("{stem}.svg"),
                contents: render_ci_chart(chart)?,
            });
        }
    }
    Ok(arts)
}

/// Writes artifacts into `dir`, creating it when missing.
pub fn write_artifacts(dir: &PathBuf, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    artifacts
        .iter()
        .map(|a| {
            let p = dir.join(&a.name);
            fs::write(&p, &a.contents)?;
            Ok(p)
        })
        .collect()
}

/// Writes the ingestion rejects as `rejects.csv` into `dir`.
pub fn write_reject_file(dir: &PathBuf, rejects: &[Reject]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let p = dir.join("rejects.csv");
    write_rejects(rejects, fs::File::create(&p)?)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::paper_like_dataset;

    fn cfg() -> AnalysisConfig {
        AnalysisConfig::default()
    }

    #[test]
    fn summary_matches_published_moments() {
        let d = paper_like_dataset(1).unwrap();
        let out = cmd_summary(&cfg(), &d).unwrap();
        let t = &out.tables[0].1;
        assert_eq!(t.display("Mean", "1").unwrap(), "49.67");
        assert_eq!(t.display("SD", "2").unwrap(), "27.49");
        assert_eq!(t.display("N", "3").unwrap(), "488");
        assert_eq!(t.display("p", "2").unwrap(), "<.0001");
        let chart = &out.charts[0].1;
        assert_eq!(chart.series[0].point, t.value("Mean", "1").unwrap());
        assert_eq!(chart.series[0].ci_low, t.value("CI low", "1").unwrap());
    }

    #[test]
    fn single_paper_institution_gets_undefined_column() {
        let recs = vec![
            PublicationRecord::new("a", "A", 2001, vec!["C".into()], 3, Some(40.0)).unwrap(),
            PublicationRecord::new("b", "A", 2001, vec!["C".into()], 5, Some(20.0)).unwrap(),
            PublicationRecord::new("c", "B", 2001, vec!["C".into()], 1, Some(90.0)).unwrap(),
        ];
        let out = cmd_summary(&cfg(), &Dataset::new(recs).unwrap()).unwrap();
        let t = &out.tables[0].1;
        assert_eq!(t.display("t", "B").unwrap(), "NA");
        assert_eq!(t.display("N", "B").unwrap(), "1");
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(out.charts[0].1.series.len(), 1);
    }

    #[test]
    fn pair_with_itself_is_zero() {
        let d = paper_like_dataset(1).unwrap();
        let mut c = cfg();
        c.pairs = vec![("2".into(), "2".into())];
        let out = cmd_compare(&c, &d).unwrap();
        let t = &out.tables[0].1;
        assert_eq!(t.value("Difference", "2 vs 2"), Some(0.0));
        assert_eq!(t.value("t", "2 vs 2"), Some(0.0));
    }

    #[test]
    fn unknown_pair_member() {
        let d = paper_like_dataset(1).unwrap();
        let mut c = cfg();
        c.pairs = vec![("1".into(), "9".into())];
        assert!(matches!(
            cmd_compare(&c, &d),
            Err(Error::UnknownInstitution { .. })
        ));
    }

    #[test]
    fn topshare_counts() {
        let d = paper_like_dataset(1).unwrap();
        let out = cmd_topshare(&cfg(), &d).unwrap();
        let t = &out.tables[0].1;
        assert_eq!(t.display("PP_top10", "3").unwrap(), "11.68");
        assert_eq!(t.display("Cohen's h", "3").unwrap(), "0.054");
        assert_eq!(out.charts[0].1.reference_line, Some(10.0));
    }

    #[test]
    fn level_labels() {
        assert_eq!(level_pct(0.95), "95%");
        assert_eq!(level_pct(0.995), "99.5%");
    }
}
