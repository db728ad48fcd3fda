//! Publication records, reference sets and institution samples.
//!
//! Input is a CSV file with the header
//! `id,institution,pub_year,category,citations[,inv_percentile]`.
//! A paper filed under several subject categories may either repeat its row
//! once per category (sharing `id`) or list the categories in one cell
//! separated by `|`. Rows that violate a record invariant are collected into
//! a rejects report instead of aborting the run.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};

pub const REQUIRED_COLUMNS: [&str; 5] = ["id", "institution", "pub_year", "category", "citations"];
pub const PERCENTILE_COLUMN: &str = "inv_percentile";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PublicationRecord {
    pub id: String,
    pub institution: String,
    pub pub_year: i32,
    pub categories: Vec<String>,
    pub citations: u64,
    /// Pre-supplied inverted percentile (InCites convention: lower is better).
    pub inv_percentile: Option<f64>,
}

impl PublicationRecord {
    pub fn new(
        id: impl Into<String>,
        institution: impl Into<String>,
        pub_year: i32,
        categories: Vec<String>,
        citations: u64,
        inv_percentile: Option<f64>,
    ) -> Result<Self> {
        if categories.is_empty() {
            return Err(Error::Precondition(
                "a record needs at least one category".into(),
            ));
        }
        if let Some(p) = inv_percentile {
            check_percentile(p)?;
        }
        Ok(Self {
            id: id.into(),
            institution: institution.into(),
            pub_year,
            categories,
            citations,
            inv_percentile,
        })
    }

    pub fn in_reference_set(&self, key: &ReferenceSetKey) -> bool {
        self.pub_year == key.pub_year && self.categories.contains(&key.category)
    }
}

fn check_percentile(p: f64) -> Result<()> {
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::Parameter(format!("percentile {p} outside [0, 100]")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ReferenceSetKey {
    pub category: String,
    pub pub_year: i32,
}

impl ReferenceSetKey {
    pub fn new(category: impl Into<String>, pub_year: i32) -> Self {
        Self {
            category: category.into(),
            pub_year,
        }
    }
}

impl fmt::Display for ReferenceSetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.category, self.pub_year)
    }
}

/// All papers sharing a subject category and publication year.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSet {
    pub key: ReferenceSetKey,
    pub members: Vec<PublicationRecord>,
}

impl ReferenceSet {
    pub fn citations(&self) -> Vec<u64> {
        self.members.iter().map(|r| r.citations).collect()
    }

    pub fn mean_citations(&self) -> f64 {
        self.members.iter().map(|r| r.citations as f64).sum::<f64>() / self.members.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstitutionSample {
    pub institution: String,
    pub records: Vec<PublicationRecord>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<PublicationRecord>,
    institutions: Vec<String>,
    year_range: (i32, i32),
}

impl Dataset {
    pub fn new(records: Vec<PublicationRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyDataset("ingestion".into()));
        }
        let mut institutions: Vec<String> = records.iter().map(|r| r.institution.clone()).collect();
        institutions.sort_by(|a, b| label_order(a, b));
        institutions.dedup();
        let lo = records.iter().map(|r| r.pub_year).min().unwrap_or_default();
        let hi = records.iter().map(|r| r.pub_year).max().unwrap_or_default();
        Ok(Self {
            records,
            institutions,
            year_range: (lo, hi),
        })
    }

    pub fn records(&self) -> &[PublicationRecord] {
        &self.records
    }

    /// Distinct institution labels, numeric labels in numeric order.
    pub fn institutions(&self) -> &[String] {
        &self.institutions
    }

    pub fn year_range(&self) -> (i32, i32) {
        self.year_range
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Orders institution labels so that "2" sorts before "10".
pub fn label_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        _ => a.cmp(b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestConfig {
    /// Fraction of rejected rows above which parsing fails.
    pub reject_threshold: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            reject_threshold: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reject {
    /// Line number in the source file (the header is line 1).
    pub row: u64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub dataset: Dataset,
    pub rejects: Vec<Reject>,
    pub rows_read: usize,
}

struct Columns {
    id: usize,
    institution: usize,
    pub_year: usize,
    category: usize,
    citations: usize,
    percentile: Option<usize>,
}

impl Columns {
    fn locate(headers: &csv::StringRecord) -> Result<Self> {
        let find = |name: &str| {
            headers.iter().position(|h| {
                h.trim()
                    .trim_start_matches('\u{feff}')
                    .eq_ignore_ascii_case(name)
            })
        };
        let mut idx = [0usize; 5];
        for (slot, name) in idx.iter_mut().zip(REQUIRED_COLUMNS) {
            *slot = find(name)
                .ok_or_else(|| Error::Config(format!("missing required column `{name}`")))?;
        }
        Ok(Self {
            id: idx[0],
            institution: idx[1],
            pub_year: idx[2],
            category: idx[3],
            citations: idx[4],
            percentile: find(PERCENTILE_COLUMN),
        })
    }
}

fn parse_row(
    row: &csv::StringRecord,
    cols: &Columns,
) -> std::result::Result<PublicationRecord, String> {
    let field = |i: usize| row.get(i).map(str::trim).unwrap_or("");
    let id = field(cols.id);
    if id.is_empty() {
        return Err("empty id".into());
    }
    let institution = field(cols.institution);
    if institution.is_empty() {
        return Err("empty institution".into());
    }
    let pub_year: i32 = field(cols.pub_year)
        .parse()
        .map_err(|_| format!("pub_year {:?} is not an integer", field(cols.pub_year)))?;
    let citations: u64 = {
        let raw = field(cols.citations);
        match raw.parse::<i64>() {
            Ok(c) if c < 0 => return Err(format!("negative citations {c}")),
            Ok(c) => c as u64,
            Err(_) => return Err(format!("citations {raw:?} is not a non-negative integer")),
        }
    };
    let categories: Vec<String> = field(cols.category)
        .split('|')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(String::from)
        .collect();
    if categories.is_empty() {
        return Err("no category".into());
    }
    let inv_percentile = match cols.percentile.map(field) {
        None | Some("") => None,
        Some(raw) => {
            let p: f64 = raw
                .parse()
                .map_err(|_| format!("inv_percentile {raw:?} is not a number"))?;
            if !(0.0..=100.0).contains(&p) {
                return Err(format!("inv_percentile {p} outside [0, 100]"));
            }
            Some(p)
        }
    };
    Ok(PublicationRecord {
        id: id.to_string(),
        institution: institution.to_string(),
        pub_year,
        categories,
        citations,
        inv_percentile,
    })
}

/// Merges a repeated-id row into the record seen first.
fn merge_into(
    existing: &mut PublicationRecord,
    row: PublicationRecord,
) -> std::result::Result<(), String> {
    if existing.institution != row.institution
        || existing.pub_year != row.pub_year
        || existing.citations != row.citations
    {
        return Err(format!(
            "id {:?} repeats with conflicting institution, year or citations",
            row.id
        ));
    }
    for c in row.categories {
        if !existing.categories.contains(&c) {
            existing.categories.push(c);
        }
    }
    existing.inv_percentile = match (existing.inv_percentile, row.inv_percentile) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    Ok(())
}

/// Parses the record CSV contract into a [`Dataset`].
pub fn parse_records<R: Read>(source: R, config: &IngestConfig) -> Result<ParseOutcome> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let cols = Columns::locate(reader.headers()?)?;

    let mut records: Vec<PublicationRecord> = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    let mut rejects = Vec::new();
    let mut rows_read = 0usize;

    for (i, row) in reader.records().enumerate() {
        rows_read += 1;
        let line = i as u64 + 2;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                rejects.push(Reject {
                    row: line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(line);
        let outcome = parse_row(&row, &cols).and_then(|rec| match by_id.get(&rec.id) {
            Some(&at) => merge_into(&mut records[at], rec),
            None => {
                by_id.insert(rec.id.clone(), records.len());
                records.push(rec);
                Ok(())
            }
        });
        if let Err(reason) = outcome {
            rejects.push(Reject { row: line, reason });
        }
    }

    if rows_read > 0 && rejects.len() as f64 > config.reject_threshold * rows_read as f64 {
        return Err(Error::TooManyRejects {
            rejected: rejects.len(),
            total: rows_read,
            threshold: config.reject_threshold * 100.0,
        });
    }
    Ok(ParseOutcome {
        dataset: Dataset::new(records)?,
        rejects,
        rows_read,
    })
}

/// Writes records in canonical column order, categories joined by `|`.
pub fn write_records<W: Write>(dataset: &Dataset, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([
        "id",
        "institution",
        "pub_year",
        "category",
        "citations",
        PERCENTILE_COLUMN,
    ])?;
    for r in dataset.records() {
        w.write_record([
            r.id.clone(),
            r.institution.clone(),
            r.pub_year.to_string(),
            r.categories.join("|"),
            r.citations.to_string(),
            r.inv_percentile.map(|p| p.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rejects<W: Write>(rejects: &[Reject], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["row", "reason"])?;
    for r in rejects {
        w.write_record([r.row.to_string(), r.reason.clone()])?;
    }
    w.flush()?;
    Ok(())
}

/// Keeps records published in or before `last_year`.
pub fn filter_years(dataset: &Dataset, last_year: i32) -> Result<Dataset> {
    let kept: Vec<_> = dataset
        .records()
        .iter()
        .filter(|r| r.pub_year <= last_year)
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyDataset(format!("keeping years <= {last_year}")));
    }
    Dataset::new(kept)
}

/// Groups records by (category, year). A record with k categories lands in
/// k reference sets, with full membership in each.
pub fn group_reference_sets(dataset: &Dataset) -> Vec<ReferenceSet> {
    let mut sets: BTreeMap<ReferenceSetKey, Vec<PublicationRecord>> = BTreeMap::new();
    for r in dataset.records() {
        for c in &r.categories {
            sets.entry(ReferenceSetKey::new(c.clone(), r.pub_year))
                .or_default()
                .push(r.clone());
        }
    }
    sets.into_iter()
        .map(|(key, members)| ReferenceSet { key, members })
        .collect()
}

/// The percentile of the category in which a paper performs best, i.e. the
/// lowest inverted percentile.
pub fn best_category_percentile<S>(per_category: &[(S, f64)]) -> Result<f64> {
    if per_category.is_empty() {
        return Err(Error::Precondition("no category percentiles given".into()));
    }
    let mut best = f64::INFINITY;
    for (_, p) in per_category {
        check_percentile(*p)?;
        best = best.min(*p);
    }
    Ok(best)
}

pub fn select_institution_sample(
    dataset: &Dataset,
    institution: &str,
) -> Result<InstitutionSample> {
    let records: Vec<_> = dataset
        .records()
        .iter()
        .filter(|r| r.institution == institution)
        .cloned()
        .collect();
    if records.is_empty() {
        return Err(Error::UnknownInstitution {
            label: institution.to_string(),
            known: dataset.institutions().to_vec(),
        });
    }
    Ok(InstitutionSample {
        institution: institution.to_string(),
        n: records.len(),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "id,institution,pub_year,category,citations,inv_percentile\n";

    fn parse(body: &str) -> Result<ParseOutcome> {
        parse_records(
            format!("{HEADER}{body}").as_bytes(),
            &IngestConfig::default(),
        )
    }

    fn rec(id: &str, inst: &str, year: i32, cats: &[&str], cites: u64) -> PublicationRecord {
        PublicationRecord::new(
            id,
            inst,
            year,
            cats.iter().map(|c| c.to_string()).collect(),
            cites,
            None,
        )
        .unwrap()
    }

    #[test]
    fn minimal_row() {
        let out = parse("p1,inst1,2001,PHYS_CM,12,\n").unwrap();
        assert_eq!(out.dataset.len(), 1);
        let r = &out.dataset.records()[0];
        assert_eq!(r.citations, 12);
        assert_eq!(r.inv_percentile, None);
        assert_eq!(r.categories, vec!["PHYS_CM"]);
        assert!(out.rejects.is_empty());
    }

    #[test]
    fn negative_citations_rejected() {
        let mut body = String::new();
        for i in 0..10 {
            body.push_str(&format!("p{i},a,2001,X,{i},\n"));
        }
        body.push_str("bad,a,2001,X,-3,\n");
        let out = parse(&body).unwrap();
        assert_eq!(out.rejects.len(), 1);
        assert_eq!(out.rejects[0].row, 12);
        assert!(out.rejects[0].reason.contains("negative"));
        assert_eq!(out.dataset.len(), 10);
    }

    #[test]
    fn too_many_rejects_abort() {
        let err = parse("p1,a,2001,X,1,\np2,a,2001,X,-1,\n").unwrap_err();
        assert!(matches!(
            err,
            Error::TooManyRejects {
                rejected: 1,
                total: 2,
                ..
            }
        ));
        let lenient = IngestConfig {
            reject_threshold: 0.6,
        };
        let out = parse_records(
            format!("{HEADER}p1,a,2001,X,1,\np2,a,2001,X,-1,\n").as_bytes(),
            &lenient,
        )
        .unwrap();
        assert_eq!(out.rejects.len(), 1);
    }

    #[test]
    fn out_of_range_percentile_rejected() {
        let mut body: String = (0..20).map(|i| format!("p{i},a,2001,X,1,50\n")).collect();
        body.push_str("q,a,2001,X,1,100.5\n");
        let out = parse(&body).unwrap();
        assert_eq!(out.rejects.len(), 1);
        assert!(out.rejects[0].reason.contains("outside"));
    }

    #[test]
    fn missing_column_is_config_error() {
        let err = parse_records(
            "id,institution,pub_year,citations\np,a,2001,3\n".as_bytes(),
            &IngestConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("category")));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn percentile_column_is_optional_and_columns_reorder() {
        let src = "citations,category,pub_year,institution,id\n4,A|B,2002,x,p\n";
        let out = parse_records(src.as_bytes(), &IngestConfig::default()).unwrap();
        let r = &out.dataset.records()[0];
        assert_eq!(r.categories, vec!["A", "B"]);
        assert_eq!(r.pub_year, 2002);
    }

    #[test]
    fn repeated_rows_merge_categories_and_keep_best_percentile() {
        let out = parse("p,a,2001,A,5,40\np,a,2001,B,5,25\n").unwrap();
        assert_eq!(out.dataset.len(), 1);
        let r = &out.dataset.records()[0];
        assert_eq!(r.categories, vec!["A", "B"]);
        assert_eq!(r.inv_percentile, Some(25.0));
    }

    #[test]
    fn conflicting_repeat_is_rejected() {
        let mut body: String = (0..20).map(|i| format!("p{i},a,2001,X,1,\n")).collect();
        body.push_str("p0,a,2001,Y,2,\n");
        let out = parse(&body).unwrap();
        assert_eq!(out.rejects.len(), 1);
        assert_eq!(out.dataset.records()[0].categories, vec!["X"]);
    }

    #[test]
    fn filter_years_cases() {
        let d = Dataset::new(vec![
            rec("a", "1", 2001, &["X"], 1),
            rec("b", "1", 2002, &["X"], 1),
            rec("c", "1", 2003, &["X"], 1),
        ])
        .unwrap();
        let f = filter_years(&d, 2002).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.records().iter().all(|r| r.pub_year <= 2002));
        assert_eq!(f.year_range(), (2001, 2002));
        assert!(matches!(
            filter_years(&d, 2000),
            Err(Error::EmptyDataset(_))
        ));
        assert_eq!(filter_years(&d, 2010).unwrap(), d);
    }

    #[test]
    fn grouping_single_set() {
        let d = Dataset::new(vec![
            rec("a", "1", 2001, &["X"], 1),
            rec("b", "2", 2001, &["X"], 2),
            rec("c", "1", 2001, &["X"], 3),
        ])
        .unwrap();
        let sets = group_reference_sets(&d);
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].members.len(), 3);
    }

    #[test]
    fn multi_category_record_joins_each_set() {
        let d = Dataset::new(vec![rec("a", "1", 2001, &["X", "Y"], 1)]).unwrap();
        let sets = group_reference_sets(&d);
        let keys: Vec<String> = sets.iter().map(|s| s.key.to_string()).collect();
        assert_eq!(keys, vec!["X:2001", "Y:2001"]);
        assert!(sets.iter().all(|s| s.members[0].id == "a"));
    }

    #[test]
    fn best_category() {
        assert_eq!(
            best_category_percentile(&[("A", 40.0), ("B", 25.0)]).unwrap(),
            25.0
        );
        assert_eq!(best_category_percentile(&[("A", 10.0)]).unwrap(), 10.0);
        assert!(best_category_percentile::<&str>(&[]).is_err());
        assert!(best_category_percentile(&[("A", 101.0)]).is_err());
    }

    #[test]
    fn institution_lookup() {
        let d = Dataset::new(vec![
            rec("a", "1", 2001, &["X"], 1),
            rec("b", "2", 2001, &["X"], 1),
        ])
        .unwrap();
        assert_eq!(select_institution_sample(&d, "2").unwrap().n, 1);
        match select_institution_sample(&d, "9") {
            Err(Error::UnknownInstitution { known, .. }) => assert_eq!(known, vec!["1", "2"]),
            other => panic!("expected lookup error, got {other:?}"),
        }
    }

    #[test]
    fn labels_sort_numerically() {
        let d = Dataset::new(vec![
            rec("a", "10", 2001, &["X"], 1),
            rec("b", "2", 2001, &["X"], 1),
            rec("c", "B", 2001, &["X"], 1),
            rec("d", "A", 2001, &["X"], 1),
        ])
        .unwrap();
        assert_eq!(d.institutions(), ["2", "10", "A", "B"]);
    }
}
