//! Measure-by-column report tables with TSV and JSON renderings.

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// How a numeric cell is displayed. JSON always carries full precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Fixed number of decimals.
    Fixed(usize),
    /// p-values: 4 decimals, `<.0001` below the display resolution.
    PValue,
    /// Whole numbers such as N.
    Count,
}

impl Precision {
    /// Means, SDs, SEs and CI bounds.
    pub const MOMENT: Precision = Precision::Fixed(2);
    /// Cohen's d and h.
    pub const EFFECT: Precision = Precision::Fixed(3);

    pub fn decimals(&self) -> usize {
        match self {
            Precision::Fixed(d) => *d,
            Precision::PValue => 4,
            Precision::Count => 0,
        }
    }

    pub fn format(&self, value: f64) -> String {
        match self {
            Precision::PValue if value < 5e-5 => "<.0001".to_string(),
            _ => format!("{:.*}", self.decimals(), value),
        }
    }
}

pub const UNDEFINED: &str = "NA";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number {
        value: Option<f64>,
        precision: Precision,
    },
    Text(String),
}

impl Cell {
    pub fn num(value: f64, precision: Precision) -> Self {
        Cell::Number {
            value: value.is_finite().then_some(value),
            precision,
        }
    }

    pub fn undefined(precision: Precision) -> Self {
        Cell::Number {
            value: None,
            precision,
        }
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Number { value, .. } => *value,
            Cell::Text(_) => None,
        }
    }

    pub fn display(&self) -> String {
        match self {
            Cell::Number {
                value: Some(v),
                precision,
            } => precision.format(*v),
            Cell::Number { value: None, .. } => UNDEFINED.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Number { value: Some(v), .. } => json!(v),
            Cell::Number { value: None, .. } => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub label: String,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub footnote: Option<String>,
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

impl ReportTable {
    pub fn new(title: impl Into<String>, columns: Vec<String>) -> Self {
        Self {
            title: title.into(),
            columns,
            rows: Vec::new(),
            footnote: None,
        }
    }

    pub fn push_row(&mut self, label: impl Into<String>, cells: Vec<Cell>) -> Result<()> {
        let label = label.into();
        if cells.len() != self.columns.len() {
            return Err(Error::Parameter(format!(
                "row {label:?} has {} cells for {} columns",
                cells.len(),
                self.columns.len()
            )));
        }
        self.rows.push(ReportRow { label, cells });
        Ok(())
    }

    pub fn row(&self, label: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Full-precision value at (`row`, `column`).
    pub fn value(&self, row: &str, column: &str) -> Option<f64> {
        let c = self.columns.iter().position(|c| c == column)?;
        self.row(row)?.cells[c].value()
    }

    /// Displayed text at (`row`, `column`).
    pub fn display(&self, row: &str, column: &str) -> Option<String> {
        let c = self.columns.iter().position(|c| c == column)?;
        Some(self.row(row)?.cells[c].display())
    }

    /// Title and footnote become `#` comment lines around a header row.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# {}\n", clean(&self.title));
        out.push_str("measure");
        for c in &self.columns {
            out.push('\t');
            out.push_str(&clean(c));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&clean(&row.label));
            for cell in &row.cells {
                out.push('\t');
                out.push_str(&clean(&cell.display()));
            }
            out.push('\n');
        }
        if let Some(f) = &self.footnote {
            out.push_str(&format!("# {}\n", clean(f)));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let decimals: Vec<Value> = r
                    .cells
                    .iter()
                    .map(|c| match c {
                        Cell::Number { precision, .. } => json!(precision.decimals()),
                        Cell::Text(_) => Value::Null,
                    })
                    .collect();
                json!({
                    "label": r.label,
                    "values": r.cells.iter().map(Cell::to_json).collect::<Vec<_>>(),
                    "decimals": decimals,
                })
            })
            .collect();
        json!({
            "title": self.title,
            "columns": self.columns,
            "rows": rows,
            "footnote": self.footnote,
        })
    }
}
