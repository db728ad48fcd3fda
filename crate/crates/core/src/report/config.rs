//! Analysis configuration: defaults, a flat `key = value` file, the
//! `PCT_IMPACT_SEED` environment variable and command-line overrides.
//!
//! Precedence, lowest first: built-in defaults, `PCT_IMPACT_SEED` (seed
//! only), config file, command line.

use std::path::PathBuf;
use std::str::FromStr;

use crate::data::IngestConfig;
use crate::error::{Error, Result};
use crate::percentile::{Counting, Formula, PercentileScheme, TiePolicy};
use crate::resampling::{BootstrapSpec, CiMethod};

pub const SEED_ENV: &str = "PCT_IMPACT_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputFormat {
    Tsv,
    Json,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tsv" => Ok(OutputFormat::Tsv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

/// Parses `tsv,json,svg` into a sorted, de-duplicated list.
pub fn parse_formats(s: &str) -> Result<Vec<OutputFormat>> {
    let mut v = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(OutputFormat::from_str)
        .collect::<Result<Vec<_>>>()?;
    v.sort();
    v.dedup();
    if v.is_empty() {
        return Err(Error::Config("no output format selected".into()));
    }
    Ok(v)
}

/// Parses `a:b[,c:d...]`.
pub fn parse_pairs(s: &str) -> Result<Vec<(String, String)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| match p.split_once(':') {
            Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
                Ok((a.trim().to_string(), b.trim().to_string()))
            }
            _ => Err(Error::Config(format!("pair {p:?} is not of the form a:b"))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub input: Option<PathBuf>,
    pub scheme: PercentileScheme,
    pub mu0: f64,
    pub top_x: f64,
    pub p0: f64,
    pub ci_level: f64,
    pub counting: Counting,
    pub bootstrap: BootstrapSpec,
    pub out_dir: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
    pub pairs: Vec<(String, String)>,
    pub welch: bool,
    pub mann_whitney: bool,
    pub last_year: Option<i32>,
    pub ingest: IngestConfig,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            input: None,
            scheme: PercentileScheme::incites(),
            mu0: 50.0,
            top_x: 10.0,
            p0: 0.10,
            ci_level: 0.95,
            counting: Counting::Binary,
            bootstrap: BootstrapSpec::default(),
            out_dir: None,
            formats: vec![OutputFormat::Tsv],
            pairs: Vec::new(),
            welch: false,
            mann_whitney: false,
            last_year: None,
            ingest: IngestConfig::default(),
        }
    }
}

/// Values given explicitly on the command line; `None` or `false` means
/// "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub input: Option<PathBuf>,
    pub scheme: Option<Formula>,
    pub inverted: bool,
    pub zero_adjust: bool,
    pub mu0: Option<f64>,
    pub top_x: Option<f64>,
    pub p0: Option<f64>,
    pub ci_level: Option<f64>,
    pub counting: Option<Counting>,
    pub bootstrap_reps: Option<usize>,
    pub seed: Option<u64>,
    pub ci_method: Option<CiMethod>,
    pub out_dir: Option<PathBuf>,
    pub formats: Option<Vec<OutputFormat>>,
    pub pairs: Option<Vec<(String, String)>>,
    pub welch: bool,
    pub mann_whitney: bool,
    pub last_year: Option<i32>,
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("invalid value {v:?} for {key}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean {v:?} for {key}"))),
    }
}

fn preset(formula: Formula) -> PercentileScheme {
    match formula {
        Formula::Common => PercentileScheme::common(),
        Formula::Incites => PercentileScheme::incites(),
    }
}

impl AnalysisConfig {
    /// Applies a `key = value` config file. Blank lines and `#` comments are
    /// ignored; unknown keys are an error. `scheme` resets the orientation
    /// flags to the preset, so it must precede `inverted`/`zero_adjust`.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("config line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().to_ascii_lowercase().replace('-', "_");
            let v = value.trim();
            match key.as_str() {
                "input" => self.input = Some(PathBuf::from(v)),
                "scheme" => self.scheme = preset(v.parse()?),
                "inverted" => self.scheme.inverted = parse_bool(&key, v)?,
                "zero_adjust" => self.scheme.zero_rank_adjust = parse_bool(&key, v)?,
                "ties" => {
                    self.scheme.ties = match v.to_ascii_lowercase().as_str() {
                        "max" => TiePolicy::Max,
                        "min" => TiePolicy::Min,
                        _ => return Err(Error::Config(format!("invalid tie policy {v:?}"))),
                    }
                }
                "mu0" => self.mu0 = parse_value(&key, v)?,
                "top_x" => self.top_x = parse_value(&key, v)?,
                "p0" => self.p0 = parse_value(&key, v)?,
                "ci_level" => self.ci_level = parse_value(&key, v)?,
                "counting" => self.counting = v.parse()?,
                "bootstrap_reps" => self.bootstrap.replicates = parse_value(&key, v)?,
                "seed" => self.bootstrap.seed = parse_value(&key, v)?,
                "ci" => self.bootstrap.ci_method = v.parse()?,
                "out_dir" => self.out_dir = Some(PathBuf::from(v)),
                "format" => self.formats = parse_formats(v)?,
                "pairs" => self.pairs = parse_pairs(v)?,
                "welch" => self.welch = parse_bool(&key, v)?,
                "mann_whitney" => self.mann_whitney = parse_bool(&key, v)?,
                "last_year" => self.last_year = Some(parse_value(&key, v)?),
                "reject_threshold" => self.ingest.reject_threshold = parse_value(&key, v)?,
                _ => return Err(Error::Config(format!("unknown config key {key:?}"))),
            }
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        if let Some(p) = &o.input {
            self.input = Some(p.clone());
        }
        if let Some(f) = o.scheme {
            self.scheme = preset(f);
        }
        if o.inverted {
            self.scheme.inverted = true;
        }
        if o.zero_adjust {
            self.scheme.zero_rank_adjust = true;
        }
        let reals = [
            (&mut self.mu0, o.mu0),
            (&mut self.top_x, o.top_x),
            (&mut self.p0, o.p0),
            (&mut self.ci_level, o.ci_level),
        ];
        for (slot, v) in reals {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if let Some(c) = o.counting {
            self.counting = c;
        }
        if let Some(r) = o.bootstrap_reps {
            self.bootstrap.replicates = r;
        }
        if let Some(s) = o.seed {
            self.bootstrap.seed = s;
        }
        if let Some(m) = o.ci_method {
            self.bootstrap.ci_method = m;
        }
        if let Some(d) = &o.out_dir {
            self.out_dir = Some(d.clone());
        }
        if let Some(f) = &o.formats {
            self.formats = f.clone();
        }
        if let Some(p) = &o.pairs {
            self.pairs = p.clone();
        }
        self.welch |= o.welch;
        self.mann_whitney |= o.mann_whitney;
        if let Some(y) = o.last_year {
            self.last_year = Some(y);
        }
    }

    /// Defaults, then `env_seed`, then `file_text`, then `overrides`.
    pub fn resolve(
        env_seed: Option<&str>,
        file_text: Option<&str>,
        overrides: &Overrides,
    ) -> Result<Self> {
        let mut cfg = AnalysisConfig::default();
        if let Some(s) = env_seed {
            cfg.bootstrap.seed = parse_value(SEED_ENV, s.trim())?;
        }
        if let Some(text) = file_text {
            cfg.apply_file(text)?;
        }
        cfg.apply_overrides(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: String| if ok { Ok(()) } else { Err(Error::Config(what)) };
        check(
            (0.0..=100.0).contains(&self.mu0),
            format!("mu0 {} outside [0, 100]", self.mu0),
        )?;
        check(
            self.top_x > 0.0 && self.top_x < 100.0,
            format!("top-x {} outside (0, 100)", self.top_x),
        )?;
        check(
            self.p0 > 0.0 && self.p0 < 1.0,
            format!("p0 {} outside (0, 1)", self.p0),
        )?;
        check(
            self.ci_level > 0.0 && self.ci_level < 1.0,
            format!("ci-level {} outside (0, 1)", self.ci_level),
        )?;
        check(
            self.bootstrap.replicates >= 1,
            "bootstrap replicates must be >= 1".into(),
        )?;
        check(
            (0.0..=1.0).contains(&self.ingest.reject_threshold),
            format!(
                "reject threshold {} outside [0, 1]",
                self.ingest.reject_threshold
            ),
        )?;
        check(!self.formats.is_empty(), "no output format selected".into())
    }

    /// The bootstrap spec with the configured confidence level.
    pub fn bootstrap_spec(&self) -> BootstrapSpec {
        BootstrapSpec {
            ci_level: self.ci_level,
            ..self.bootstrap
        }
    }

    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}
