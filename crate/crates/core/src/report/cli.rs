//! Command-line parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::commands::{
    cmd_bootstrap, cmd_compare, cmd_percentiles, cmd_robustness, cmd_summary, cmd_topcompare,
    cmd_topshare, load_input, render, write_artifacts, write_reject_file,
};
use super::config::{parse_formats, parse_pairs, AnalysisConfig, Overrides};
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "pct-impact",
    version,
    about = "Percentile-based citation impact statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Per-paper percentile ranks as CSV.
    Percentiles,
    /// Mean percentile per institution against mu0.
    Summary,
    /// Pairwise differences in mean percentile.
    Compare,
    /// PP_top x% per institution against p0.
    Topshare,
    /// Pairwise differences in PP_top x%.
    Topcompare,
    /// MNCS and top share with and without the most cited paper.
    Robustness,
    /// Bootstrap intervals next to the analytic ones.
    Bootstrap,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Publication records CSV.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Percentile formula: common or incites.
    #[arg(long, global = true)]
    pub scheme: Option<String>,
    /// Rank by descending citations (lower percentile is better).
    #[arg(long, global = true)]
    pub inverted: bool,
    /// Pin zero-cited papers to the worst percentile.
    #[arg(long, global = true)]
    pub zero_adjust: bool,
    /// Null mean percentile [default: 50].
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mu0: Option<f64>,
    /// Top-x% threshold in percent [default: 10].
    #[arg(long, global = true)]
    pub top_x: Option<f64>,
    /// Null top-x share as a proportion [default: 0.10].
    #[arg(long, global = true)]
    pub p0: Option<f64>,
    /// Confidence level [default: 0.95].
    #[arg(long, global = true)]
    pub ci_level: Option<f64>,
    /// Comma-separated institution pairs a:b; order sets the sign.
    #[arg(long, global = true)]
    pub pairs: Option<String>,
    /// binary or fractional.
    #[arg(long, global = true)]
    pub counting: Option<String>,
    /// Bootstrap replicates [default: 1000].
    #[arg(long, global = true)]
    pub bootstrap_reps: Option<usize>,
    /// Bootstrap seed; overrides PCT_IMPACT_SEED and the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Bootstrap interval: normal or percentile.
    #[arg(long, global = true)]
    pub ci: Option<String>,
    /// Add Welch t rows to compare.
    #[arg(long, global = true)]
    pub welch: bool,
    /// Add Mann-Whitney rows to compare.
    #[arg(long, global = true)]
    pub mann_whitney: bool,
    /// Write outputs here instead of standard output.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Comma-separated subset of tsv,json,svg.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Drop papers published after this year.
    #[arg(long, global = true)]
    pub last_year: Option<i32>,
}

impl Options {
    pub fn overrides(&self) -> Result<Overrides> {
        Ok(Overrides {
            input: self.input.clone(),
            scheme: self.scheme.as_deref().map(str::parse).transpose()?,
            inverted: self.inverted,
            zero_adjust: self.zero_adjust,
            mu0: self.mu0,
            top_x: self.top_x,
            p0: self.p0,
            ci_level: self.ci_level,
            counting: self.counting.as_deref().map(str::parse).transpose()?,
            bootstrap_reps: self.bootstrap_reps,
            seed: self.seed,
            ci_method: self.ci.as_deref().map(str::parse).transpose()?,
            out_dir: self.out_dir.clone(),
            formats: self.format.as_deref().map(parse_formats).transpose()?,
            pairs: self.pairs.as_deref().map(parse_pairs).transpose()?,
            welch: self.welch,
            mann_whitney: self.mann_whitney,
            last_year: self.last_year,
        })
    }
}

/// Builds the effective configuration for parsed arguments.
pub fn resolve_config(opts: &Options, env_seed: Option<&str>) -> Result<AnalysisConfig> {
    let file_text =
        match &opts.config {
            Some(p) => Some(std::fs::read_to_string(p).map_err(|e| {
                Error::Config(format!("cannot read config file {}: {e}", p.display()))
            })?),
            None => None,
        };
    AnalysisConfig::resolve(env_seed, file_text.as_deref(), &opts.overrides()?)
}

fn run(
    cli: &Cli,
    env_seed: Option<&str>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let cfg = resolve_config(&cli.opts, env_seed)?;
    let input = load_input(&cfg)?;
    let _ = writeln!(
        stderr,
        "read {} rows, {} records, {} rejected",
        input.rows_read,
        input.dataset.len(),
        input.rejects.len()
    );
    for r in &input.rejects {
        let _ = writeln!(stderr, "warning: row {}: {}", r.row, r.reason);
    }
    let d = &input.dataset;
    let output = match cli.command {
        Command::Percentiles => cmd_percentiles(&cfg, d)?,
        Command::Summary => cmd_summary(&cfg, d)?,
        Command::Compare => cmd_compare(&cfg, d)?,
        Command::Topshare => cmd_topshare(&cfg, d)?,
        Command::Topcompare => cmd_topcompare(&cfg, d)?,
        Command::Robustness => cmd_robustness(&cfg, d)?,
        Command::Bootstrap => cmd_bootstrap(&cfg, d)?,
    };
    for line in &output.log {
        let _ = writeln!(stderr, "{line}");
    }
    for w in &output.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let artifacts = render(&output, &cfg)?;
    match &cfg.out_dir {
        Some(dir) => {
            if !input.rejects.is_empty() {
                write_reject_file(dir, &input.rejects)?;
            }
            for p in write_artifacts(dir, &artifacts)? {
                let _ = writeln!(stderr, "wrote {}", p.display());
            }
        }
        None => {
            for a in &artifacts {
                if artifacts.len() > 1 {
                    writeln!(stdout, "==> {} <==", a.name)?;
                }
                stdout.write_all(a.contents.as_bytes())?;
            }
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 success, 1 data error, 2 configuration error.
pub fn execute<I, T>(
    args: I,
    env_seed: Option<&str>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli, env_seed, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
