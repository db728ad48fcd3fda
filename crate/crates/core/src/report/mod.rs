//! Report tables, SVG charts, configuration and the CLI commands.

pub mod chart;
pub mod cli;
pub mod commands;
pub mod config;
pub mod table;

pub use chart::{render_ci_chart, ChartSeries, CiChartSpec};
pub use commands::{
    cmd_bootstrap, cmd_compare, cmd_percentiles, cmd_robustness, cmd_summary, cmd_topcompare,
    cmd_topshare, institution_indicators, CommandOutput, InstitutionIndicators,
};
pub use config::{AnalysisConfig, OutputFormat};
pub use table::{Cell, Precision, ReportTable};
