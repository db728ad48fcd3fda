//! Writes the synthetic three-institution dataset as CSV.
//!
//! Usage: cargo run --example paper_like_data -- [out.csv] [seed]

use std::fs::File;
use std::io::{self, Write};

use pct_impact::data::write_records;
use pct_impact::synthetic::paper_like_dataset;

fn main() -> pct_impact::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next();
    let seed = args
        .next()
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(1);
    let dataset = paper_like_dataset(seed)?;
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    write_records(&dataset, sink)
}
