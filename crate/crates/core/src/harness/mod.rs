//! Benchmark runs: corpus and mask synthesis, the scoring matrix, medians,
//! CSV and SVG output.

mod aggregate;
mod corpus;
mod manifest;
mod masks;
mod plot;
mod report;
mod run;

use std::path::{Path, PathBuf};

pub use aggregate::{aggregate_median, median, SummaryRow};
pub use corpus::{generate_test_corpus, synthesize_image};
pub use manifest::{scan_corpus, CorpusEntry, MaskSource, MetricSpec, Mode, Parallelism, RunManifest, PARALLELISM_ENV};
pub use masks::generate_synthetic_mask;
pub use plot::{emit_plot, render_plot};
pub use report::{format_real, write_csv, CsvRecord, RAW_HEADER, SUMMARY_HEADER};
pub use run::{
    corrupt_dir, run_benchmark, score_dirs, variants_per_image, PairScore, Region, ScoreRecord, ScoreTable, Scored,
    Variant,
};

use crate::error::Result;

/// What [`execute`] produced.
#[derive(Debug)]
pub struct RunOutput {
    pub table: ScoreTable,
    pub summary: Vec<SummaryRow>,
    pub raw_csv: PathBuf,
    pub summary_csv: PathBuf,
    pub plots: Vec<PathBuf>,
}

impl RunOutput {
    pub fn error_count(&self) -> usize {
        self.table.error_count()
    }
}

/// File name for a series label; `splats@5` becomes `splats_s5`.
pub fn plot_file_name(label: &str) -> String {
    format!("{}.svg", label.replace('@', "_s"))
}

/// Runs the manifest and writes `raw.csv`, `summary.csv` and
/// `plots/<kind>.svg` under `out_dir`.
pub fn execute(manifest: &RunManifest, out_dir: &Path) -> Result<RunOutput> {
    let table = run_benchmark(manifest)?;
    let summary = aggregate_median(&table)?;
    let raw_csv = out_dir.join("raw.csv");
    let summary_csv = out_dir.join("summary.csv");
    write_csv(&table.records, &raw_csv)?;
    write_csv(&summary, &summary_csv)?;

    let mut labels: Vec<&str> = summary.iter().map(|r| r.kind.as_str()).collect();
    labels.dedup();
    let mut plots = Vec::new();
    for label in labels {
        let path = out_dir.join("plots").join(plot_file_name(label));
        match emit_plot(&summary, label, &path) {
            Ok(()) => plots.push(path),
            Err(crate::Error::NoData(_)) => log::warn!("every cell of `{label}` failed; no plot written"),
            Err(e) => return Err(e),
        }
    }
    Ok(RunOutput {
        table,
        summary,
        raw_csv,
        summary_csv,
        plots,
    })
}

impl CsvRecord for PairScore {
    fn header() -> &'static [&'static str] {
        &["image_id", "metric", "raw", "normalized", "error"]
    }

    fn fields(&self) -> Vec<String> {
        let (raw, normalized, error) = match &self.score {
            Ok(s) => (format_real(s.raw), format_real(s.normalized), String::new()),
            Err(e) => (String::new(), String::new(), e.clone()),
        };
        vec![self.image_id.clone(), self.metric.clone(), raw, normalized, error]
    }

    fn order(&self, other: &Self) -> std::cmp::Ordering {
        self.image_id
            .cmp(&other.image_id)
            .then_with(|| self.metric.cmp(&other.metric))
    }
}
