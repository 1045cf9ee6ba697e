//! End to end: synthesize a corpus, run a global manifest, write CSV + SVG.
//!
//!     cargo run --release --example full_benchmark -- [OUT_DIR]

use std::path::PathBuf;

use nvsbench::corrupt::CorruptionKind;
use nvsbench::harness::{execute, generate_test_corpus, RunManifest};

fn main() -> nvsbench::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| "bench_out".into());
    let corpus = out.join("corpus");
    generate_test_corpus(&corpus, 8, 128, 128, 7)?;

    let mut manifest = RunManifest::global(&corpus, &CorruptionKind::SUITE, 0..=20);
    manifest.global_seed = 7;
    let result = execute(&manifest, &out)?;

    println!(
        "{} records, {} errors\n{}\n{}\n{} plots in {}",
        result.table.records.len(),
        result.error_count(),
        result.raw_csv.display(),
        result.summary_csv.display(),
        result.plots.len(),
        out.join("plots").display()
    );
    for row in result
        .summary
        .iter()
        .filter(|r| r.metric == "ssim" && r.axis_value == 20.0)
    {
        println!(
            "{:<12} ssim@20 = {:.4}",
            row.kind,
            row.median_normalized.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
