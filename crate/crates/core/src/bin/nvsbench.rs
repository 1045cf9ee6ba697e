use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _};
use clap::{Parser, Subcommand};

use nvsbench::corrupt::{CorruptionKind, MAX_SEVERITY};
use nvsbench::harness::{self, MaskSource, MetricSpec, Mode, RunManifest};

/// Corruption benchmark for full-reference image quality metrics.
#[derive(Parser)]
#[command(name = "nvsbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a deterministic synthetic corpus.
    GenCorpus {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 24)]
        count: usize,
        /// WIDTHxHEIGHT
        #[arg(long, default_value = "256x256", value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Corrupt every image into OUT/<kind>/sNN/<id>.png.
    Corrupt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma list, `all` (the 12-kind suite) or `all+extended`.
        #[arg(long, default_value = "all")]
        kinds: String,
        /// `A..B` (inclusive) or a comma list.
        #[arg(long, default_value = "1..20")]
        severities: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Score same-named images of two directories.
    Score {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// e.g. `ssim,psnr,mse,ext:"python3 provider.py"`
        #[arg(long, default_value = "ssim,psnr,mse")]
        metrics: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a JSON manifest.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        /// Defaults to the manifest's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Crop-and-rescale sweep.
    CropBench {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "0,1,2,5,10")]
        pixels: String,
        #[arg(long, default_value = "ssim,psnr,mse")]
        metrics: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Foreground / background masked corruption sweep.
    FgbgBench {
        #[arg(long = "in")]
        input: PathBuf,
        /// A mask directory or `synthetic:0.1,0.25,...`
        #[arg(long)]
        masks: String,
        #[arg(long, default_value = "splats")]
        kinds: String,
        #[arg(long, default_value = "5")]
        severities: String,
        #[arg(long, default_value = "ssim,psnr,mse")]
        metrics: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn validation(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 1,
        error: error.into(),
    }
}

impl From<nvsbench::Error> for Failure {
    fn from(e: nvsbench::Error) -> Self {
        let code = if e.is_validation() { 1 } else { 2 };
        Failure { code, error: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WIDTHxHEIGHT, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("bad dimension `{v}`"));
    Ok((parse(w)?, parse(h)?))
}

fn parse_severities(s: &str) -> anyhow::Result<Vec<u8>> {
    let out: Vec<u8> = if let Some((a, b)) = s.split_once("..") {
        let a: u8 = a.trim().parse().with_context(|| format!("bad severity range `{s}`"))?;
        let b: u8 = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .with_context(|| format!("bad severity range `{s}`"))?;
        if a > b {
            bail!("empty severity range `{s}`");
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|v| v.trim().parse::<u8>().with_context(|| format!("bad severity `{v}`")))
            .collect::<anyhow::Result<_>>()?
    };
    if let Some(bad) = out.iter().find(|&&v| v > MAX_SEVERITY) {
        bail!("severity {bad} outside 0..={MAX_SEVERITY}");
    }
    Ok(out)
}

fn parse_usize_list(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .with_context(|| format!("bad pixel count `{v}`"))
        })
        .collect()
}

/// Runs a manifest and reports; cells that failed turn the exit code to 2.
fn bench(manifest: &RunManifest, out: &Path) -> Result<(), Failure> {
    let result = harness::execute(manifest, out)?;
    let errors = result.error_count();
    println!(
        "{} records ({} errors) -> {}, {} plots",
        result.table.records.len(),
        errors,
        out.display(),
        result.plots.len()
    );
    if result.table.clamped > 0 {
        eprintln!(
            "warning: {} external scores were clamped to their declared range",
            result.table.clamped
        );
    }
    if errors > 0 {
        return Err(Failure {
            code: 2,
            error: anyhow!("{errors} cells could not be scored; see the error column of raw.csv"),
        });
    }
    Ok(())
}

fn manifest_for(input: PathBuf, mode: Mode, metrics: &str, seed: u64) -> Result<RunManifest, Failure> {
    let mut m = RunManifest::global(input, &[], []);
    m.mode = mode;
    m.metrics = MetricSpec::parse_list(metrics)?;
    m.global_seed = seed;
    Ok(m)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenCorpus { out, count, size, seed } => {
            let ids = harness::generate_test_corpus(&out, count, size.0, size.1, seed)?;
            println!("wrote {} images to {}", ids.len(), out.display());
        }
        Command::Corrupt {
            input,
            out,
            kinds,
            severities,
            seed,
        } => {
            let kinds = CorruptionKind::parse_list(&kinds)?;
            let severities = parse_severities(&severities).map_err(validation)?;
            let n = harness::corrupt_dir(&input, &out, &kinds, &severities, seed)?;
            println!("wrote {n} corrupted images to {}", out.display());
        }
        Command::Score {
            reference,
            test,
            metrics,
            out,
        } => {
            let metrics = MetricSpec::parse_list(&metrics)?;
            let rows = harness::score_dirs(&reference, &test, &metrics)?;
            harness::write_csv(&rows, &out)?;
            let errors = rows.iter().filter(|r| r.score.is_err()).count();
            println!("{} scores ({errors} errors) -> {}", rows.len(), out.display());
            if errors > 0 {
                return Err(Failure {
                    code: 2,
                    error: anyhow!("{errors} pairs could not be scored"),
                });
            }
        }
        Command::Bench { manifest, out } => {
            let m = RunManifest::load(&manifest).map_err(|e| match e {
                nvsbench::Error::Io { .. } => validation(e),
                other => other.into(),
            })?;
            let out = out
                .or_else(|| m.output_dir.clone())
                .ok_or_else(|| validation(anyhow!("no --out given and the manifest has no output_dir")))?;
            bench(&m, &out)?;
        }
        Command::CropBench {
            input,
            pixels,
            metrics,
            out,
            seed,
        } => {
            let mut m = manifest_for(input, Mode::Crop, &metrics, seed)?;
            m.crop_levels = parse_usize_list(&pixels).map_err(validation)?;
            bench(&m, &out)?;
        }
        Command::FgbgBench {
            input,
            masks,
            kinds,
            severities,
            metrics,
            out,
            seed,
        } => {
            let mut m = manifest_for(input, Mode::Fgbg, &metrics, seed)?;
            m.corruptions = CorruptionKind::parse_list(&kinds)?;
            m.severities = parse_severities(&severities).map_err(validation)?;
            m.mask_source = Some(masks.parse::<MaskSource>()?);
            bench(&m, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
