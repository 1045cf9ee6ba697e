//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use nvsbench::corrupt::{schedule, CorruptionKind};
use nvsbench::harness::{
    aggregate_median, generate_test_corpus, run_benchmark, synthesize_image, MaskSource, MetricSpec, Mode, Region,
    RunManifest, SummaryRow,
};
use nvsbench::image::load_image;
use nvsbench::metrics::{normalize, provider_open, psnr, ssim, BuiltinMetric};
use nvsbench::{Error, Image};

use common::{bin, fixture, mock, oracles};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Median per (kind label, axis value, region, metric) read back from summary.csv.
#[derive(Default)]
struct Summary(HashMap<(String, String, Option<String>, String), f64>);

impl Summary {
    fn read(path: &Path) -> Self {
        let mut out = Summary::default();
        let mut rdr = csv::Reader::from_path(path).unwrap();
        for rec in rdr.records() {
            let rec = rec.unwrap();
            let region = (!rec[3].is_empty()).then(|| rec[3].to_owned());
            if let Ok(m) = rec[5].parse::<f64>() {
                out.0
                    .insert((rec[0].to_owned(), rec[2].to_owned(), region, rec[4].to_owned()), m);
            }
        }
        out
    }

    fn get(&self, kind: &str, axis: &str, metric: &str) -> f64 {
        self.0[&(kind.to_owned(), axis.to_owned(), None, metric.to_owned())]
    }
}

fn from_rows(rows: &[SummaryRow]) -> HashMap<(Option<Region>, u64, String), f64> {
    rows.iter()
        .filter_map(|r| {
            r.median_normalized
                .map(|m| ((r.region, r.axis_value.to_bits(), r.metric.clone()), m))
        })
        .collect()
}

fn suite_manifest(corpus: &Path, severities: impl IntoIterator<Item = u8>) -> serde_json::Value {
    serde_json::json!({
        "corpus_dir": corpus,
        "corruptions": CorruptionKind::SUITE.iter().map(|k| k.name()).collect::<Vec<_>>(),
        "severities": severities.into_iter().collect::<Vec<_>>(),
        "metrics": ["ssim", "psnr", "mse"],
        "mode": "global",
        "global_seed": 7,
    })
}

fn bench(manifest: &Path, out: &Path, workers: &str) -> (i32, Duration) {
    let start = Instant::now();
    let status = Command::new(bin())
        .args([
            "bench",
            "--manifest",
            manifest.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .env("NVSBENCH_PARALLELISM", workers)
        .env("RUST_LOG", "off")
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .unwrap();
    (status.code().unwrap_or(-1), start.elapsed())
}

struct Ctx {
    root: tempfile::TempDir,
    corpus: std::path::PathBuf,
    run1: std::path::PathBuf,
    run1_time: Duration,
    run1_code: i32,
    zero: Summary,
}

fn criterion_1(ctx: &Ctx) -> Outcome {
    let raw = ctx.run1.join("raw.csv");
    let mut rdr = csv::Reader::from_path(&raw).map_err(|e| e.to_string())?;
    let mut records = 0usize;
    let mut errors = 0usize;
    let mut variants = BTreeSet::new();
    let mut metrics = BTreeSet::new();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        records += 1;
        errors += usize::from(!rec[9].is_empty());
        variants.insert((rec[0].to_owned(), rec[1].to_owned(), rec[2].to_owned()));
        metrics.insert(rec[6].to_owned());
    }
    check(
        ctx.run1_code == 0
            && variants.len() == 5_760
            && records == 17_280
            && errors == 0
            && metrics.len() == 3
            && ctx.run1_time < Duration::from_secs(600),
        format!(
            "{} variants, {records} records, {errors} errors, exit {}, {:.1}s on {} core(s)",
            variants.len(),
            ctx.run1_code,
            ctx.run1_time.as_secs_f64(),
            std::thread::available_parallelism().map_or(1, |n| n.get())
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst_psnr = 0.0f64;
    let mut worst_ssim = 0.0f64;
    for seed in 0..50u64 {
        let mut rng = SplitMix64::seed_from_u64(0xACCE_0000 + seed);
        let w = rng.gen_range(32..=128);
        let h = rng.gen_range(32..=128);
        let a = synthesize_image(w, h, seed);
        let amp = rng.gen_range(1..80i32);
        let b = a.map_channels(|c| (c as i32 + rng.gen_range(-amp..=amp)).clamp(0, 255) as u8);
        worst_psnr = worst_psnr.max((psnr(&a, &b).unwrap().value - oracles::psnr(&a, &b)).abs());
        worst_ssim = worst_ssim.max((ssim(&a, &b).unwrap().value - oracles::ssim(&a, &b)).abs());
    }
    check(
        worst_psnr <= 1e-9 && worst_ssim <= 1e-6,
        format!("max |psnr - oracle| = {worst_psnr:.2e}, max |ssim - oracle| = {worst_ssim:.2e} over 50 pairs"),
    )
}

fn criterion_3(ctx: &Ctx) -> Outcome {
    let mut pairs = 0;
    for entry in fs::read_dir(&ctx.corpus).unwrap() {
        let img: Image = load_image(entry.unwrap().path()).unwrap();
        for m in BuiltinMetric::ALL {
            let v = normalize(&m.score(&img, &img).unwrap()).value();
            if v != 1.0 {
                return Err(format!("{m} on identical pair gave {v}"));
            }
            pairs += 1;
        }
    }
    let bad: Vec<_> = ctx.zero.0.iter().filter(|(_, v)| **v != 1.0).collect();
    check(
        bad.is_empty() && ctx.zero.0.len() == 12 * 3,
        format!(
            "{pairs} identity scores = 1.0; {} severity-0 medians, non-1.0: {bad:?}",
            ctx.zero.0.len()
        ),
    )
}

fn series(s: &Summary, zero: &Summary, kind: &str, metric: &str) -> Vec<f64> {
    std::iter::once(zero.get(kind, "0", metric))
        .chain((1..=20).map(|sev| s.get(kind, &sev.to_string(), metric)))
        .collect()
}

fn criterion_4(ctx: &Ctx) -> Outcome {
    let s = Summary::read(&ctx.run1.join("summary.csv"));
    let mut notes = Vec::new();
    let mut ok = true;
    for metric in ["ssim", "psnr"] {
        let v = series(&s, &ctx.zero, "blur", metric);
        let ordered = v[20] < v[2] && v[2] < v[0];
        let worst_rise = v[1..].windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        ok &= ordered && worst_rise <= 0.02;
        notes.push(format!(
            "{metric}: s0 {:.4} s2 {:.4} s20 {:.4}, largest rise over 1..20 {worst_rise:+.4}",
            v[0], v[2], v[20]
        ));
    }
    check(ok, notes.join("; "))
}

fn criterion_5(ctx: &Ctx) -> Outcome {
    let s = Summary::read(&ctx.run1.join("summary.csv"));
    let mut notes = Vec::new();
    let mut ok = true;
    for metric in ["ssim", "psnr"] {
        let v = series(&s, &ctx.zero, "rotation", metric);
        let trough = v[5..=15].iter().copied().fold(f64::INFINITY, f64::min);
        ok &= v[20] - trough >= 0.3 && v[20] >= 0.9;
        notes.push(format!("{metric}: s20 {:.4}, min s5..15 {trough:.4}", v[20]));
    }
    check(ok, notes.join("; "))
}

fn criterion_6(ctx: &Ctx) -> Outcome {
    let above = (1..=7).all(|s| schedule::contrast_factor(s) > 1.0);
    let below = (8..=20).all(|s| schedule::contrast_factor(s) < 1.0);
    let s = Summary::read(&ctx.run1.join("summary.csv"));
    let (p2, p20) = (s.get("contrast", "2", "psnr"), s.get("contrast", "20", "psnr"));
    check(
        above && below && p2 > p20,
        format!("factor >1 for s1..7: {above}, <1 for s8..20: {below}; median psnr s2 {p2:.4} vs s20 {p20:.4}"),
    )
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn criterion_7(ctx: &Ctx) -> Outcome {
    let corpus = ctx.root.path().join("crop_corpus");
    generate_test_corpus(&corpus, 100, 128, 128, 9).map_err(|e| e.to_string())?;
    let mut m = RunManifest::global(&corpus, &[], []);
    m.mode = Mode::Crop;
    m.crop_levels = vec![0, 1, 2, 5, 10];
    m.metrics = vec![
        MetricSpec::Builtin(BuiltinMetric::Ssim),
        MetricSpec::Builtin(BuiltinMetric::Psnr),
    ];
    let table = run_benchmark(&m).map_err(|e| e.to_string())?;
    let medians = from_rows(&aggregate_median(&table).map_err(|e| e.to_string())?);
    let mut ok = table.records.len() == 100 * 5 * 2 && table.error_count() == 0;
    let mut notes = Vec::new();
    for metric in ["ssim", "psnr"] {
        let v: Vec<f64> = m
            .crop_levels
            .iter()
            .map(|&c| medians[&(None, (c as f64).to_bits(), metric.to_owned())])
            .collect();
        ok &= non_increasing(&v) && v[4] <= v[0] - 0.25;
        notes.push(format!(
            "{metric}: {}",
            v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" > ")
        ));
    }
    check(ok, notes.join("; "))
}

fn criterion_8(ctx: &Ctx) -> Outcome {
    let coverages = vec![0.1, 0.25, 0.5, 0.75];
    let mut m = RunManifest::global(&ctx.corpus, &[CorruptionKind::Splats], [5]);
    m.mode = Mode::Fgbg;
    m.mask_source = Some(MaskSource::Synthetic(coverages.clone()));
    m.global_seed = 7;
    let table = run_benchmark(&m).map_err(|e| e.to_string())?;
    let medians = from_rows(&aggregate_median(&table).map_err(|e| e.to_string())?);
    let mut ok = table.error_count() == 0;
    let mut notes = Vec::new();
    for region in [Region::Foreground, Region::Background] {
        for metric in ["ssim", "psnr"] {
            let v: Vec<f64> = coverages
                .iter()
                .map(|c| medians[&(Some(region), c.to_bits(), metric.to_owned())])
                .collect();
            ok &= non_increasing(&v);
            notes.push(format!(
                "{region} {metric}: {}",
                v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
            ));
        }
    }
    let mut rejected = Vec::new();
    for kind in [CorruptionKind::Rotation, CorruptionKind::Warp] {
        let mut bad = m.clone();
        bad.corruptions.push(kind);
        let r = bad.validate();
        ok &= matches!(r, Err(Error::Manifest(_)));
        rejected.push(format!("{kind} rejected: {}", r.is_err()));
    }
    notes.extend(rejected);
    check(ok, notes.join("; "))
}

fn criterion_9(ctx: &Ctx) -> Outcome {
    let manifest = ctx.root.path().join("suite.json");
    let eight = ctx.root.path().join("run8");
    let (code, _) = bench(&manifest, &eight, "8");
    if code != 0 {
        return Err(format!("8-worker run exited {code}"));
    }
    let mut files: BTreeMap<String, (Vec<u8>, Option<Vec<u8>>)> = BTreeMap::new();
    for (tag, dir) in [(0, &ctx.run1), (1, &eight)] {
        for sub in ["", "plots"] {
            for entry in fs::read_dir(dir.join(sub)).unwrap() {
                let p = entry.unwrap().path();
                if p.is_file() {
                    let key = p.strip_prefix(dir).unwrap().display().to_string();
                    let bytes = fs::read(&p).unwrap();
                    let slot = files.entry(key).or_insert((Vec::new(), None));
                    if tag == 0 {
                        slot.0 = bytes;
                    } else {
                        slot.1 = Some(bytes);
                    }
                }
            }
        }
    }
    let differing: Vec<&String> = files
        .iter()
        .filter(|(_, (a, b))| b.as_ref() != Some(a))
        .map(|(k, _)| k)
        .collect();
    check(
        differing.is_empty() && files.len() == 2 + 12,
        format!(
            "{} files compared between 1 and 8 workers, differing: {differing:?}",
            files.len()
        ),
    )
}

fn criterion_10(ctx: &Ctx) -> Outcome {
    let corpus: Vec<_> = {
        let mut v: Vec<_> = fs::read_dir(&ctx.corpus).unwrap().map(|e| e.unwrap().path()).collect();
        v.sort();
        v
    };
    let mut session = provider_open(&mock(&["--check-files"])).map_err(|e| e.to_string())?;
    let name = session.descriptor().name.to_string();
    let mut scored = 0;
    for i in 0..100 {
        let raw = session
            .score(&corpus[i % corpus.len()], &corpus[(i + 1) % corpus.len()])
            .map_err(|e| e.to_string())?;
        if raw.value != 0.5 {
            return Err(format!("pair {i} scored {}", raw.value));
        }
        scored += 1;
    }
    let status = session.close().map_err(|e| e.to_string())?;

    let dir = ctx.root.path().join("kill");
    let manifest = dir.join("m.json");
    fs::create_dir_all(&dir).unwrap();
    let m = serde_json::json!({
        "corpus_dir": ctx.corpus,
        "corruptions": ["blur", "splats"],
        "severities": [3, 12],
        "mode": "global",
        "metrics": ["ssim", {"external": ["python3", fixture("mock_provider.py"), "--die-after", "10", "--count-file", dir.join("count")]}],
    });
    fs::write(&manifest, m.to_string()).unwrap();
    let (code, _) = bench(&manifest, &dir.join("out"), "4");
    let raw = fs::read_to_string(dir.join("out/raw.csv")).unwrap_or_default();
    let rows = raw.lines().count().saturating_sub(1);
    let error_rows = raw.lines().skip(1).filter(|l| !l.ends_with(',')).count();
    check(
        name == "mock" && scored == 100 && status.success() && code == 2 && rows == 24 * 4 * 2 && error_rows > 0,
        format!(
            "handshake `{name}`, {scored} pairs at 0.5, shutdown {status}; killed mid-run: exit {code}, {rows} rows ({error_rows} error rows)"
        ),
    )
}

fn main() {
    let root = tempfile::tempdir().unwrap();
    let corpus = root.path().join("corpus");
    generate_test_corpus(&corpus, 24, 256, 256, 7).unwrap();

    let manifest = root.path().join("suite.json");
    fs::write(&manifest, suite_manifest(&corpus, 1..=20).to_string()).unwrap();
    let run1 = root.path().join("run1");
    let (run1_code, run1_time) = bench(&manifest, &run1, "1");

    let zero_manifest = root.path().join("zero.json");
    fs::write(&zero_manifest, suite_manifest(&corpus, [0]).to_string()).unwrap();
    let zero_dir = root.path().join("run0");
    bench(&zero_manifest, &zero_dir, "1");
    let zero = Summary::read(&zero_dir.join("summary.csv"));

    let ctx = Ctx {
        root,
        corpus,
        run1,
        run1_time,
        run1_code,
        zero,
    };

    let criteria: [(&str, &dyn Fn() -> Outcome); 10] = [
        ("matrix cardinality", &|| criterion_1(&ctx)),
        ("metric oracles", &criterion_2),
        ("identity anchor", &|| criterion_3(&ctx)),
        ("blur degradation trend", &|| criterion_4(&ctx)),
        ("rotation recovery", &|| criterion_5(&ctx)),
        ("contrast overshoot", &|| criterion_6(&ctx)),
        ("pixel-crop sensitivity", &|| criterion_7(&ctx)),
        ("fgbg coverage monotonicity", &|| criterion_8(&ctx)),
        ("determinism across workers", &|| criterion_9(&ctx)),
        ("provider protocol conformance", &|| criterion_10(&ctx)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(format!(
                "panicked: {:?}",
                p.downcast_ref::<String>()
                    .map(String::as_str)
                    .or(p.downcast_ref::<&str>().copied())
            ))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
