//! Matrix execution: every (image, variant, metric) cell of a manifest.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use log::{debug, warn};
use rayon::prelude::*;

use super::manifest::{CorpusEntry, MaskSource, MetricSpec, Mode, RunManifest};
use super::masks::generate_synthetic_mask;
use crate::corrupt::{
    apply_corruption, apply_masked_corruption, crop_and_rescale, mask_coverage, CorruptionKind, CorruptionSpec, Mask,
};
use crate::error::{Error, Result};
use crate::image::{load_image, save_image, Image};
use crate::metrics::{normalize, BuiltinMetric, ProviderSession, RawScore};
use crate::seed::cell_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Foreground,
    Background,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Foreground => "foreground",
            Region::Background => "background",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What was done to the pristine image before scoring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    Corruption {
        kind: CorruptionKind,
        severity: u8,
    },
    Crop {
        pixels: usize,
    },
    /// `coverage` is the fraction of pixels the corruption was allowed to touch.
    Masked {
        kind: CorruptionKind,
        severity: u8,
        region: Region,
        coverage: f64,
    },
}

impl Variant {
    /// Series label: the kind name, `crop`, or `<kind>@<severity>` for masked runs.
    pub fn label(&self) -> String {
        match self {
            Variant::Corruption { kind, .. } => kind.name().to_owned(),
            Variant::Crop { .. } => "crop".to_owned(),
            Variant::Masked { kind, severity, .. } => format!("{}@{severity}", kind.name()),
        }
    }

    pub fn axis_name(&self) -> &'static str {
        match self {
            Variant::Corruption { .. } => "severity",
            Variant::Crop { .. } => "crop_pixels",
            Variant::Masked { .. } => "coverage",
        }
    }

    pub fn axis_value(&self) -> f64 {
        match *self {
            Variant::Corruption { severity, .. } => f64::from(severity),
            Variant::Crop { pixels } => pixels as f64,
            Variant::Masked { coverage, .. } => coverage,
        }
    }

    pub fn severity(&self) -> Option<u8> {
        match *self {
            Variant::Corruption { severity, .. } | Variant::Masked { severity, .. } => Some(severity),
            Variant::Crop { .. } => None,
        }
    }

    pub fn region(&self) -> Option<Region> {
        match *self {
            Variant::Masked { region, .. } => Some(region),
            _ => None,
        }
    }

    fn slug(&self) -> String {
        match *self {
            Variant::Corruption { kind, severity } => format!("{kind}_s{severity:02}"),
            Variant::Crop { pixels } => format!("crop_{pixels:03}"),
            Variant::Masked {
                kind,
                severity,
                region,
                coverage,
            } => format!(
                "{kind}_s{severity:02}_{region}_{:04}",
                (coverage * 1000.0).round() as u32
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub raw: f64,
    pub normalized: f64,
}

/// One scored cell, or the reason it could not be scored.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub image_id: String,
    pub variant: Variant,
    pub metric: String,
    pub score: std::result::Result<Scored, String>,
}

impl ScoreRecord {
    pub fn is_error(&self) -> bool {
        self.score.is_err()
    }

    pub fn normalized(&self) -> Option<f64> {
        self.score.as_ref().ok().map(|s| s.normalized)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub mode: Mode,
    pub records: Vec<ScoreRecord>,
    /// External scores that fell outside the provider's declared range and were clamped.
    pub clamped: usize,
}

impl ScoreTable {
    pub fn error_count(&self) -> usize {
        self.records.iter().filter(|r| r.is_error()).count()
    }
}

/// Canonical row order: kind, metric, axis, region, image.
pub(crate) fn record_order(a: &ScoreRecord, b: &ScoreRecord) -> std::cmp::Ordering {
    a.variant
        .label()
        .cmp(&b.variant.label())
        .then_with(|| a.metric.cmp(&b.metric))
        .then_with(|| a.variant.severity().cmp(&b.variant.severity()))
        .then_with(|| a.variant.axis_value().total_cmp(&b.variant.axis_value()))
        .then_with(|| a.variant.region().cmp(&b.variant.region()))
        .then_with(|| a.image_id.cmp(&b.image_id))
}

/// Idle provider sessions for one external command, one per busy worker at most.
struct ProviderPool {
    command: Vec<String>,
    name: String,
    idle: Mutex<Vec<ProviderSession>>,
}

impl ProviderPool {
    fn open(command: &[String]) -> Result<Self> {
        let first = crate::metrics::provider_open(command)?;
        Ok(Self {
            command: command.to_vec(),
            name: first.descriptor().name.to_string(),
            idle: Mutex::new(vec![first]),
        })
    }

    fn checkout(&self) -> Result<ProviderSession> {
        if let Some(s) = self.idle.lock().expect("pool lock").pop() {
            return Ok(s);
        }
        debug!("starting another `{}` provider", self.name);
        crate::metrics::provider_open(&self.command)
    }

    fn checkin(&self, session: ProviderSession) {
        if session.is_usable() {
            self.idle.lock().expect("pool lock").push(session);
        }
    }

    fn shutdown(self) {
        for session in self.idle.into_inner().expect("pool lock") {
            if let Err(e) = session.close() {
                warn!("provider `{}` did not shut down cleanly: {e}", self.name);
            }
        }
    }
}

enum Scorer {
    Builtin(BuiltinMetric),
    External(ProviderPool),
}

impl Scorer {
    fn name(&self) -> &str {
        match self {
            Scorer::Builtin(m) => m.name(),
            Scorer::External(p) => &p.name,
        }
    }
}

/// Masks for one image, keyed by region and coverage axis value.
fn masks_for(
    manifest: &RunManifest,
    entry: &CorpusEntry,
    width: usize,
    height: usize,
) -> Result<Vec<(Region, f64, Mask)>> {
    match manifest.mask_source.as_ref() {
        Some(MaskSource::Synthetic(coverages)) => {
            let seed = cell_seed(manifest.global_seed, &entry.id, "mask", 0);
            let mut out = Vec::new();
            for &c in coverages {
                out.push((Region::Foreground, c, generate_synthetic_mask(width, height, c, seed)?));
                // the complement of a (1 - c) ellipse corrupts the same fraction c of the frame
                let bg = generate_synthetic_mask(width, height, 1.0 - c, seed)?.complement();
                out.push((Region::Background, c, bg));
            }
            Ok(out)
        }
        Some(MaskSource::Directory(dir)) => {
            let path = ["png", "PNG", "ppm"]
                .iter()
                .map(|ext| dir.join(format!("{}.{ext}", entry.id)))
                .find(|p| p.is_file())
                .ok_or_else(|| Error::Format(format!("no mask for `{}` in {}", entry.id, dir.display())))?;
            let fg = Mask::load(&path)?;
            if fg.dimensions() != (width, height) {
                return Err(Error::MaskMismatch {
                    mask_w: fg.width(),
                    mask_h: fg.height(),
                    image_w: width,
                    image_h: height,
                });
            }
            let bg = fg.complement();
            let bin = |m: &Mask| (mask_coverage(m) * 20.0).round() / 20.0;
            Ok(vec![
                (Region::Foreground, bin(&fg), fg),
                (Region::Background, bin(&bg), bg),
            ])
        }
        None => Err(Error::Manifest("fgbg mode needs a mask_source".into())),
    }
}

/// Variants that do not depend on the image.
fn static_variants(manifest: &RunManifest) -> Vec<Variant> {
    match manifest.mode {
        Mode::Global => manifest
            .corruptions
            .iter()
            .flat_map(|&kind| {
                manifest
                    .severities
                    .iter()
                    .map(move |&severity| Variant::Corruption { kind, severity })
            })
            .collect(),
        Mode::Crop => manifest
            .crop_levels
            .iter()
            .map(|&pixels| Variant::Crop { pixels })
            .collect(),
        Mode::Fgbg => Vec::new(),
    }
}

/// Number of (image, variant) pairs a manifest expands to, before metrics.
pub fn variants_per_image(manifest: &RunManifest) -> usize {
    match manifest.mode {
        Mode::Global => manifest.corruptions.len() * manifest.severities.len(),
        Mode::Crop => manifest.crop_levels.len(),
        Mode::Fgbg => {
            let masks = match &manifest.mask_source {
                Some(MaskSource::Synthetic(c)) => 2 * c.len(),
                _ => 2,
            };
            manifest.corruptions.len() * manifest.severities.len() * masks
        }
    }
}

struct Context<'a> {
    manifest: &'a RunManifest,
    scorers: &'a [Scorer],
    scratch: Option<&'a Path>,
    clamped: &'a AtomicUsize,
}

impl Context<'_> {
    fn error_rows(&self, id: &str, variants: &[Variant], reason: &str) -> Vec<ScoreRecord> {
        variants
            .iter()
            .flat_map(|v| {
                self.scorers.iter().map(move |s| ScoreRecord {
                    image_id: id.to_owned(),
                    variant: *v,
                    metric: s.name().to_owned(),
                    score: Err(reason.to_owned()),
                })
            })
            .collect()
    }

    fn run_image(&self, entry: &CorpusEntry) -> Vec<ScoreRecord> {
        let fixed = static_variants(self.manifest);
        let pristine = match load_image(&entry.path) {
            Ok(img) => img,
            Err(e) => {
                let variants = if self.manifest.mode == Mode::Fgbg {
                    placeholder_masked_variants(self.manifest)
                } else {
                    fixed
                };
                return self.error_rows(&entry.id, &variants, &e.to_string());
            }
        };

        if self.manifest.mode != Mode::Fgbg {
            return fixed
                .par_iter()
                .flat_map_iter(|v| {
                    let produced = self.produce(entry, &pristine, v, None);
                    self.score_cell(entry, &pristine, v, produced)
                })
                .collect();
        }

        let masks = match masks_for(self.manifest, entry, pristine.width(), pristine.height()) {
            Ok(m) => m,
            Err(e) => return self.error_rows(&entry.id, &placeholder_masked_variants(self.manifest), &e.to_string()),
        };
        let cells: Vec<(Variant, &Mask)> = self
            .manifest
            .corruptions
            .iter()
            .flat_map(|&kind| {
                let masks = &masks;
                self.manifest.severities.iter().flat_map(move |&severity| {
                    masks.iter().map(move |(region, coverage, mask)| {
                        (
                            Variant::Masked {
                                kind,
                                severity,
                                region: *region,
                                coverage: *coverage,
                            },
                            mask,
                        )
                    })
                })
            })
            .collect();
        cells
            .par_iter()
            .flat_map_iter(|(v, mask)| {
                let produced = self.produce(entry, &pristine, v, Some(mask));
                self.score_cell(entry, &pristine, v, produced)
            })
            .collect()
    }

    fn produce(&self, entry: &CorpusEntry, pristine: &Image, variant: &Variant, mask: Option<&Mask>) -> Result<Image> {
        let seed_for = |kind: CorruptionKind, severity: u8| {
            cell_seed(self.manifest.global_seed, &entry.id, kind.name(), u32::from(severity))
        };
        match *variant {
            Variant::Corruption { kind, severity } => apply_corruption(
                pristine,
                &CorruptionSpec::new(kind, severity, seed_for(kind, severity))?,
            ),
            Variant::Crop { pixels } => crop_and_rescale(pristine, pixels),
            Variant::Masked { kind, severity, .. } => {
                let mask = mask.expect("masked variants carry a mask");
                apply_masked_corruption(
                    pristine,
                    mask,
                    &CorruptionSpec::new(kind, severity, seed_for(kind, severity))?,
                )
            }
        }
    }

    fn score_cell(
        &self,
        entry: &CorpusEntry,
        pristine: &Image,
        variant: &Variant,
        produced: Result<Image>,
    ) -> Vec<ScoreRecord> {
        let test = match produced {
            Ok(img) => img,
            Err(e) => return self.error_rows(&entry.id, std::slice::from_ref(variant), &e.to_string()),
        };

        // external providers read files, so the corrupted image goes to scratch space once per cell
        let mut test_file: Option<std::result::Result<PathBuf, String>> = None;
        let mut rows = Vec::with_capacity(self.scorers.len());
        for scorer in self.scorers {
            let score = match scorer {
                Scorer::Builtin(m) => m
                    .score(pristine, &test)
                    .map(|raw| scored(&raw))
                    .map_err(|e| e.to_string()),
                Scorer::External(pool) => {
                    let path = test_file.get_or_insert_with(|| {
                        let dir = self.scratch.expect("scratch dir exists when providers are used");
                        let p = dir.join(format!("{}__{}.png", entry.id, variant.slug()));
                        save_image(&test, &p).map(|_| p).map_err(|e| e.to_string())
                    });
                    match path {
                        Ok(p) => self.score_external(pool, &entry.path, p),
                        Err(e) => Err(e.clone()),
                    }
                }
            };
            rows.push(ScoreRecord {
                image_id: entry.id.clone(),
                variant: *variant,
                metric: scorer.name().to_owned(),
                score,
            });
        }
        if let Some(Ok(p)) = test_file {
            let _ = std::fs::remove_file(p);
        }
        rows
    }

    fn score_external(
        &self,
        pool: &ProviderPool,
        reference: &Path,
        test: &Path,
    ) -> std::result::Result<Scored, String> {
        let mut session = pool.checkout().map_err(|e| e.to_string())?;
        let result = session.score(reference, test).map(|raw| {
            if raw.metric.out_of_range(raw.value) {
                self.clamped.fetch_add(1, Ordering::Relaxed);
            }
            scored(&raw)
        });
        let result = result.map_err(|e| {
            warn!("provider `{}` failed on {}: {e}", pool.name, test.display());
            e.to_string()
        });
        pool.checkin(session);
        result
    }
}

fn scored(raw: &RawScore<'_>) -> Scored {
    Scored {
        raw: raw.value,
        normalized: normalize(raw).value(),
    }
}

/// Masked variants for an image whose masks could not be built; keeps the
/// row count equal to the manifest's cross product.
fn placeholder_masked_variants(manifest: &RunManifest) -> Vec<Variant> {
    let coverages: Vec<f64> = match &manifest.mask_source {
        Some(MaskSource::Synthetic(c)) => c.clone(),
        _ => vec![f64::NAN],
    };
    let mut out = Vec::new();
    for &kind in &manifest.corruptions {
        for &severity in &manifest.severities {
            for &coverage in &coverages {
                for region in [Region::Foreground, Region::Background] {
                    out.push(Variant::Masked {
                        kind,
                        severity,
                        region,
                        coverage,
                    });
                }
            }
        }
    }
    out
}

/// Scores every cell of the manifest's cross product.
///
/// Per-cell failures (a provider error, an image too small for SSIM) become
/// error rows and the run continues. Manifest problems and a provider that
/// fails its initial handshake abort the run.
pub fn run_benchmark(manifest: &RunManifest) -> Result<ScoreTable> {
    let corpus = manifest.validate()?;
    let workers = manifest.parallelism.resolve()?;

    let mut scorers = Vec::with_capacity(manifest.metrics.len());
    for spec in &manifest.metrics {
        scorers.push(match spec {
            MetricSpec::Builtin(m) => Scorer::Builtin(*m),
            MetricSpec::External(cmd) => Scorer::External(ProviderPool::open(cmd)?),
        });
    }
    {
        let mut names: Vec<&str> = scorers.iter().map(Scorer::name).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Manifest(format!("two metrics are both named `{}`", w[0])));
        }
    }

    let scratch = if scorers.iter().any(|s| matches!(s, Scorer::External(_))) {
        Some(
            tempfile::Builder::new()
                .prefix("nvsbench-")
                .tempdir()
                .map_err(|e| Error::io(std::env::temp_dir(), e))?,
        )
    } else {
        None
    };
    let clamped = AtomicUsize::new(0);
    let ctx = Context {
        manifest,
        scorers: &scorers,
        scratch: scratch.as_ref().map(|d| d.path()),
        clamped: &clamped,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .thread_name(|i| format!("nvsbench-{i}"))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start {workers} workers: {e}")))?;
    let mut records: Vec<ScoreRecord> =
        pool.install(|| corpus.par_iter().flat_map_iter(|entry| ctx.run_image(entry)).collect());
    records.sort_by(record_order);

    for scorer in scorers {
        if let Scorer::External(p) = scorer {
            p.shutdown();
        }
    }
    let clamped = clamped.into_inner();
    if clamped > 0 {
        warn!("{clamped} external scores fell outside their declared range and were clamped");
    }
    Ok(ScoreTable {
        mode: manifest.mode,
        records,
        clamped,
    })
}

/// One `(reference, test)` file pair scored by [`score_dirs`].
#[derive(Debug, Clone, PartialEq)]
pub struct PairScore {
    pub image_id: String,
    pub metric: String,
    pub score: std::result::Result<Scored, String>,
}

/// Scores every image in `test_dir` against the same-stem image in `ref_dir`.
///
/// Test images without a reference become error rows.
pub fn score_dirs(ref_dir: &Path, test_dir: &Path, metrics: &[MetricSpec]) -> Result<Vec<PairScore>> {
    if metrics.is_empty() {
        return Err(Error::Manifest("at least one metric is required".into()));
    }
    let refs = super::manifest::scan_corpus(ref_dir)?;
    let tests = super::manifest::scan_corpus(test_dir)?;
    if tests.is_empty() {
        return Err(Error::Manifest(format!(
            "no .png or .ppm images in {}",
            test_dir.display()
        )));
    }
    let mut scorers = Vec::with_capacity(metrics.len());
    for spec in metrics {
        scorers.push(match spec {
            MetricSpec::Builtin(m) => Scorer::Builtin(*m),
            MetricSpec::External(cmd) => Scorer::External(ProviderPool::open(cmd)?),
        });
    }
    let clamped = AtomicUsize::new(0);
    let manifest = RunManifest::global(ref_dir, &[], []);
    let ctx = Context {
        manifest: &manifest,
        scorers: &scorers,
        scratch: None,
        clamped: &clamped,
    };

    let mut out: Vec<PairScore> = tests
        .par_iter()
        .flat_map_iter(|t| {
            let reference = refs.iter().find(|r| r.id == t.id);
            let loaded = reference
                .ok_or_else(|| format!("no reference image named `{}`", t.id))
                .and_then(|r| {
                    let a = load_image(&r.path).map_err(|e| e.to_string())?;
                    let b = load_image(&t.path).map_err(|e| e.to_string())?;
                    Ok((r, a, b))
                });
            ctx.scorers
                .iter()
                .map(|scorer| {
                    let score = match (&loaded, scorer) {
                        (Err(e), _) => Err(e.clone()),
                        (Ok((_, a, b)), Scorer::Builtin(m)) => {
                            m.score(a, b).map(|raw| scored(&raw)).map_err(|e| e.to_string())
                        }
                        (Ok((r, _, _)), Scorer::External(pool)) => ctx.score_external(pool, &r.path, &t.path),
                    };
                    PairScore {
                        image_id: t.id.clone(),
                        metric: scorer.name().to_owned(),
                        score,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort_by(|a, b| a.image_id.cmp(&b.image_id).then_with(|| a.metric.cmp(&b.metric)));
    for scorer in scorers {
        if let Scorer::External(p) = scorer {
            p.shutdown();
        }
    }
    Ok(out)
}

/// Writes every `(kind, severity)` variant of each image in `in_dir` to
/// `out_dir/<kind>/sNN/<id>.png` and returns how many files were written.
pub fn corrupt_dir(
    in_dir: &Path,
    out_dir: &Path,
    kinds: &[CorruptionKind],
    severities: &[u8],
    global_seed: u64,
) -> Result<usize> {
    let corpus = super::manifest::scan_corpus(in_dir)?;
    if corpus.is_empty() {
        return Err(Error::Manifest(format!(
            "no .png or .ppm images in {}",
            in_dir.display()
        )));
    }
    if let Some(s) = severities.iter().find(|&&s| s > crate::corrupt::MAX_SEVERITY) {
        return Err(Error::Domain(format!(
            "severity {s} outside 0..={}",
            crate::corrupt::MAX_SEVERITY
        )));
    }
    let cells: Vec<(&CorpusEntry, CorruptionKind, u8)> = corpus
        .iter()
        .flat_map(|e| {
            kinds
                .iter()
                .flat_map(move |&k| severities.iter().map(move |&s| (e, k, s)))
        })
        .collect();
    cells
        .par_iter()
        .map(|&(entry, kind, severity)| {
            let img = load_image(&entry.path)?;
            let seed = cell_seed(global_seed, &entry.id, kind.name(), u32::from(severity));
            let out = apply_corruption(&img, &CorruptionSpec::new(kind, severity, seed)?)?;
            let dir = out_dir.join(kind.name()).join(format!("s{severity:02}"));
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            save_image(&out, dir.join(format!("{}.png", entry.id)))
        })
        .collect::<Result<Vec<()>>>()
        .map(|v| v.len())
}
