//! Declarative description of a benchmark run.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corrupt::{CorruptionKind, MAX_SEVERITY};
use crate::error::{Error, Result};
use crate::metrics::BuiltinMetric;

/// Environment variable that overrides the manifest's worker count.
pub const PARALLELISM_ENV: &str = "NVSBENCH_PARALLELISM";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Whole-frame corruptions at each severity.
    Global,
    /// Corruptions restricted to foreground or background masks.
    Fgbg,
    /// Border cropping followed by rescaling.
    Crop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MaskSource {
    /// `<dir>/<image id>.png` per corpus image.
    Directory(PathBuf),
    /// Centered ellipses at these coverages.
    Synthetic(Vec<f64>),
}

impl FromStr for MaskSource {
    type Err = Error;

    /// `synthetic:0.1,0.25` or a directory path.
    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix("synthetic:") {
            Some(list) => list
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Manifest(format!("bad coverage `{v}`")))
                })
                .collect::<Result<Vec<_>>>()
                .map(MaskSource::Synthetic),
            None => Ok(MaskSource::Directory(PathBuf::from(s))),
        }
    }
}

/// A metric entry: a builtin name, or an external provider command.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MetricSpec {
    Builtin(BuiltinMetric),
    External(Vec<String>),
}

impl MetricSpec {
    pub fn builtins() -> Vec<MetricSpec> {
        BuiltinMetric::ALL.into_iter().map(MetricSpec::Builtin).collect()
    }

    /// Parses a comma separated list such as `ssim,psnr,ext:python3 provider.py`.
    ///
    /// An `ext:` entry swallows the rest of the string, commas included, so
    /// it must come last.
    pub fn parse_list(list: &str) -> Result<Vec<MetricSpec>> {
        let mut out = Vec::new();
        let mut rest = list.trim();
        while !rest.is_empty() {
            if rest.starts_with("ext:") {
                out.push(rest.parse()?);
                break;
            }
            let (head, tail) = rest.split_once(',').unwrap_or((rest, ""));
            if !head.trim().is_empty() {
                out.push(head.parse()?);
            }
            rest = tail.trim_start();
        }
        Ok(out)
    }
}

impl FromStr for MetricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(cmd) = s.strip_prefix("ext:") {
            let argv = shlex::split(cmd.trim().trim_matches('"'))
                .filter(|v| !v.is_empty())
                .ok_or_else(|| Error::Manifest(format!("cannot parse provider command `{cmd}`")))?;
            return Ok(MetricSpec::External(argv));
        }
        s.parse::<BuiltinMetric>()
            .map(MetricSpec::Builtin)
            .map_err(|_| Error::Manifest(format!("unknown metric `{s}`")))
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricSpec::Builtin(m) => write!(f, "{m}"),
            MetricSpec::External(argv) => write!(
                f,
                "ext:{}",
                shlex::try_join(argv.iter().map(String::as_str)).unwrap_or_default()
            ),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MetricSpecRepr {
    Text(String),
    Object { external: Vec<String> },
}

impl Serialize for MetricSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MetricSpec::Builtin(m) => MetricSpecRepr::Text(m.name().to_owned()),
            MetricSpec::External(argv) => MetricSpecRepr::Object { external: argv.clone() },
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MetricSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match MetricSpecRepr::deserialize(deserializer)? {
            MetricSpecRepr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            MetricSpecRepr::Object { external } if !external.is_empty() => Ok(MetricSpec::External(external)),
            MetricSpecRepr::Object { .. } => Err(serde::de::Error::custom("empty provider command")),
        }
    }
}

/// Worker count: `"auto"` or a positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Auto,
    Workers(usize),
}

impl Parallelism {
    /// Resolves to a concrete count, honoring [`PARALLELISM_ENV`].
    pub fn resolve(self) -> Result<usize> {
        let from_env = std::env::var(PARALLELISM_ENV).ok().filter(|v| !v.trim().is_empty());
        let effective = match from_env {
            Some(v) => v.parse::<Parallelism>()?,
            None => self,
        };
        Ok(match effective {
            Parallelism::Auto => std::thread::available_parallelism().map_or(1, |n| n.get()),
            Parallelism::Workers(n) => n,
        })
    }
}

impl FromStr for Parallelism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(Parallelism::Auto),
            v => match v.parse::<usize>() {
                Ok(n) if n > 0 => Ok(Parallelism::Workers(n)),
                _ => Err(Error::Manifest(format!(
                    "parallelism must be `auto` or a positive integer, got `{v}`"
                ))),
            },
        }
    }
}

impl Serialize for Parallelism {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Parallelism::Auto => serializer.serialize_str("auto"),
            Parallelism::Workers(n) => serializer.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Parallelism {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(u64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Count(0) => Err(serde::de::Error::custom("parallelism must be positive")),
            Repr::Count(n) => Ok(Parallelism::Workers(n as usize)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub corpus_dir: PathBuf,
    #[serde(default)]
    pub corruptions: Vec<CorruptionKind>,
    #[serde(default)]
    pub severities: Vec<u8>,
    #[serde(default = "MetricSpec::builtins")]
    pub metrics: Vec<MetricSpec>,
    pub mode: Mode,
    #[serde(default)]
    pub crop_levels: Vec<usize>,
    #[serde(default)]
    pub mask_source: Option<MaskSource>,
    #[serde(default)]
    pub global_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub parallelism: Parallelism,
}

/// A corpus image: its id (file stem) and location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub id: String,
    pub path: PathBuf,
}

/// Lists `.png` / `.ppm` files in `dir`, sorted by file name.
pub fn scan_corpus(dir: &Path) -> Result<Vec<CorpusEntry>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if !path.is_file() {
            continue;
        }
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if !matches!(ext.as_deref(), Some("png" | "ppm")) {
            continue;
        }
        let Some(id) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        out.push(CorpusEntry {
            id: id.to_owned(),
            path,
        });
    }
    out.sort_by(|a, b| a.path.file_name().cmp(&b.path.file_name()));
    let mut seen = HashSet::new();
    for e in &out {
        if !seen.insert(e.id.as_str()) {
            return Err(Error::Manifest(format!(
                "two corpus files share the image id `{}`",
                e.id
            )));
        }
    }
    Ok(out)
}

impl RunManifest {
    /// Global-mode manifest with builtin metrics, handy for library callers.
    pub fn global(
        corpus_dir: impl Into<PathBuf>,
        kinds: &[CorruptionKind],
        severities: impl IntoIterator<Item = u8>,
    ) -> Self {
        Self {
            corpus_dir: corpus_dir.into(),
            corruptions: kinds.to_vec(),
            severities: severities.into_iter().collect(),
            metrics: MetricSpec::builtins(),
            mode: Mode::Global,
            crop_levels: Vec::new(),
            mask_source: None,
            global_seed: 0,
            output_dir: None,
            parallelism: Parallelism::Auto,
        }
    }

    /// Reads a JSON manifest. Relative paths inside it are resolved against
    /// the manifest's own directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: RunManifest =
            serde_json::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        rebase(&mut manifest.corpus_dir);
        if let Some(dir) = manifest.output_dir.as_mut() {
            rebase(dir);
        }
        if let Some(MaskSource::Directory(dir)) = manifest.mask_source.as_mut() {
            rebase(dir);
        }
        Ok(manifest)
    }

    /// Checks every field and scans the corpus.
    pub fn validate(&self) -> Result<Vec<CorpusEntry>> {
        let bad = |msg: String| Err(Error::Manifest(msg));
        if self.metrics.is_empty() {
            return bad("at least one metric is required".into());
        }
        if let Some(dup) = first_duplicate(self.metrics.iter()) {
            return bad(format!("metric `{dup}` listed twice"));
        }
        match self.mode {
            Mode::Global | Mode::Fgbg => {
                if self.corruptions.is_empty() {
                    return bad("no corruptions listed".into());
                }
                if self.severities.is_empty() {
                    return bad("no severities listed".into());
                }
                if let Some(s) = self.severities.iter().find(|&&s| s > MAX_SEVERITY) {
                    return bad(format!("severity {s} outside 0..={MAX_SEVERITY}"));
                }
                if let Some(dup) = first_duplicate(self.corruptions.iter()) {
                    return bad(format!("corruption `{dup}` listed twice"));
                }
                if let Some(dup) = first_duplicate(self.severities.iter()) {
                    return bad(format!("severity {dup} listed twice"));
                }
            }
            Mode::Crop => {
                if self.crop_levels.is_empty() {
                    return bad("crop mode needs crop_levels".into());
                }
                if let Some(dup) = first_duplicate(self.crop_levels.iter()) {
                    return bad(format!("crop level {dup} listed twice"));
                }
            }
        }
        if self.mode == Mode::Fgbg {
            if let Some(k) = self.corruptions.iter().find(|k| k.is_global_only()) {
                return bad(format!("`{k}` alters the whole frame and cannot run in fgbg mode"));
            }
            match &self.mask_source {
                None => return bad("fgbg mode needs a mask_source".into()),
                Some(MaskSource::Synthetic(list)) => {
                    if list.is_empty() {
                        return bad("synthetic mask coverage list is empty".into());
                    }
                    if let Some(c) = list.iter().find(|c| !(**c > 0.0 && **c < 1.0)) {
                        return bad(format!("synthetic coverage {c} outside (0, 1)"));
                    }
                    let mut sorted = list.clone();
                    sorted.sort_by(f64::total_cmp);
                    if sorted.windows(2).any(|w| w[0] == w[1]) {
                        return bad("synthetic coverage listed twice".into());
                    }
                }
                Some(MaskSource::Directory(dir)) => {
                    if !dir.is_dir() {
                        return bad(format!("mask directory {} does not exist", dir.display()));
                    }
                }
            }
        }
        if let Parallelism::Workers(0) = self.parallelism {
            return bad("parallelism must be positive".into());
        }
        let corpus = scan_corpus(&self.corpus_dir).map_err(|e| match e {
            Error::Io { path, source } => Error::Manifest(format!("cannot read corpus {}: {source}", path.display())),
            other => other,
        })?;
        if corpus.is_empty() {
            return bad(format!("no .png or .ppm images in {}", self.corpus_dir.display()));
        }
        Ok(corpus)
    }
}

fn first_duplicate<T: Eq + std::hash::Hash + fmt::Display>(items: impl Iterator<Item = T>) -> Option<T> {
    let mut seen = HashSet::new();
    for item in items {
        if seen.contains(&item) {
            return Some(item);
        }
        seen.insert(item);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_json_manifest() {
        let json = r#"{
            "corpus_dir": "corpus",
            "corruptions": ["blur", "splats"],
            "severities": [0, 5, 20],
            "metrics": ["ssim", "psnr", {"external": ["python3", "p.py"]}, "ext:./prov --x 1"],
            "mode": "fgbg",
            "mask_source": {"synthetic": [0.1, 0.5]},
            "global_seed": 9,
            "parallelism": 4
        }"#;
        let m: RunManifest = serde_json::from_str(json).unwrap();
        assert_eq!(m.corruptions, [CorruptionKind::Blur, CorruptionKind::Splats]);
        assert_eq!(
            m.metrics[2],
            MetricSpec::External(vec!["python3".into(), "p.py".into()])
        );
        assert_eq!(
            m.metrics[3],
            MetricSpec::External(vec!["./prov".into(), "--x".into(), "1".into()])
        );
        assert_eq!(m.mask_source, Some(MaskSource::Synthetic(vec![0.1, 0.5])));
        assert_eq!(m.parallelism, Parallelism::Workers(4));
        let back: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_unknown_fields_and_values() {
        assert!(serde_json::from_str::<RunManifest>(r#"{"corpus_dir":"c","mode":"global","bogus":1}"#).is_err());
        assert!(
            serde_json::from_str::<RunManifest>(r#"{"corpus_dir":"c","mode":"global","metrics":["lpips"]}"#).is_err()
        );
        assert!(serde_json::from_str::<RunManifest>(r#"{"corpus_dir":"c","mode":"global","parallelism":0}"#).is_err());
        let m: RunManifest =
            serde_json::from_str(r#"{"corpus_dir":"c","mode":"crop","crop_levels":[1],"parallelism":"auto"}"#).unwrap();
        assert_eq!(m.parallelism, Parallelism::Auto);
        assert_eq!(m.metrics, MetricSpec::builtins());
    }

    #[test]
    fn metric_lists() {
        let list = MetricSpec::parse_list("ssim, psnr,ext:\"python3 mock.py --die-after 3\"").unwrap();
        assert_eq!(list.len(), 3);
        assert_eq!(
            list[2],
            MetricSpec::External(vec![
                "python3".into(),
                "mock.py".into(),
                "--die-after".into(),
                "3".into()
            ])
        );
        assert!(MetricSpec::parse_list("ssim,nope").is_err());
    }

    fn corpus_dir() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        crate::harness::generate_test_corpus(dir.path(), 2, 16, 16, 0).unwrap();
        dir
    }

    #[test]
    fn fgbg_rejects_global_only_kinds() {
        let dir = corpus_dir();
        let mut m = RunManifest::global(dir.path(), &[CorruptionKind::Splats, CorruptionKind::Warp], [5]);
        m.mode = Mode::Fgbg;
        m.mask_source = Some(MaskSource::Synthetic(vec![0.5]));
        assert!(matches!(m.validate(), Err(Error::Manifest(msg)) if msg.contains("warp")));
        m.corruptions = vec![CorruptionKind::Splats];
        assert_eq!(m.validate().unwrap().len(), 2);
    }

    #[test]
    fn validation_errors() {
        let dir = corpus_dir();
        let ok = RunManifest::global(dir.path(), &[CorruptionKind::Blur], [0, 1]);
        assert!(ok.validate().is_ok());

        let mut m = ok.clone();
        m.severities = vec![21];
        assert!(m.validate().is_err());
        let mut m = ok.clone();
        m.severities = vec![3, 3];
        assert!(m.validate().is_err());
        let mut m = ok.clone();
        m.corpus_dir = dir.path().join("missing");
        assert!(matches!(m.validate(), Err(Error::Manifest(_))));
        let empty = tempfile::tempdir().unwrap();
        let mut m = ok.clone();
        m.corpus_dir = empty.path().into();
        assert!(matches!(m.validate(), Err(Error::Manifest(_))));
        let mut m = ok;
        m.mode = Mode::Crop;
        assert!(m.validate().is_err());
    }

    #[test]
    fn scan_is_sorted_and_filtered() {
        let dir = tempfile::tempdir().unwrap();
        let img = crate::image::Image::filled(2, 2, [1, 2, 3]);
        for name in ["b.png", "a.ppm", "c.PNG"] {
            crate::image::save_image(&img, dir.path().join(name)).unwrap();
        }
        fs::write(dir.path().join("notes.txt"), "x").unwrap();
        let ids: Vec<_> = scan_corpus(dir.path()).unwrap().into_iter().map(|e| e.id).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        crate::image::save_image(&img, dir.path().join("a.png")).unwrap();
        assert!(scan_corpus(dir.path()).is_err());
    }

    #[test]
    fn mask_source_parsing() {
        assert_eq!(
            "synthetic:0.1,0.25".parse::<MaskSource>().unwrap(),
            MaskSource::Synthetic(vec![0.1, 0.25])
        );
        assert_eq!(
            "masks/".parse::<MaskSource>().unwrap(),
            MaskSource::Directory("masks/".into())
        );
        assert!("synthetic:x".parse::<MaskSource>().is_err());
    }
}
