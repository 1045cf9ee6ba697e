//! Full-reference similarity metrics and their common `[0, 1]` scale.
//!
//! Built-in metrics ([`mse`], [`psnr`], [`ssim`]) are computed in-process.
//! Learned metrics run in a separate process and are reached through
//! [`provider_open`] / [`ProviderSession::score`].

mod classic;
mod provider;
mod ssim;

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

pub use classic::{mse, psnr};
pub use provider::{provider_open, ProviderSession, PROTOCOL_VERSION};
pub use ssim::{ssim, ssim_luma, SSIM_WINDOW};

use crate::error::{Error, Result};
use crate::image::Image;

/// PSNR values at or above this many decibels normalize to 1.
pub const PSNR_CAP_DB: f64 = 50.0;
pub(crate) const PEAK_SQUARED: f64 = 255.0 * 255.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Higher raw values mean more similar.
    Similarity,
    /// Lower raw values mean more similar.
    Distance,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MetricSource {
    Builtin,
    /// Provider process launched with this argv.
    External(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricDescriptor {
    pub name: Cow<'static, str>,
    pub orientation: Orientation,
    /// `(low, high)`; `None` for an unbounded upper end.
    pub raw_range: (f64, Option<f64>),
    pub source: MetricSource,
}

pub static MSE: MetricDescriptor = MetricDescriptor {
    name: Cow::Borrowed("mse"),
    orientation: Orientation::Distance,
    raw_range: (0.0, Some(PEAK_SQUARED)),
    source: MetricSource::Builtin,
};

pub static PSNR: MetricDescriptor = MetricDescriptor {
    name: Cow::Borrowed("psnr"),
    orientation: Orientation::Similarity,
    raw_range: (0.0, None),
    source: MetricSource::Builtin,
};

pub static SSIM: MetricDescriptor = MetricDescriptor {
    name: Cow::Borrowed("ssim"),
    orientation: Orientation::Similarity,
    raw_range: (-1.0, Some(1.0)),
    source: MetricSource::Builtin,
};

impl MetricDescriptor {
    pub fn is_builtin(&self) -> bool {
        self.source == MetricSource::Builtin
    }

    /// Whether `value` lies outside the declared raw range.
    pub fn out_of_range(&self, value: f64) -> bool {
        let (low, high) = self.raw_range;
        value.is_nan() || value < low || high.is_some_and(|h| value > h)
    }
}

/// The in-process metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BuiltinMetric {
    Mse,
    Psnr,
    Ssim,
}

impl BuiltinMetric {
    pub const ALL: [BuiltinMetric; 3] = [Self::Mse, Self::Psnr, Self::Ssim];

    pub fn descriptor(self) -> &'static MetricDescriptor {
        match self {
            Self::Mse => &MSE,
            Self::Psnr => &PSNR,
            Self::Ssim => &SSIM,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Mse => "mse",
            Self::Psnr => "psnr",
            Self::Ssim => "ssim",
        }
    }

    pub fn score(self, reference: &Image, test: &Image) -> Result<RawScore<'static>> {
        match self {
            Self::Mse => mse(reference, test),
            Self::Psnr => psnr(reference, test),
            Self::Ssim => ssim(reference, test),
        }
    }
}

impl fmt::Display for BuiltinMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mse" => Ok(Self::Mse),
            "psnr" => Ok(Self::Psnr),
            "ssim" => Ok(Self::Ssim),
            other => Err(Error::Domain(format!("unknown builtin metric `{other}`"))),
        }
    }
}

/// A metric value in the metric's own units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawScore<'a> {
    pub value: f64,
    pub metric: &'a MetricDescriptor,
}

/// A score on the shared scale: 1 means identical, 0 means no similarity.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NormalizedScore(f64);

impl NormalizedScore {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Maps a raw score onto `[0, 1]`.
///
/// PSNR saturates at [`PSNR_CAP_DB`], SSIM is clamped at 0, MSE is divided
/// by 255² and flipped. External metrics are rescaled from their declared
/// range and flipped when they are distances.
pub fn normalize(raw: &RawScore<'_>) -> NormalizedScore {
    let v = raw.value;
    if v.is_nan() {
        return NormalizedScore(0.0);
    }
    let metric = raw.metric;
    let score = if metric.is_builtin() {
        match metric.name.as_ref() {
            "psnr" => {
                if v == f64::INFINITY {
                    1.0
                } else {
                    (v.min(PSNR_CAP_DB) / PSNR_CAP_DB).clamp(0.0, 1.0)
                }
            }
            "ssim" => v.clamp(0.0, 1.0),
            "mse" => 1.0 - (v / PEAK_SQUARED).clamp(0.0, 1.0),
            _ => unreachable!("builtin descriptors are mse, psnr and ssim"),
        }
    } else {
        let (low, high) = metric.raw_range;
        let fraction = match high {
            Some(high) if high > low => ((v - low) / (high - low)).clamp(0.0, 1.0),
            Some(_) => {
                if v > low {
                    1.0
                } else {
                    0.0
                }
            }
            // unbounded above: squash the excess smoothly
            None => {
                let excess = (v - low).max(0.0);
                excess / (1.0 + excess)
            }
        };
        match metric.orientation {
            Orientation::Similarity => fraction,
            Orientation::Distance => 1.0 - fraction,
        }
    };
    NormalizedScore(score)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn external(orientation: Orientation, range: (f64, Option<f64>)) -> MetricDescriptor {
        MetricDescriptor {
            name: "ext".into(),
            orientation,
            raw_range: range,
            source: MetricSource::External(vec!["x".into()]),
        }
    }

    fn norm(value: f64, metric: &MetricDescriptor) -> f64 {
        normalize(&RawScore { value, metric }).value()
    }

    #[test]
    fn psnr_rule() {
        assert_eq!(norm(f64::INFINITY, &PSNR), 1.0);
        assert_eq!(norm(25.0, &PSNR), 0.5);
        assert_eq!(norm(80.0, &PSNR), 1.0);
        assert_eq!(norm(0.0, &PSNR), 0.0);
    }

    #[test]
    fn ssim_and_mse_rules() {
        assert_eq!(norm(-0.4, &SSIM), 0.0);
        assert_eq!(norm(0.75, &SSIM), 0.75);
        assert_eq!(norm(0.0, &MSE), 1.0);
        assert_eq!(norm(65025.0, &MSE), 0.0);
        assert_eq!(norm(65025.0 / 4.0, &MSE), 0.75);
    }

    #[test]
    fn external_rules() {
        let d = external(Orientation::Distance, (0.0, Some(1.0)));
        assert!((norm(0.3, &d) - 0.7).abs() < 1e-12);
        assert_eq!(norm(1.7, &d), 0.0);
        assert!(d.out_of_range(1.7) && !d.out_of_range(0.2));
        let s = external(Orientation::Similarity, (0.0, Some(2.0)));
        assert_eq!(norm(0.5, &s), 0.25);
        let u = external(Orientation::Distance, (0.0, None));
        assert_eq!(norm(0.0, &u), 1.0);
        assert_eq!(norm(1.0, &u), 0.5);
        assert_eq!(norm(f64::NAN, &u), 0.0);
    }

    #[test]
    fn builtin_orientations() {
        assert_eq!(MSE.orientation, Orientation::Distance);
        assert_eq!(PSNR.orientation, Orientation::Similarity);
        assert_eq!(SSIM.orientation, Orientation::Similarity);
        for m in BuiltinMetric::ALL {
            assert_eq!(m.descriptor().name, m.name());
            assert_eq!(m.name().parse::<BuiltinMetric>().unwrap(), m);
        }
    }
}
