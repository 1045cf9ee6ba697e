use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_SEVERITY: u8 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionKind {
    Blur,
    Brightness,
    ColorShift,
    Contrast,
    Floaters,
    Grayscale,
    Pixelation,
    Rotation,
    Saturation,
    Shadows,
    Splats,
    Warp,
    Fog,
    GaussianNoise,
}

impl CorruptionKind {
    /// Every kind, the twelve-member render-artifact suite first.
    pub const ALL: [CorruptionKind; 14] = [
        Self::Blur,
        Self::Brightness,
        Self::ColorShift,
        Self::Contrast,
        Self::Floaters,
        Self::Grayscale,
        Self::Pixelation,
        Self::Rotation,
        Self::Saturation,
        Self::Shadows,
        Self::Splats,
        Self::Warp,
        Self::Fog,
        Self::GaussianNoise,
    ];

    /// The twelve render-artifact corruptions, without the extended kinds.
    pub const SUITE: [CorruptionKind; 12] = [
        Self::Blur,
        Self::Brightness,
        Self::ColorShift,
        Self::Contrast,
        Self::Floaters,
        Self::Grayscale,
        Self::Pixelation,
        Self::Rotation,
        Self::Saturation,
        Self::Shadows,
        Self::Splats,
        Self::Warp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Blur => "blur",
            Self::Brightness => "brightness",
            Self::ColorShift => "color_shift",
            Self::Contrast => "contrast",
            Self::Floaters => "floaters",
            Self::Grayscale => "grayscale",
            Self::Pixelation => "pixelation",
            Self::Rotation => "rotation",
            Self::Saturation => "saturation",
            Self::Shadows => "shadows",
            Self::Splats => "splats",
            Self::Warp => "warp",
            Self::Fog => "fog",
            Self::GaussianNoise => "gaussian_noise",
        }
    }

    /// Kinds outside the twelve-member suite.
    pub fn is_extended(self) -> bool {
        matches!(self, Self::Fog | Self::GaussianNoise)
    }

    /// Kinds that move the whole frame and therefore cannot be masked.
    pub fn is_global_only(self) -> bool {
        matches!(self, Self::Rotation | Self::Warp)
    }

    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            Self::Floaters | Self::Splats | Self::Shadows | Self::GaussianNoise | Self::Fog
        )
    }

    /// Parses a comma separated list; `all` expands to the twelve-member suite
    /// and `all+extended` to every kind.
    pub fn parse_list(list: &str) -> Result<Vec<CorruptionKind>> {
        match list.trim() {
            "all" => return Ok(Self::SUITE.to_vec()),
            "all+extended" => return Ok(Self::ALL.to_vec()),
            _ => {}
        }
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorruptionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::Domain(format!("unknown corruption kind `{s}`")))
    }
}

/// Fully determines one corruption application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    pub severity: u8,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn new(kind: CorruptionKind, severity: u8, seed: u64) -> Result<Self> {
        let spec = Self { kind, severity, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.severity > MAX_SEVERITY {
            return Err(Error::Domain(format!(
                "severity {} outside 0..={MAX_SEVERITY}",
                self.severity
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_membership_flags() {
        assert_eq!(CorruptionKind::SUITE.len(), 12);
        assert!(CorruptionKind::SUITE.iter().all(|k| !k.is_extended()));
        assert!(CorruptionKind::Fog.is_extended() && CorruptionKind::GaussianNoise.is_extended());
        let global: Vec<_> = CorruptionKind::ALL.into_iter().filter(|k| k.is_global_only()).collect();
        assert_eq!(global, [CorruptionKind::Rotation, CorruptionKind::Warp]);
        assert_eq!(&CorruptionKind::ALL[..12], &CorruptionKind::SUITE[..]);
    }

    #[test]
    fn names_round_trip() {
        for k in CorruptionKind::ALL {
            assert_eq!(k.name().parse::<CorruptionKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.name()));
        }
        assert_eq!(
            "Color-Shift".parse::<CorruptionKind>().unwrap(),
            CorruptionKind::ColorShift
        );
        assert!("snow".parse::<CorruptionKind>().is_err());
    }

    #[test]
    fn list_parsing() {
        assert_eq!(CorruptionKind::parse_list("all").unwrap().len(), 12);
        assert_eq!(CorruptionKind::parse_list("all+extended").unwrap().len(), 14);
        assert_eq!(
            CorruptionKind::parse_list("blur, fog").unwrap(),
            [CorruptionKind::Blur, CorruptionKind::Fog]
        );
        assert!(CorruptionKind::parse_list("blur,nope").is_err());
    }

    #[test]
    fn severity_bounds() {
        assert!(CorruptionSpec::new(CorruptionKind::Blur, 20, 0).is_ok());
        assert!(matches!(
            CorruptionSpec::new(CorruptionKind::Blur, 21, 0),
            Err(Error::Domain(_))
        ));
    }
}
