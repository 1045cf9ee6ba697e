//! Corruption-driven benchmarking of full-reference image quality metrics.
//!
//! Pristine images are degraded by parametric corruptions at severities
//! 0 to 20, cropped by a few border pixels, or corrupted only inside a
//! foreground or background mask. Each variant is scored against its
//! original by SSIM, PSNR, MSE or an external provider process, scores are
//! normalized to `[0, 1]` (1 = identical), and medians per severity are
//! written as CSV and SVG.
//!
//! ```
//! use nvsbench::corrupt::{apply_corruption, CorruptionKind, CorruptionSpec};
//! use nvsbench::harness::synthesize_image;
//! use nvsbench::metrics::{normalize, BuiltinMetric};
//!
//! let img = synthesize_image(64, 64, 1);
//! let blurred = apply_corruption(&img, &CorruptionSpec::new(CorruptionKind::Blur, 10, 0)?)?;
//! let raw = BuiltinMetric::Ssim.score(&img, &blurred)?;
//! assert!(normalize(&raw).value() < 1.0);
//! # Ok::<(), nvsbench::Error>(())
//! ```

pub mod corrupt;
pub mod error;
pub mod harness;
pub mod image;
pub mod metrics;
pub mod seed;

pub use error::{Error, Result};
pub use image::Image;
