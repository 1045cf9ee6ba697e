use rand::Rng as _;

use crate::corrupt::Mask;
use crate::error::{Error, Result};
use crate::seed;

/// Centered ellipse covering `coverage` of the frame.
///
/// The seed only picks the aspect ratio, so masks from the same seed are
/// nested: a larger coverage always contains a smaller one.
pub fn generate_synthetic_mask(width: usize, height: usize, coverage: f64, seed: u64) -> Result<Mask> {
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(Error::Domain(format!(
            "mask coverage must lie in (0, 1), got {coverage}"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::Domain("mask dimensions must be positive".into()));
    }
    let aspect = seed::rng(seed).gen_range(-0.3..0.3f64).exp();
    let rx = aspect * width as f64 / 2.0;
    let ry = height as f64 / (2.0 * aspect);
    let cx = (width as f64 - 1.0) / 2.0;
    let cy = (height as f64 - 1.0) / 2.0;

    // scale at which each pixel center enters the ellipse
    let entry: Vec<f64> = (0..height)
        .flat_map(|y| {
            (0..width).map(move |x| {
                let u = (x as f64 - cx) / rx;
                let v = (y as f64 - cy) / ry;
                (u * u + v * v).sqrt()
            })
        })
        .collect();
    let n = entry.len();
    let target = ((coverage * n as f64).round() as usize).clamp(1, n);
    let mut sorted = entry.clone();
    sorted.sort_by(f64::total_cmp);
    let threshold = sorted[target - 1];
    let bits = entry.iter().map(|&e| e <= threshold).collect();
    Mask::new(width, height, bits)
}
