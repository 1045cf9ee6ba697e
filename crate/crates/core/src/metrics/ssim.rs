//! Structural similarity on Rec. 601 luma.
//!
//! Local statistics use an 11x11 Gaussian window (σ = 1.5, normalized to
//! sum 1) evaluated only where the window lies fully inside the image. The
//! window is separable, so each of the five moment maps is computed with a
//! row pass followed by a column pass.

use super::classic::check_dims;
use super::{RawScore, SSIM};
use crate::error::{Error, Result};
use crate::image::{to_luma, Image, LumaPlane};

pub const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

fn window_1d() -> [f64; SSIM_WINDOW] {
    let r = (SSIM_WINDOW / 2) as f64;
    let mut w: [f64; SSIM_WINDOW] = std::array::from_fn(|i| {
        let d = i as f64 - r;
        (-(d * d) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
    });
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

/// Valid-region separable filtering: output is `(w - 10) x (h - 10)`.
fn filter_valid(src: &[f64], w: usize, h: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        let line = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = k.iter().zip(&line[x..x + SSIM_WINDOW]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        let dst = &mut out[y * ow..(y + 1) * ow];
        for (i, weight) in k.iter().enumerate() {
            let line = &rows[(y + i) * ow..(y + i + 1) * ow];
            for (d, s) in dst.iter_mut().zip(line) {
                *d += weight * s;
            }
        }
    }
    out
}

/// Mean SSIM of two luma planes of equal size.
pub fn ssim_luma(a: &LumaPlane, b: &LumaPlane) -> Result<f64> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    let (w, h) = (a.width, a.height);
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::TooSmall(w, h));
    }
    let k = window_1d();
    let aa: Vec<f64> = a.values.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = b.values.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect();

    let mu_a = filter_valid(&a.values, w, h, &k);
    let mu_b = filter_valid(&b.values, w, h, &k);
    let e_aa = filter_valid(&aa, w, h, &k);
    let e_bb = filter_valid(&bb, w, h, &k);
    let e_ab = filter_valid(&ab, w, h, &k);

    let mut total = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let var_a = e_aa[i] - ma * ma;
        let var_b = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        let num = (2.0 * ma * mb + C1) * (2.0 * cov + C2);
        let den = (ma * ma + mb * mb + C1) * (var_a + var_b + C2);
        total += num / den;
    }
    Ok(total / mu_a.len() as f64)
}

/// Mean local SSIM over every fully interior 11x11 window of the luma planes.
pub fn ssim(a: &Image, b: &Image) -> Result<RawScore<'static>> {
    check_dims(a, b)?;
    if a.width() < SSIM_WINDOW || a.height() < SSIM_WINDOW {
        return Err(Error::TooSmall(a.width(), a.height()));
    }
    let value = if a == b {
        1.0
    } else {
        ssim_luma(&to_luma(a), &to_luma(b))?
    };
    Ok(RawScore { value, metric: &SSIM })
}
