use super::{quantize, Image};
use crate::error::{Error, Result};

/// Sampled Gaussian with radius `ceil(3σ)`, normalized to sum 1.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let denom = 2.0 * sigma * sigma;
    let mut kernel: Vec<f64> = (-radius..=radius).map(|k| (-((k * k) as f64) / denom).exp()).collect();
    let sum: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|w| *w /= sum);
    kernel
}

/// Separable Gaussian blur with clamp-to-edge borders.
///
/// `sigma == 0` returns the input unchanged.
pub fn gaussian_blur(img: &Image, sigma: f64) -> Result<Image> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::Domain(format!("blur sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let kernel = gaussian_kernel(sigma);
    let (w, h) = img.dimensions();
    let src: Vec<f64> = img.as_bytes().iter().map(|&v| f64::from(v)).collect();
    let horizontal = convolve_rows(&src, w, h, 3, &kernel);
    let vertical = convolve_cols(&horizontal, w, h, 3, &kernel);
    Image::from_raw(w, h, vertical.into_iter().map(quantize).collect())
}

/// 1-D convolution along x of an interleaved buffer with `channels` values per pixel.
pub(crate) fn convolve_rows(src: &[f64], w: usize, h: usize, channels: usize, kernel: &[f64]) -> Vec<f64> {
    let radius = (kernel.len() / 2) as isize;
    let mut out = vec![0.0; src.len()];
    for y in 0..h {
        let row = &src[y * w * channels..(y + 1) * w * channels];
        let dst = &mut out[y * w * channels..(y + 1) * w * channels];
        for x in 0..w {
            for c in 0..channels {
                let mut acc = 0.0;
                for (k, weight) in kernel.iter().enumerate() {
                    let sx = (x as isize + k as isize - radius).clamp(0, w as isize - 1) as usize;
                    acc += weight * row[sx * channels + c];
                }
                dst[x * channels + c] = acc;
            }
        }
    }
    out
}

pub(crate) fn convolve_cols(src: &[f64], w: usize, h: usize, channels: usize, kernel: &[f64]) -> Vec<f64> {
    let radius = (kernel.len() / 2) as isize;
    let stride = w * channels;
    let mut out = vec![0.0; src.len()];
    for y in 0..h {
        let dst = &mut out[y * stride..(y + 1) * stride];
        for (k, weight) in kernel.iter().enumerate() {
            let sy = (y as isize + k as isize - radius).clamp(0, h as isize - 1) as usize;
            let row = &src[sy * stride..(sy + 1) * stride];
            for (d, s) in dst.iter_mut().zip(row) {
                *d += weight * s;
            }
        }
    }
    out
}
