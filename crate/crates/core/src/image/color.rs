//! Hexcone HSV conversion.
//!
//! Hue is in degrees `[0, 360)`, saturation and value in `[0, 1]`.

use super::{quantize, Image};
use crate::error::{Error, Result};

/// Planar HSV image produced by [`rgb_to_hsv`].
#[derive(Debug, Clone, PartialEq)]
pub struct HsvImage {
    pub width: usize,
    pub height: usize,
    pub hue: Vec<f64>,
    pub saturation: Vec<f64>,
    pub value: Vec<f64>,
}

pub fn rgb_to_hsv_pixel(rgb: [u8; 3]) -> (f64, f64, f64) {
    let [r, g, b] = rgb.map(|c| f64::from(c) / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let hue = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    let saturation = if max == 0.0 { 0.0 } else { delta / max };
    // rem_euclid can land on exactly 360.0 for tiny negative inputs
    let hue = if hue >= 360.0 { hue - 360.0 } else { hue };
    (hue, saturation, max)
}

pub fn hsv_to_rgb_pixel(hue: f64, saturation: f64, value: f64) -> Result<[u8; 3]> {
    if !(0.0..360.0).contains(&hue) || !(0.0..=1.0).contains(&saturation) || !(0.0..=1.0).contains(&value) {
        return Err(Error::Domain(format!(
            "hsv ({hue}, {saturation}, {value}) outside H in [0,360), S,V in [0,1]"
        )));
    }
    let chroma = value * saturation;
    let sector = hue / 60.0;
    let x = chroma * (1.0 - (sector % 2.0 - 1.0).abs());
    let (r, g, b) = match sector as u32 {
        0 => (chroma, x, 0.0),
        1 => (x, chroma, 0.0),
        2 => (0.0, chroma, x),
        3 => (0.0, x, chroma),
        4 => (x, 0.0, chroma),
        _ => (chroma, 0.0, x),
    };
    let m = value - chroma;
    Ok([r, g, b].map(|c| quantize((c + m) * 255.0)))
}

pub fn rgb_to_hsv(img: &Image) -> HsvImage {
    let n = img.width() * img.height();
    let mut out = HsvImage {
        width: img.width(),
        height: img.height(),
        hue: Vec::with_capacity(n),
        saturation: Vec::with_capacity(n),
        value: Vec::with_capacity(n),
    };
    for p in img.pixels() {
        let (h, s, v) = rgb_to_hsv_pixel(p);
        out.hue.push(h);
        out.saturation.push(s);
        out.value.push(v);
    }
    out
}

pub fn hsv_to_rgb(hsv: &HsvImage) -> Result<Image> {
    let n = hsv.width * hsv.height;
    if hsv.hue.len() != n || hsv.saturation.len() != n || hsv.value.len() != n {
        return Err(Error::Domain("hsv plane lengths do not match dimensions".into()));
    }
    let mut data = Vec::with_capacity(n * 3);
    for i in 0..n {
        data.extend_from_slice(&hsv_to_rgb_pixel(hsv.hue[i], hsv.saturation[i], hsv.value[i])?);
    }
    Image::from_raw(hsv.width, hsv.height, data)
}
