use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{load_image, luma, Image};

/// Per-pixel binary map; `true` marks pixels a masked corruption may touch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::Domain(format!(
                "mask has {} bits, expected {}x{}",
                bits.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, bits })
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        Self {
            width,
            height,
            bits: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self { width, height, bits }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// True when every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.dimensions() == other.dimensions() && self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b)
    }

    /// Reads a mask PNG (or PPM); luma values >= 128 count as foreground.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let img = load_image(path)?;
        let bits = img.pixels().map(|p| luma(p).round() >= 128.0).collect();
        Mask::new(img.width(), img.height(), bits)
    }

    /// Writes a single-channel PNG with 0 for background and 255 for foreground.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let data: Vec<u8> = self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
        crate::image::save_gray_png(path.as_ref(), self.width, self.height, &data)
    }

    /// Visual form of the mask, white foreground on black.
    pub fn to_image(&self) -> Image {
        Image::from_fn(
            self.width,
            self.height,
            |x, y| if self.get(x, y) { [255; 3] } else { [0; 3] },
        )
    }
}

/// Fraction of set bits.
pub fn mask_coverage(mask: &Mask) -> f64 {
    if mask.bits.is_empty() {
        return 0.0;
    }
    mask.count() as f64 / mask.bits.len() as f64
}
