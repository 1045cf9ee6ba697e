use crate::error::{Error, Result};
use crate::image::{resample, Filter, Image};

/// Removes `n` pixels from every edge and bilinearly resamples back to the
/// original size, emulating a slightly misplaced camera.
pub fn crop_and_rescale(img: &Image, n: usize) -> Result<Image> {
    if n == 0 {
        return Ok(img.clone());
    }
    let (w, h) = img.dimensions();
    if 2 * n >= w.min(h) {
        return Err(Error::Domain(format!(
            "cropping {n} px from each side of a {w}x{h} image leaves nothing"
        )));
    }
    let inner = img.crop(n, n, w - 2 * n, h - 2 * n)?;
    resample(&inner, w, h, Filter::Bilinear)
}
