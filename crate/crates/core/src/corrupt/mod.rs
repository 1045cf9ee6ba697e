//! Severity-parameterized corruptions, mask-restricted application and
//! pixel cropping.
//!
//! Every function here is pure. Stochastic corruptions carry their own seed
//! in [`CorruptionSpec`], so concurrent callers never share generator state.

mod apply;
mod crop;
mod kind;
mod mask;
pub mod schedule;
mod shapes;

pub use apply::apply_corruption;
pub use crop::crop_and_rescale;
pub use kind::{CorruptionKind, CorruptionSpec, MAX_SEVERITY};
pub use mask::{mask_coverage, Mask};

use crate::error::{Error, Result};
use crate::image::Image;

/// Corrupts the whole frame, then keeps the corrupted pixels only where the
/// mask is set. Pixels outside the mask are bit-identical to the input.
pub fn apply_masked_corruption(img: &Image, mask: &Mask, spec: &CorruptionSpec) -> Result<Image> {
    if mask.dimensions() != img.dimensions() {
        return Err(Error::MaskMismatch {
            mask_w: mask.width(),
            mask_h: mask.height(),
            image_w: img.width(),
            image_h: img.height(),
        });
    }
    if spec.kind.is_global_only() {
        return Err(Error::GlobalOnlyKind(spec.kind.name()));
    }
    let corrupted = apply_corruption(img, spec)?;
    let mut out = img.clone();
    for y in 0..img.height() {
        for x in 0..img.width() {
            if mask.get(x, y) {
                out.set_pixel(x, y, corrupted.pixel(x, y));
            }
        }
    }
    Ok(out)
}
