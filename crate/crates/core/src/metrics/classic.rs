use super::{RawScore, MSE, PEAK_SQUARED, PSNR};
use crate::error::{Error, Result};
use crate::image::Image;

pub(super) fn check_dims(a: &Image, b: &Image) -> Result<()> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::DimensionMismatch(a.width(), a.height(), b.width(), b.height()));
    }
    Ok(())
}

fn mean_squared_error(a: &Image, b: &Image) -> f64 {
    let sum: u64 = a
        .as_bytes()
        .iter()
        .zip(b.as_bytes())
        .map(|(&x, &y)| {
            let d = u64::from(x.abs_diff(y));
            d * d
        })
        .sum();
    sum as f64 / a.as_bytes().len() as f64
}

/// Mean over every pixel and channel of the squared difference.
pub fn mse(a: &Image, b: &Image) -> Result<RawScore<'static>> {
    check_dims(a, b)?;
    Ok(RawScore {
        value: mean_squared_error(a, b),
        metric: &MSE,
    })
}

/// `10 log10(255² / MSE)` in decibels; infinite for identical images.
pub fn psnr(a: &Image, b: &Image) -> Result<RawScore<'static>> {
    check_dims(a, b)?;
    let err = mean_squared_error(a, b);
    let value = if err == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK_SQUARED / err).log10()
    };
    Ok(RawScore { value, metric: &PSNR })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_examples() {
        let a = Image::filled(4, 3, [0; 3]);
        let b = Image::filled(4, 3, [255; 3]);
        assert_eq!(mse(&a, &a).unwrap().value, 0.0);
        assert_eq!(mse(&a, &b).unwrap().value, 65025.0);
        let p = Image::filled(1, 1, [100, 100, 100]);
        let q = Image::filled(1, 1, [110, 100, 100]);
        assert!((mse(&p, &q).unwrap().value - 100.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn psnr_examples() {
        let a = Image::filled(4, 3, [0; 3]);
        let b = Image::filled(4, 3, [255; 3]);
        assert_eq!(psnr(&a, &a).unwrap().value, f64::INFINITY);
        assert_eq!(psnr(&a, &b).unwrap().value, 0.0);
        // every channel differs by 10 -> MSE 100
        let c = Image::filled(2, 2, [50; 3]);
        let d = Image::filled(2, 2, [60; 3]);
        assert!((psnr(&c, &d).unwrap().value - 28.130_803_608_679_1).abs() < 1e-9);
    }

    #[test]
    fn mismatched_dimensions() {
        let a = Image::filled(4, 3, [0; 3]);
        let b = Image::filled(3, 4, [0; 3]);
        assert!(matches!(mse(&a, &b), Err(Error::DimensionMismatch(4, 3, 3, 4))));
        assert!(psnr(&a, &b).is_err());
    }
}
