use super::{quantize, Image};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    Nearest,
    Bilinear,
}

/// Resizes with pixel-center alignment: output index `i` samples source
/// coordinate `(i + 0.5) * src / dst - 0.5`, clamped to the image.
pub fn resample(img: &Image, new_w: usize, new_h: usize, filter: Filter) -> Result<Image> {
    if new_w == 0 || new_h == 0 {
        return Err(Error::Domain(format!(
            "resample target must be non-empty, got {new_w}x{new_h}"
        )));
    }
    let (w, h) = img.dimensions();
    if (w, h) == (new_w, new_h) {
        return Ok(img.clone());
    }
    let sx = w as f64 / new_w as f64;
    let sy = h as f64 / new_h as f64;
    let out = match filter {
        Filter::Nearest => {
            let xs: Vec<usize> = (0..new_w)
                .map(|i| (((i as f64 + 0.5) * sx) as usize).min(w - 1))
                .collect();
            let ys: Vec<usize> = (0..new_h)
                .map(|j| (((j as f64 + 0.5) * sy) as usize).min(h - 1))
                .collect();
            Image::from_fn(new_w, new_h, |x, y| img.pixel(xs[x], ys[y]))
        }
        Filter::Bilinear => {
            let taps = |n: usize, src: usize, scale: f64| -> Vec<(usize, usize, f64)> {
                (0..n)
                    .map(|i| {
                        let c = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
                        let i0 = c.floor() as usize;
                        let i1 = (i0 + 1).min(src - 1);
                        (i0, i1, c - i0 as f64)
                    })
                    .collect()
            };
            let xs = taps(new_w, w, sx);
            let ys = taps(new_h, h, sy);
            Image::from_fn(new_w, new_h, |x, y| {
                let (x0, x1, fx) = xs[x];
                let (y0, y1, fy) = ys[y];
                let (p00, p10, p01, p11) = (
                    img.pixel(x0, y0),
                    img.pixel(x1, y0),
                    img.pixel(x0, y1),
                    img.pixel(x1, y1),
                );
                std::array::from_fn(|c| {
                    let top = f64::from(p00[c]) * (1.0 - fx) + f64::from(p10[c]) * fx;
                    let bottom = f64::from(p01[c]) * (1.0 - fx) + f64::from(p11[c]) * fx;
                    quantize(top * (1.0 - fy) + bottom * fy)
                })
            })
        }
    };
    Ok(out)
}
