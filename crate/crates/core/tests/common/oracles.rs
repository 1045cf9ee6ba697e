//! Straight-from-the-formula reference implementations.

#![allow(clippy::needless_range_loop)]

use nvsbench::Image;

fn luma(p: [u8; 3]) -> f64 {
    0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64
}

pub fn mse(a: &Image, b: &Image) -> f64 {
    let sa = a.as_bytes();
    let sb = b.as_bytes();
    let mut sum = 0.0;
    for i in 0..sa.len() {
        let d = sa[i] as f64 - sb[i] as f64;
        sum += d * d;
    }
    sum / sa.len() as f64
}

pub fn psnr(a: &Image, b: &Image) -> f64 {
    let m = mse(a, b);
    if m == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0f64 * 255.0 / m).log10()
    }
}

/// Mean SSIM with an explicit 2-D Gaussian window, one window at a time.
pub fn ssim(a: &Image, b: &Image) -> f64 {
    let (w, h) = a.dimensions();
    let la: Vec<f64> = a.pixels().map(luma).collect();
    let lb: Vec<f64> = b.pixels().map(luma).collect();
    let mut win = [[0.0f64; 11]; 11];
    let mut total = 0.0;
    for (j, row) in win.iter_mut().enumerate() {
        for (i, v) in row.iter_mut().enumerate() {
            let (dx, dy) = (i as f64 - 5.0, j as f64 - 5.0);
            *v = (-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5)).exp();
            total += *v;
        }
    }
    let c1 = (0.01f64 * 255.0).powi(2);
    let c2 = (0.03f64 * 255.0).powi(2);
    let mut acc = 0.0;
    let mut count = 0usize;
    for y0 in 0..=h - 11 {
        for x0 in 0..=w - 11 {
            let (mut ma, mut mb) = (0.0, 0.0);
            for j in 0..11 {
                for i in 0..11 {
                    let k = (y0 + j) * w + x0 + i;
                    ma += win[j][i] / total * la[k];
                    mb += win[j][i] / total * lb[k];
                }
            }
            let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
            for j in 0..11 {
                for i in 0..11 {
                    let k = (y0 + j) * w + x0 + i;
                    let g = win[j][i] / total;
                    va += g * (la[k] - ma) * (la[k] - ma);
                    vb += g * (lb[k] - mb) * (lb[k] - mb);
                    cov += g * (la[k] - ma) * (lb[k] - mb);
                }
            }
            acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            count += 1;
        }
    }
    acc / count as f64
}
