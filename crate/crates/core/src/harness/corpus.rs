//! Deterministic stand-in corpus of building-like scenes.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{quantize, save_image, Image};
use crate::seed::{self, cell_seed, Rng};

/// One scene: gradient sky, value-noise texture, a checkerboard patch and
/// a row of windowed rectangles. Pure function of its arguments.
pub fn synthesize_image(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = seed::rng(seed);
    let (w, h) = (width as f64, height as f64);

    let top: [f64; 3] = std::array::from_fn(|_| rng.gen_range(60.0..230.0));
    let bottom: [f64; 3] = std::array::from_fn(|_| rng.gen_range(20.0..200.0));
    let angle = rng.gen_range(-0.6..0.6f64);
    let (dx, dy) = (angle.sin(), angle.cos());

    let noise = ValueNoise::new(width, height, &mut rng);
    let noise_amp = rng.gen_range(25.0..45.0);
    let tint: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.6..1.0));

    let mut canvas: Vec<f64> = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        for x in 0..width {
            let t = ((x as f64 / w - 0.5) * dx + (y as f64 / h) * dy).clamp(0.0, 1.0);
            let n = noise.sample(x, y);
            for c in 0..3 {
                canvas.push(top[c] * (1.0 - t) + bottom[c] * t + noise_amp * tint[c] * n);
            }
        }
    }

    let mut paint =
        |x0: usize, y0: usize, x1: usize, y1: usize, f: &mut dyn FnMut(usize, usize) -> Option<[f64; 3]>| {
            for y in y0.min(height)..y1.min(height) {
                for x in x0.min(width)..x1.min(width) {
                    if let Some(rgb) = f(x, y) {
                        canvas[(y * width + x) * 3..(y * width + x) * 3 + 3].copy_from_slice(&rgb);
                    }
                }
            }
        };

    // checkerboard patch at random phase and scale
    let cell = rng.gen_range(3..=12usize);
    let (phase_x, phase_y) = (rng.gen_range(0..cell), rng.gen_range(0..cell));
    let pw = rng.gen_range(width / 5..=width / 2 + 1);
    let ph = rng.gen_range(height / 5..=height / 2 + 1);
    let px = rng.gen_range(0..=width.saturating_sub(pw));
    let py = rng.gen_range(0..=height.saturating_sub(ph));
    let light: [f64; 3] = std::array::from_fn(|_| rng.gen_range(150.0..255.0));
    let dark: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..90.0));
    paint(px, py, px + pw, py + ph, &mut |x, y| {
        let parity = ((x + phase_x) / cell + (y + phase_y) / cell) % 2;
        Some(if parity == 0 { light } else { dark })
    });

    // buildings standing on a common ground line
    let ground = (h * rng.gen_range(0.75..0.95)) as usize;
    let buildings = rng.gen_range(3..=7);
    for _ in 0..buildings {
        let bw = ((w * rng.gen_range(0.08..0.25)) as usize).max(3);
        let bh = ((h * rng.gen_range(0.2..0.65)) as usize).max(3);
        let bx = rng.gen_range(0..width.max(1));
        let by = ground.saturating_sub(bh);
        let wall: [f64; 3] = std::array::from_fn(|_| rng.gen_range(40.0..220.0));
        let glass: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..255.0));
        let pitch = rng.gen_range(4..=9usize);
        let pane = rng.gen_range(2..pitch);
        paint(bx, by, bx + bw, ground, &mut |x, y| {
            let (lx, ly) = (x - bx, y - by);
            let window = lx % pitch >= pitch - pane && ly % pitch >= pitch - pane && lx + 1 < bw;
            Some(if window { glass } else { wall })
        });
    }

    Image::from_raw(width, height, canvas.into_iter().map(quantize).collect()).expect("canvas matches dimensions")
}

/// Multi-octave lattice noise in roughly `[-1, 1]`.
struct ValueNoise {
    octaves: Vec<(usize, usize, Vec<f64>, f64)>,
}

impl ValueNoise {
    fn new(width: usize, height: usize, rng: &mut Rng) -> Self {
        let base = rng.gen_range(12..=24usize);
        let mut octaves = Vec::new();
        let (mut cell, mut amp) = (base, 0.55);
        while cell >= 2 {
            let gw = width / cell + 2;
            let gh = height / cell + 2;
            let lattice = (0..gw * gh).map(|_| rng.gen_range(-1.0..1.0)).collect();
            octaves.push((cell, gw, lattice, amp));
            cell /= 2;
            amp *= 0.6;
        }
        Self { octaves }
    }

    fn sample(&self, x: usize, y: usize) -> f64 {
        let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
        self.octaves
            .iter()
            .map(|(cell, gw, lattice, amp)| {
                let (gx, gy) = (x / cell, y / cell);
                let fx = smooth((x % cell) as f64 / *cell as f64);
                let fy = smooth((y % cell) as f64 / *cell as f64);
                let at = |i: usize, j: usize| lattice[j * gw + i];
                let top = at(gx, gy) * (1.0 - fx) + at(gx + 1, gy) * fx;
                let bottom = at(gx, gy + 1) * (1.0 - fx) + at(gx + 1, gy + 1) * fx;
                amp * (top * (1.0 - fy) + bottom * fy)
            })
            .sum()
    }
}

pub(crate) fn corpus_image_id(index: usize) -> String {
    format!("img_{index:04}")
}

/// Writes `count` scenes as `img_0000.png`, `img_0001.png`, ... and returns their ids.
pub fn generate_test_corpus(
    out_dir: impl AsRef<Path>,
    count: usize,
    width: usize,
    height: usize,
    seed: u64,
) -> Result<Vec<String>> {
    let out_dir = out_dir.as_ref();
    if count == 0 {
        return Err(Error::Domain("corpus count must be at least 1".into()));
    }
    if width == 0 || height == 0 {
        return Err(Error::Domain(format!(
            "corpus size must be positive, got {width}x{height}"
        )));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let id = corpus_image_id(i);
            let img = synthesize_image(width, height, cell_seed(seed, &id, "corpus", 0));
            let path: PathBuf = out_dir.join(format!("{id}.png"));
            save_image(&img, &path)?;
            Ok(id)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_seed_sensitive() {
        assert_eq!(synthesize_image(64, 48, 3), synthesize_image(64, 48, 3));
        assert_ne!(synthesize_image(64, 48, 3), synthesize_image(64, 48, 4));
    }

    #[test]
    fn scenes_are_textured() {
        let img = synthesize_image(128, 128, 9);
        let distinct: std::collections::HashSet<_> = img.pixels().collect();
        assert!(distinct.len() > 1000, "{}", distinct.len());
    }

    #[test]
    fn tiny_sizes_do_not_panic() {
        for (w, h) in [(1, 1), (2, 7), (13, 3)] {
            assert_eq!(synthesize_image(w, h, 0).dimensions(), (w, h));
        }
    }

    #[test]
    fn zero_count_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            generate_test_corpus(dir.path(), 0, 8, 8, 1),
            Err(Error::Domain(_))
        ));
    }
}
