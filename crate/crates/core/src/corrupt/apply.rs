use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use super::kind::{CorruptionKind, CorruptionSpec};
use super::schedule;
use super::shapes::{diamond_square, feather, Ellipse};
use crate::error::Result;
use crate::image::{gaussian_blur, hsv_to_rgb_pixel, luma, quantize, resample, rgb_to_hsv_pixel, Filter, Image};
use crate::seed::{self, Rng};

/// Applies one corruption. Output dimensions always match the input and
/// severity 0 returns an exact copy.
///
/// Stochastic kinds draw every random number from a generator seeded with
/// `spec.seed`, so the result is a pure function of `(img, spec)`.
pub fn apply_corruption(img: &Image, spec: &CorruptionSpec) -> Result<Image> {
    spec.validate()?;
    let s = spec.severity;
    if s == 0 {
        return Ok(img.clone());
    }
    let mut rng = seed::rng(spec.seed);
    let out = match spec.kind {
        CorruptionKind::Blur => gaussian_blur(img, schedule::blur_sigma(s))?,
        CorruptionKind::Brightness => {
            let k = schedule::brightness_scale(s);
            img.map_channels(|v| quantize(f64::from(v) * k))
        }
        CorruptionKind::ColorShift => hue_shift(img, schedule::hue_rotation_degrees(s)),
        CorruptionKind::Contrast => {
            let f = schedule::contrast_factor(s);
            img.map_channels(|v| quantize(128.0 + f * (f64::from(v) - 128.0)))
        }
        CorruptionKind::Floaters => floaters(img, s, &mut rng),
        CorruptionKind::Grayscale => {
            let t = schedule::grayscale_weight(s);
            img.map_pixels(|p| {
                let l = luma(p);
                p.map(|v| quantize((1.0 - t) * f64::from(v) + t * l))
            })
        }
        CorruptionKind::Pixelation => pixelate(img, schedule::pixelation_factor(s))?,
        CorruptionKind::Rotation => {
            let (w, h) = img.dimensions();
            let rot = Rotation::new(schedule::rotation_degrees(s), w, h);
            remap(img, |x, y| rot.source(x, y))
        }
        CorruptionKind::Saturation => {
            let k = schedule::saturation_scale(s);
            img.map_pixels(|p| {
                let (h, sat, v) = rgb_to_hsv_pixel(p);
                hsv_to_rgb_pixel(h, (sat * k).min(1.0), v).expect("hsv stays in range")
            })
        }
        CorruptionKind::Shadows => shadows(img, s, &mut rng),
        CorruptionKind::Splats => splats(img, s, &mut rng),
        CorruptionKind::Warp => warp(img, s),
        CorruptionKind::Fog => fog(img, s, &mut rng),
        CorruptionKind::GaussianNoise => {
            let normal = Normal::new(0.0, schedule::noise_sigma(s)).expect("finite sigma");
            img.map_channels(|v| quantize(f64::from(v) + normal.sample(&mut rng)))
        }
    };
    Ok(out)
}

fn hue_shift(img: &Image, degrees: f64) -> Image {
    img.map_pixels(|p| {
        let (h, s, v) = rgb_to_hsv_pixel(p);
        let mut h = (h + degrees).rem_euclid(360.0);
        if h >= 360.0 {
            h = 0.0;
        }
        hsv_to_rgb_pixel(h, s, v).expect("hsv stays in range")
    })
}

fn pixelate(img: &Image, factor: f64) -> Result<Image> {
    let (w, h) = img.dimensions();
    let small_w = ((w as f64 / factor).round() as usize).max(1);
    let small_h = ((h as f64 / factor).round() as usize).max(1);
    let small = resample(img, small_w, small_h, Filter::Nearest)?;
    resample(&small, w, h, Filter::Nearest)
}

struct Rotation {
    cos: f64,
    sin: f64,
    cx: f64,
    cy: f64,
}

impl Rotation {
    fn new(degrees: f64, width: usize, height: usize) -> Self {
        let rad = degrees.rem_euclid(360.0).to_radians();
        Self {
            cos: rad.cos(),
            sin: rad.sin(),
            cx: (width as f64 - 1.0) / 2.0,
            cy: (height as f64 - 1.0) / 2.0,
        }
    }

    /// Inverse mapping: where output pixel `(x, y)` samples the source.
    #[inline]
    fn source(&self, x: f64, y: f64) -> (f64, f64) {
        let dx = x - self.cx;
        let dy = y - self.cy;
        (
            self.cx + dx * self.cos + dy * self.sin,
            self.cy - dx * self.sin + dy * self.cos,
        )
    }
}

fn warp(img: &Image, s: u8) -> Image {
    let (w, h) = img.dimensions();
    let rot = Rotation::new(schedule::rotation_degrees(s), w, h);
    let amplitude = schedule::warp_amplitude(s);
    let k = std::f64::consts::TAU / schedule::warp_wavelength(w, h).max(1.0);
    remap(img, |x, y| {
        let (sx, sy) = rot.source(x, y);
        (sx + amplitude * (k * sy).sin(), sy + amplitude * (k * sx).sin())
    })
}

/// Inverse-maps every output pixel through `source` and samples bilinearly;
/// taps that fall outside the frame read as black.
fn remap(img: &Image, source: impl Fn(f64, f64) -> (f64, f64)) -> Image {
    let (w, h) = img.dimensions();
    let tap = |x: i64, y: i64| -> [f64; 3] {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            [0.0; 3]
        } else {
            img.pixel(x as usize, y as usize).map(f64::from)
        }
    };
    Image::from_fn(w, h, |x, y| {
        let (sx, sy) = source(x as f64, y as f64);
        let (x0, y0) = (sx.floor(), sy.floor());
        let (fx, fy) = (sx - x0, sy - y0);
        let (x0, y0) = (x0 as i64, y0 as i64);
        let p00 = tap(x0, y0);
        let p10 = tap(x0 + 1, y0);
        let p01 = tap(x0, y0 + 1);
        let p11 = tap(x0 + 1, y0 + 1);
        std::array::from_fn(|c| {
            let top = p00[c] * (1.0 - fx) + p10[c] * fx;
            let bottom = p01[c] * (1.0 - fx) + p11[c] * fx;
            quantize(top * (1.0 - fy) + bottom * fy)
        })
    })
}

/// Mutable float working copy used by the compositing corruptions.
struct Canvas {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Canvas {
    fn from_image(img: &Image) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            data: img.as_bytes().iter().map(|&v| f64::from(v)).collect(),
        }
    }

    #[inline]
    fn blend(&mut self, x: usize, y: usize, color: [f64; 3], alpha: f64) {
        let i = (y * self.width + x) * 3;
        for (d, c) in self.data[i..i + 3].iter_mut().zip(color) {
            *d = *d * (1.0 - alpha) + c * alpha;
        }
    }

    #[inline]
    fn darken(&mut self, x: usize, y: usize, amount: f64) {
        let i = (y * self.width + x) * 3;
        for v in &mut self.data[i..i + 3] {
            *v *= 1.0 - amount;
        }
    }

    fn into_image(self) -> Image {
        Image::from_raw(self.width, self.height, self.data.into_iter().map(quantize).collect())
            .expect("canvas keeps its dimensions")
    }
}

fn floaters(img: &Image, s: u8, rng: &mut Rng) -> Image {
    let mut canvas = Canvas::from_image(img);
    let (w, h) = img.dimensions();
    for _ in 0..schedule::floater_count(s) {
        let e = Ellipse::random(rng, w, h, schedule::FLOATER_RADIUS);
        let tone = f64::from(rng.gen_range(140u8..=255));
        e.for_each_inside(w, h, |x, y, d| {
            canvas.blend(x, y, [tone; 3], schedule::FLOATER_OPACITY * feather(d, 0.3));
        });
    }
    canvas.into_image()
}

fn shadows(img: &Image, s: u8, rng: &mut Rng) -> Image {
    let mut canvas = Canvas::from_image(img);
    let (w, h) = img.dimensions();
    let opacity = schedule::shadow_opacity(s);
    for _ in 0..schedule::shadow_count(s) {
        let e = Ellipse::random(rng, w, h, schedule::SHADOW_RADIUS);
        e.for_each_inside(w, h, |x, y, d| canvas.darken(x, y, opacity * feather(d, 0.5)));
    }
    canvas.into_image()
}

fn splats(img: &Image, s: u8, rng: &mut Rng) -> Image {
    let mut out = img.clone();
    let (w, h) = img.dimensions();
    for _ in 0..schedule::splat_count(s) {
        let e = Ellipse::random(rng, w, h, schedule::SPLAT_RADIUS);
        let color: [u8; 3] = rng.gen();
        e.for_each_inside(w, h, |x, y, _| out.set_pixel(x, y, color));
    }
    out
}

fn fog(img: &Image, s: u8, rng: &mut Rng) -> Image {
    let (w, h) = img.dimensions();
    let field = diamond_square(w, h, rng);
    let weight = schedule::fog_weight(s);
    let mut i = 0;
    img.map_pixels(|p| {
        let tone = 160.0 + 95.0 * field[i];
        i += 1;
        p.map(|v| quantize((1.0 - weight) * f64::from(v) + weight * tone))
    })
}
