//! Rotated ellipses and a diamond-square noise field.

use rand::Rng as _;

use crate::seed::Rng;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Ellipse {
    pub cx: f64,
    pub cy: f64,
    pub rx: f64,
    pub ry: f64,
    cos: f64,
    sin: f64,
}

impl Ellipse {
    pub fn new(cx: f64, cy: f64, rx: f64, ry: f64, angle: f64) -> Self {
        Self {
            cx,
            cy,
            rx,
            ry,
            cos: angle.cos(),
            sin: angle.sin(),
        }
    }

    /// Random ellipse centered anywhere in the frame, radii drawn from
    /// `radius_frac` times the shorter side.
    pub fn random(rng: &mut Rng, width: usize, height: usize, radius_frac: (f64, f64)) -> Self {
        let side = width.min(height) as f64;
        let (lo, hi) = (radius_frac.0 * side, radius_frac.1 * side);
        let cx = rng.gen_range(0.0..width as f64);
        let cy = rng.gen_range(0.0..height as f64);
        let rx = rng.gen_range(lo..=hi).max(0.5);
        let ry = rng.gen_range(lo..=hi).max(0.5);
        let angle = rng.gen_range(0.0..std::f64::consts::PI);
        Self::new(cx, cy, rx, ry, angle)
    }

    /// Normalized radial distance: `<= 1` inside the ellipse.
    #[inline]
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.cx;
        let dy = y - self.cy;
        let u = (dx * self.cos + dy * self.sin) / self.rx;
        let v = (-dx * self.sin + dy * self.cos) / self.ry;
        (u * u + v * v).sqrt()
    }

    /// Pixel rectangle `[x0, x1) x [y0, y1)` that contains the ellipse, clipped to the frame.
    pub fn bounds(&self, width: usize, height: usize) -> (usize, usize, usize, usize) {
        let r = self.rx.max(self.ry).ceil() + 1.0;
        let clip = |v: f64, max: usize| v.clamp(0.0, max as f64) as usize;
        (
            clip(self.cx - r, width),
            clip(self.cx + r + 1.0, width),
            clip(self.cy - r, height),
            clip(self.cy + r + 1.0, height),
        )
    }

    /// Calls `f(x, y, d)` for every pixel whose center lies strictly within distance 1.
    pub fn for_each_inside(&self, width: usize, height: usize, mut f: impl FnMut(usize, usize, f64)) {
        let (x0, x1, y0, y1) = self.bounds(width, height);
        for y in y0..y1 {
            for x in x0..x1 {
                let d = self.distance(x as f64, y as f64);
                if d < 1.0 {
                    f(x, y, d);
                }
            }
        }
    }
}

/// Soft falloff: 1 up to `inner`, smoothstep down to 0 at distance 1.
#[inline]
pub(crate) fn feather(d: f64, inner: f64) -> f64 {
    if d <= inner {
        1.0
    } else if d >= 1.0 {
        0.0
    } else {
        let t = (1.0 - d) / (1.0 - inner);
        t * t * (3.0 - 2.0 * t)
    }
}

/// Diamond-square fractal noise cropped to `width x height`, rescaled to `[0, 1]`.
pub(crate) fn diamond_square(width: usize, height: usize, rng: &mut Rng) -> Vec<f64> {
    let mut n = 1usize;
    while n + 1 < width.max(height) {
        n *= 2;
    }
    let size = n + 1;
    let mut grid = vec![0.0f64; size * size];
    let idx = |x: usize, y: usize| y * size + x;
    for (x, y) in [(0, 0), (n, 0), (0, n), (n, n)] {
        grid[idx(x, y)] = rng.gen_range(-1.0..1.0);
    }
    let mut step = n;
    let mut amplitude = 1.0;
    while step > 1 {
        let half = step / 2;
        // diamond
        for y in (half..size).step_by(step) {
            for x in (half..size).step_by(step) {
                let avg = (grid[idx(x - half, y - half)]
                    + grid[idx(x + half, y - half)]
                    + grid[idx(x - half, y + half)]
                    + grid[idx(x + half, y + half)])
                    / 4.0;
                grid[idx(x, y)] = avg + rng.gen_range(-amplitude..amplitude);
            }
        }
        // square
        for y in (0..size).step_by(half) {
            let x_start = if (y / half).is_multiple_of(2) { half } else { 0 };
            for x in (x_start..size).step_by(step) {
                let mut sum = 0.0;
                let mut count = 0.0;
                if x >= half {
                    sum += grid[idx(x - half, y)];
                    count += 1.0;
                }
                if x + half < size {
                    sum += grid[idx(x + half, y)];
                    count += 1.0;
                }
                if y >= half {
                    sum += grid[idx(x, y - half)];
                    count += 1.0;
                }
                if y + half < size {
                    sum += grid[idx(x, y + half)];
                    count += 1.0;
                }
                grid[idx(x, y)] = sum / count + rng.gen_range(-amplitude..amplitude);
            }
        }
        step = half;
        amplitude *= 0.5;
    }

    let mut field = Vec::with_capacity(width * height);
    for y in 0..height {
        field.extend_from_slice(&grid[y * size..y * size + width]);
    }
    let (lo, hi) = field.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let span = hi - lo;
    if span > 0.0 {
        field.iter_mut().for_each(|v| *v = (*v - lo) / span);
    } else {
        field.iter_mut().for_each(|v| *v = 0.5);
    }
    field
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_aligned_distance() {
        let e = Ellipse::new(10.0, 10.0, 4.0, 2.0, 0.0);
        assert!((e.distance(14.0, 10.0) - 1.0).abs() < 1e-12);
        assert!((e.distance(10.0, 12.0) - 1.0).abs() < 1e-12);
        assert_eq!(e.distance(10.0, 10.0), 0.0);
        let r = Ellipse::new(10.0, 10.0, 4.0, 2.0, std::f64::consts::FRAC_PI_2);
        assert!((r.distance(10.0, 14.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn feather_profile() {
        assert_eq!(feather(0.2, 0.5), 1.0);
        assert_eq!(feather(1.0, 0.5), 0.0);
        let mid = feather(0.75, 0.5);
        assert!((mid - 0.5).abs() < 1e-12);
    }

    #[test]
    fn noise_field_is_normalized_and_seeded() {
        let a = diamond_square(37, 20, &mut crate::seed::rng(3));
        let b = diamond_square(37, 20, &mut crate::seed::rng(3));
        let c = diamond_square(37, 20, &mut crate::seed::rng(4));
        assert_eq!(a.len(), 37 * 20);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(a.contains(&0.0) && a.contains(&1.0));
    }

    #[test]
    fn noise_field_tiny_image() {
        assert_eq!(diamond_square(1, 1, &mut crate::seed::rng(0)), [0.5]);
    }
}
