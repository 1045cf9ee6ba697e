//! Severity schedules. Every parameter is linear in the severity `s` (0..=20).

#[inline]
fn t(severity: u8) -> f64 {
    f64::from(severity) / 20.0
}

pub fn blur_sigma(severity: u8) -> f64 {
    0.25 * f64::from(severity)
}

pub fn brightness_scale(severity: u8) -> f64 {
    1.0 + 0.075 * f64::from(severity)
}

pub fn hue_rotation_degrees(severity: u8) -> f64 {
    9.0 * f64::from(severity)
}

/// Peaks above 1 for low severities and falls below 1 from severity 8 on.
pub fn contrast_factor(severity: u8) -> f64 {
    1.5 - 0.07 * f64::from(severity)
}

pub fn floater_count(severity: u8) -> usize {
    usize::from(severity)
}

pub const FLOATER_OPACITY: f64 = 0.5;
/// Axis radii as fractions of the shorter image side.
pub const FLOATER_RADIUS: (f64, f64) = (0.02, 0.10);

pub fn grayscale_weight(severity: u8) -> f64 {
    t(severity)
}

pub fn pixelation_factor(severity: u8) -> f64 {
    1.0 + f64::from(severity) / 2.0
}

pub fn rotation_degrees(severity: u8) -> f64 {
    18.0 * f64::from(severity)
}

pub fn saturation_scale(severity: u8) -> f64 {
    1.0 + 0.15 * f64::from(severity)
}

pub fn shadow_count(severity: u8) -> usize {
    usize::from(severity).div_ceil(4)
}

pub fn shadow_opacity(severity: u8) -> f64 {
    0.25 + 0.025 * f64::from(severity)
}

pub const SHADOW_RADIUS: (f64, f64) = (0.10, 0.30);

pub fn splat_count(severity: u8) -> usize {
    usize::from(severity)
}

pub const SPLAT_RADIUS: (f64, f64) = (0.03, 0.08);

pub fn warp_amplitude(severity: u8) -> f64 {
    0.5 * f64::from(severity)
}

pub fn warp_wavelength(width: usize, height: usize) -> f64 {
    width.min(height) as f64 / 4.0
}

pub fn fog_weight(severity: u8) -> f64 {
    0.6 * t(severity)
}

pub fn noise_sigma(severity: u8) -> f64 {
    2.5 * f64::from(severity)
}
