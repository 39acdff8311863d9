//! Smooth cutoff windows shared by the boundary filter and the aperture
//! predictor, so both see identical tapers.

use std::f64::consts::PI;

/// Tukey window on `[a, b]` with cosine ramps covering `fraction` of the
/// length at each end. Zero outside.
pub fn tukey(x: f64, a: f64, b: f64, fraction: f64) -> f64 {
    if x < a || x > b || b <= a {
        return 0.0;
    }
    let ramp = fraction.clamp(0.0, 0.5) * (b - a);
    if ramp <= 0.0 {
        return 1.0;
    }
    let d = (x - a).min(b - x);
    if d >= ramp {
        1.0
    } else {
        0.5 * (1.0 - (PI * d / ramp).cos())
    }
}

/// Grazing cutoff as a function of `s = |sin| of the angle from the normal`
/// (equivalently `c|xi'|/|omega|`): 1 for `s <= 1 - delta`, 0 for
/// `s >= 1 - delta/2`, cosine in between.
pub fn grazing_rolloff(s: f64, delta: f64) -> f64 {
    let s = s.abs();
    let full = 1.0 - delta;
    let zero = 1.0 - 0.5 * delta;
    if s <= full {
        1.0
    } else if s >= zero {
        0.0
    } else {
        0.5 * (1.0 + (PI * (s - full) / (zero - full)).cos())
    }
}

/// Band weight: zero outside `[lo, hi]`, cosine ramps of `fraction * (hi - lo)`
/// at both ends, one on the plateau.
pub fn band_weight(f: f64, lo: f64, hi: f64, fraction: f64) -> f64 {
    if f <= lo || f >= hi {
        return 0.0;
    }
    let ramp = fraction * (hi - lo);
    if ramp <= 0.0 {
        return 1.0;
    }
    let d = (f - lo).min(hi - f);
    if d >= ramp {
        1.0
    } else {
        0.5 * (1.0 - (PI * d / ramp).cos())
    }
}
