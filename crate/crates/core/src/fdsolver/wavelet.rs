use std::f64::consts::PI;

/// Ricker wavelet `(1 - 2 pi^2 f^2 t^2) exp(-pi^2 f^2 t^2)`, peak 1 at `t = 0`.
#[inline]
pub fn ricker(t: f64, f_peak: f64) -> f64 {
    let a = (PI * f_peak * t).powi(2);
    (1.0 - 2.0 * a) * (-a).exp()
}

/// `ricker(k dt - delay)` for `k = 0..nt`.
pub fn ricker_series(f_peak: f64, delay: f64, dt: f64, nt: usize) -> Vec<f64> {
    (0..nt).map(|k| ricker(k as f64 * dt - delay, f_peak)).collect()
}
