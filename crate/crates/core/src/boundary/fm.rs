use num_complex::Complex64;

use crate::error::{Result, RtmError};
use crate::fdsolver::SurfaceGather;
use crate::fft::{bin_frequency, fft2, ifft2_normalized, Direction};
use crate::modelkit::taper::{grazing_rolloff, tukey};

/// Time mute around the predicted direct arrival `delay + |x1 - x_s| / c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuteSpec {
    pub source_x1: f64,
    pub delay: f64,
    /// Fully muted within this many seconds of the arrival; cosine ramp over
    /// the same length beyond.
    pub half_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmParams {
    pub c_surface: f64,
    pub taper_fraction: f64,
    pub grazing_delta: f64,
    pub mute: Option<MuteSpec>,
    /// Highest frequency that must be resolved, Hz.
    pub f_max: f64,
    /// Zero-pad both axes to twice their length before transforming.
    pub pad: bool,
}

impl FmParams {
    pub fn validate(&self, d: &SurfaceGather) -> Result<()> {
        if !(self.grazing_delta > 0.0 && self.grazing_delta < 1.0) {
            return Err(RtmError::Config(format!("grazing delta {} outside (0, 1)", self.grazing_delta)));
        }
        if !(0.0..=0.5).contains(&self.taper_fraction) {
            return Err(RtmError::Config(format!("taper fraction {} outside [0, 0.5]", self.taper_fraction)));
        }
        if !(self.c_surface > 0.0) {
            return Err(RtmError::Config("surface velocity must be positive".into()));
        }
        if self.f_max >= 0.5 / d.dt {
            return Err(RtmError::Config(format!(
                "band edge {} Hz aliases in time (Nyquist {} Hz)",
                self.f_max,
                0.5 / d.dt
            )));
        }
        if self.f_max >= self.c_surface / (2.0 * d.dx_rec) {
            return Err(RtmError::Config(format!(
                "band edge {} Hz aliases along the array (limit {} Hz)",
                self.f_max,
                self.c_surface / (2.0 * d.dx_rec)
            )));
        }
        Ok(())
    }
}

/// Scattered data: elementwise `d_full - d_background`.
pub fn remove_direct(d_full: &SurfaceGather, d_background: &SurfaceGather) -> Result<SurfaceGather> {
    d_full.ensure_same_geometry(d_background)?;
    let mut out = d_full.clone();
    out.data.iter_mut().zip(&d_background.data).for_each(|(a, b)| *a -= b);
    Ok(out)
}

/// Symbol `-2 i w / c sqrt(max(0, 1 - c^2 xi^2 / w^2))` times the grazing
/// rolloff; zero at `w = 0`.
pub fn fm_symbol(xi: f64, omega: f64, c: f64, delta: f64) -> Complex64 {
    if omega == 0.0 {
        return Complex64::default();
    }
    let s = c * xi.abs() / omega.abs();
    let root = (1.0 - s * s).max(0.0).sqrt();
    Complex64::new(0.0, -2.0 * omega / c) * (root * grazing_rolloff(s, delta))
}

/// Multiply a `(t, x1)` spectrum (rows of length `nx`, one per time bin) by
/// the symbol. The time Nyquist bin is zeroed.
pub fn fm_filter_spectrum(spec: &mut [Complex64], nx: usize, nt: usize, dx: f64, dt: f64, c: f64, delta: f64) {
    crate::par::for_each_chunk_mut(spec, nx, |k, row| {
        let omega = bin_frequency(k, nt, dt);
        let nyquist = nt.is_multiple_of(2) && k == nt / 2;
        for (m, v) in row.iter_mut().enumerate() {
            if nyquist {
                *v = Complex64::default();
            } else {
                *v *= fm_symbol(bin_frequency(m, nx, dx), omega, c, delta);
            }
        }
    });
}

/// Taper along the array, f-k filter, optional direct-arrival mute.
pub fn apply_fm(d: &SurfaceGather, p: &FmParams) -> Result<SurfaceGather> {
    p.validate(d)?;
    let (nt, nx) = (d.nt, d.nrec);
    let (mt, mx) = if p.pad { (2 * nt, 2 * nx) } else { (nt, nx) };
    let (a, b) = (d.x1(0), d.x1(nx - 1));
    let taper: Vec<f64> = (0..nx).map(|r| tukey(d.x1(r), a, b, p.taper_fraction)).collect();
    let mut spec = vec![Complex64::default(); mt * mx];
    for k in 0..nt {
        for r in 0..nx {
            spec[k * mx + r] = Complex64::new(d.at(k, r) * taper[r], 0.0);
        }
    }
    fft2(&mut spec, mx, mt, Direction::Forward);
    fm_filter_spectrum(&mut spec, mx, mt, d.dx_rec, d.dt, p.c_surface, p.grazing_delta);
    ifft2_normalized(&mut spec, mx, mt);
    let mut out = SurfaceGather::like(d);
    for k in 0..nt {
        for r in 0..nx {
            out.data[k * nx + r] = spec[k * mx + r].re;
        }
    }
    if let Some(m) = &p.mute {
        mute_direct(&mut out, m, p.c_surface);
    }
    Ok(out)
}

/// Zero the samples near the direct arrival, with cosine shoulders.
pub fn mute_direct(d: &mut SurfaceGather, m: &MuteSpec, c: f64) {
    let w = m.half_width;
    for r in 0..d.nrec {
        let td = m.delay + (d.x1(r) - m.source_x1).abs() / c;
        for k in 0..d.nt {
            let dist = (k as f64 * d.dt - td).abs();
            let keep = if dist <= w {
                0.0
            } else if dist >= 2.0 * w {
                1.0
            } else {
                0.5 * (1.0 - (std::f64::consts::PI * (dist - w) / w).cos())
            };
            d.data[k * d.nrec + r] *= keep;
        }
    }
}
