//! Scoring and export helpers: trace profiles, windowed correlations,
//! wavenumber content and grayscale previews.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Result, RtmError};
use crate::fft::{bin_frequency, fft2, Direction};
use crate::modelkit::config::Axis;
use crate::modelkit::taper::tukey;
use crate::modelkit::ScalarField;

/// Zero-lag normalized correlation; 0 when either side vanishes.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let aa: f64 = a.iter().map(|x| x * x).sum();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    if aa == 0.0 || bb == 0.0 {
        0.0
    } else {
        (ab / (aa * bb).sqrt()).clamp(-1.0, 1.0)
    }
}

/// `|recon| / |truth|` in the L2 sense.
pub fn amplitude_ratio(truth: &[f64], recon: &[f64]) -> f64 {
    let t: f64 = truth.iter().map(|x| x * x).sum();
    let r: f64 = recon.iter().map(|x| x * x).sum();
    if t == 0.0 {
        f64::NAN
    } else {
        (r / t).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceComparison {
    pub axis: Axis,
    pub coord: f64,
    /// Coordinate along the profile.
    pub positions: Vec<f64>,
    pub truth: Vec<f64>,
    pub recon: Vec<f64>,
    pub amplitude_ratio: f64,
    pub correlation: f64,
}

/// Profiles of both fields along the grid line nearest `coord`, limited to
/// `window` (meters along the profile) when given.
pub fn compare_traces(
    truth: &ScalarField,
    image: &ScalarField,
    axis: Axis,
    coord: f64,
    window: Option<[f64; 2]>,
) -> Result<TraceComparison> {
    let g = *truth.grid();
    g.ensure_same(image.grid(), "image")?;
    let (fi, fj) = g.frac_index(coord, coord);
    let line = match axis {
        Axis::X1 => fi,
        Axis::X2 => fj,
    };
    let n_line = match axis {
        Axis::X1 => g.nx1,
        Axis::X2 => g.nx2,
    };
    let l = line.round();
    if !(l >= 0.0 && l <= (n_line - 1) as f64 && (line - l).abs() <= 0.5 + 1e-9) {
        return Err(RtmError::Precondition(format!("{axis:?} = {coord} lies outside the grid")));
    }
    let l = l as usize;
    let (mut positions, mut t, mut r) = (Vec::new(), Vec::new(), Vec::new());
    let n_along = match axis {
        Axis::X1 => g.nx2,
        Axis::X2 => g.nx1,
    };
    for k in 0..n_along {
        let (i, j) = match axis {
            Axis::X1 => (l, k),
            Axis::X2 => (k, l),
        };
        let (x1, x2) = g.coords(i, j);
        let s = if axis == Axis::X1 { x2 } else { x1 };
        if window.is_some_and(|w| s < w[0] - 1e-9 || s > w[1] + 1e-9) {
            continue;
        }
        positions.push(s);
        t.push(truth.at(i, j));
        r.push(image.at(i, j));
    }
    if positions.is_empty() {
        return Err(RtmError::Precondition("trace window holds no samples".into()));
    }
    Ok(TraceComparison {
        axis,
        coord,
        amplitude_ratio: amplitude_ratio(&t, &r),
        correlation: correlation(&t, &r),
        positions,
        truth: t,
        recon: r,
    })
}

/// Values of both fields inside `bbox = [x1a, x1b, x2a, x2b]`, skipping
/// cells inside any of `exclude`.
pub fn box_values(a: &ScalarField, b: &ScalarField, bbox: [f64; 4], exclude: &[[f64; 4]]) -> (Vec<f64>, Vec<f64>) {
    let g = *a.grid();
    let inside = |bx: &[f64; 4], x1: f64, x2: f64| x1 >= bx[0] && x1 <= bx[1] && x2 >= bx[2] && x2 <= bx[3];
    let (mut va, mut vb) = (Vec::new(), Vec::new());
    for j in 0..g.nx2 {
        for i in 0..g.nx1 {
            let (x1, x2) = g.coords(i, j);
            if inside(&bbox, x1, x2) && !exclude.iter().any(|e| inside(e, x1, x2)) {
                va.push(a.at(i, j));
                vb.push(b.at(i, j));
            }
        }
    }
    (va, vb)
}

/// Fraction of the field's spectral energy at wavenumbers below `k_cut`
/// (rad/m), the mean removed first.
pub fn low_wavenumber_fraction(f: &ScalarField, k_cut: f64) -> f64 {
    let g = *f.grid();
    let mean = f.values().iter().sum::<f64>() / g.len() as f64;
    let mut s: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    fft2(&mut s, g.nx1, g.nx2, Direction::Forward);
    let (mut low, mut total) = (0.0, 0.0);
    for j in 0..g.nx2 {
        let k2 = bin_frequency(j, g.nx2, g.dx);
        for i in 0..g.nx1 {
            let k1 = bin_frequency(i, g.nx1, g.dx);
            let e = s[j * g.nx1 + i].norm_sqr();
            total += e;
            if k1.hypot(k2) < k_cut {
                low += e;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        low / total
    }
}

/// [`low_wavenumber_fraction`] after a Tukey taper over the outer tenth of
/// each edge and a cosine fade to zero inside each `exclude` box (ramp of
/// `ramp` meters outside the box), so neither the frame nor excluded
/// regions leak into the low band.
pub fn low_wavenumber_fraction_windowed(f: &ScalarField, k_cut: f64, exclude: &[[f64; 4]], ramp: f64) -> f64 {
    let g = *f.grid();
    let (a, b) = (g.x1(0), g.x1(g.nx1 - 1));
    let (c, d) = (g.x2(0), g.x2(g.nx2 - 1));
    let mut w = f.clone();
    for j in 0..g.nx2 {
        for i in 0..g.nx1 {
            let (x1, x2) = g.coords(i, j);
            let mut v = tukey(x1, a, b, 0.2) * tukey(x2, c, d, 0.2);
            for e in exclude {
                let dist = (e[0] - x1).max(x1 - e[1]).max((e[2] - x2).max(x2 - e[3]));
                let s = (dist / ramp).clamp(0.0, 1.0);
                v *= 0.5 - 0.5 * (std::f64::consts::PI * s).cos();
            }
            w.set(i, j, f.at(i, j) * v);
        }
    }
    low_wavenumber_fraction(&w, k_cut)
}

/// 8-bit gray levels, symmetric about zero: `v >= 0` maps to
/// `128 + floor(128 v / clip)` (at most 255) and `v < 0` to `255` minus the
/// level of `|v|`, so negating the field maps `p` to `255 - p` (nonzero
/// values) and zero is mid-gray. `clip` is the given percentile of `|v|`.
pub fn pgm_levels(f: &ScalarField, clip_percentile: f64) -> Vec<u8> {
    let mut mags: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let rank = ((clip_percentile.clamp(0.0, 100.0) / 100.0) * mags.len() as f64).ceil() as usize;
    let clip = mags[rank.clamp(1, mags.len()) - 1];
    let level = |m: f64| -> u8 {
        if clip == 0.0 {
            return 128;
        }
        128 + ((128.0 * m / clip).floor() as i64).clamp(0, 127) as u8
    };
    f.values().iter().map(|&v| if v >= 0.0 { level(v) } else { 255 - level(-v) }).collect()
}

/// Binary PGM with one row per `x2` line, shallowest first.
pub fn pgm_bytes(f: &ScalarField, clip_percentile: f64) -> Vec<u8> {
    let g = f.grid();
    let mut out = format!("P5\n{} {}\n255\n", g.nx1, g.nx2).into_bytes();
    out.extend(pgm_levels(f, clip_percentile));
    out
}

pub fn export_pgm(f: &ScalarField, path: impl AsRef<Path>, clip_percentile: f64) -> Result<()> {
    std::fs::write(path, pgm_bytes(f, clip_percentile))?;
    Ok(())
}
