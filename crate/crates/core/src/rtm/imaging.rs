use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use super::band::ImagingBand;
use crate::error::{Result, RtmError};
use crate::fdsolver::FreqSlices;
use crate::modelkit::{Grid2D, ScalarField};
use crate::par;
use crate::raytools::GoFields;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Ratio,
    Excitation,
    XcorrBaseline,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Ratio => "ratio",
            Condition::Excitation => "excitation",
            Condition::XcorrBaseline => "xcorr-baseline",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageResult {
    pub image: ScalarField,
    pub condition: Condition,
    pub band: (f64, f64),
    pub epsilon: f64,
    /// Names of the masks applied to the image.
    pub masks: Vec<String>,
}

impl ImageResult {
    /// Zero every cell the source rays do not reach.
    pub fn apply_shadow(&mut self, go: &GoFields) -> Result<()> {
        let (gi, gj) = offset_in(go.grid(), self.image.grid())?;
        let g = *self.image.grid();
        let goi = *go.grid();
        for j in 0..g.nx2 {
            for i in 0..g.nx1 {
                if go.shadow_mask[goi.idx(gi + i, gj + j)] {
                    self.image.set(i, j, 0.0);
                }
            }
        }
        if !self.masks.iter().any(|m| m == "shadow") {
            self.masks.push("shadow".into());
        }
        Ok(())
    }
}

/// Cell offset of `window` inside `full`; both must share the lattice.
pub(crate) fn offset_in(full: &Grid2D, window: &Grid2D) -> Result<(usize, usize)> {
    let fi = (window.origin.0 - full.origin.0) / full.dx;
    let fj = (window.origin.1 - full.origin.1) / full.dx;
    let (i0, j0) = (fi.round(), fj.round());
    let aligned = (fi - i0).abs() < 1e-6 && (fj - j0).abs() < 1e-6 && (window.dx - full.dx).abs() < 1e-9 * full.dx;
    if !aligned || i0 < 0.0 || j0 < 0.0 || i0 as usize + window.nx1 > full.nx1 || j0 as usize + window.nx2 > full.nx2 {
        return Err(RtmError::GridMismatch("image window is not a sub-grid of the ray grid".into()));
    }
    Ok((i0 as usize, j0 as usize))
}

/// Centered differences of a complex field (one-sided on the edges).
pub fn gradient(u: &[Complex64], grid: &Grid2D) -> [Vec<Complex64>; 2] {
    let (n1, n2, h) = (grid.nx1, grid.nx2, grid.dx);
    let d = |a: Complex64, b: Complex64, span: usize| (b - a) / (span as f64 * h);
    let mut g1 = vec![Complex64::default(); u.len()];
    let mut g2 = vec![Complex64::default(); u.len()];
    par::for_each_chunk_mut(&mut g1, n1, |j, row| {
        let base = j * n1;
        for (i, v) in row.iter_mut().enumerate() {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n1 - 1));
            *v = d(u[base + a], u[base + b], b - a);
        }
    });
    par::for_each_chunk_mut(&mut g2, n1, |j, row| {
        let (a, b) = (j.saturating_sub(1), (j + 1).min(n2 - 1));
        for (i, v) in row.iter_mut().enumerate() {
            *v = d(u[a * n1 + i], u[b * n1 + i], b - a);
        }
    });
    [g1, g2]
}

fn check_inputs(slices: &[&FreqSlices], band: &ImagingBand, c: Option<&ScalarField>) -> Result<()> {
    for s in slices {
        band.check_matches(&s.freqs)?;
        s.grid.ensure_same(&slices[0].grid, "slices")?;
    }
    if let Some(c) = c {
        c.grid().ensure_same(&slices[0].grid, "velocity window")?;
    }
    Ok(())
}

/// Sum per-frequency partial images in frequency order, so the result does
/// not depend on how the frequencies were scheduled.
fn reduce(grid: Grid2D, parts: Vec<Option<Vec<f64>>>) -> Result<ScalarField> {
    let mut acc = vec![0.0; grid.len()];
    for p in parts.into_iter().flatten() {
        acc.iter_mut().zip(p).for_each(|(a, v)| *a += v);
    }
    ScalarField::new(grid, acc)
}

/// Gradient-ratio image: for each frequency,
/// `Omega / (i w |g|^2) (conj(g) u - c^2 / w^2 grad conj(g) . grad u)`,
/// summed over positive frequencies as twice the real part times `df`.
/// `|g|^2` is floored at `epsilon * max |g|^2` per frequency.
pub fn image_ratio(
    g: &FreqSlices,
    ur: &FreqSlices,
    c: &ScalarField,
    band: &ImagingBand,
    epsilon: f64,
) -> Result<ImageResult> {
    check_inputs(&[g, ur], band, Some(c))?;
    let grid = g.grid;
    let cv = c.values();
    let parts = par::map_range(band.len(), |f| {
        let weight = band.weights[f];
        if weight == 0.0 {
            return None;
        }
        let w = 2.0 * PI * band.freqs[f];
        let (gs, us) = (&g.data[f], &ur.data[f]);
        let floor = epsilon * gs.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        let [gg1, gg2] = gradient(gs, &grid);
        let [gu1, gu2] = gradient(us, &grid);
        let scale = 2.0 * weight * band.df;
        let iw = Complex64::new(0.0, w);
        Some(
            (0..grid.len())
                .map(|k| {
                    let den = gs[k].norm_sqr() + floor;
                    if den == 0.0 {
                        return 0.0;
                    }
                    let c2w2 = cv[k] * cv[k] / (w * w);
                    let term = gs[k].conj() * us[k] - (gg1[k].conj() * gu1[k] + gg2[k].conj() * gu2[k]) * c2w2;
                    scale * (term / (iw * den)).re
                })
                .collect(),
        )
    });
    Ok(ImageResult {
        image: reduce(grid, parts)?,
        condition: Condition::Ratio,
        band: (band.f_lo, band.f_hi),
        epsilon,
        masks: vec![],
    })
}

/// `(i w)^(-3/2)` on the principal branch, `w > 0`.
pub(crate) fn iw_pow_m32(w: f64) -> Complex64 {
    Complex64::from_polar(w.powf(-1.5), -3.0 * FRAC_PI_4)
}

/// Excitation-time image: per frequency
/// `Omega (i w)^(-3/2) [i w u + c n_s . grad u] / (A_s W(w)) e^{i w T_s}`,
/// twice the real part summed over the band. `wavelet` is the source
/// spectrum on the band frequencies; it is divided out because the
/// traveltime/amplitude fields describe an impulsive source.
pub fn image_excitation(
    ur: &FreqSlices,
    go: &GoFields,
    c: &ScalarField,
    band: &ImagingBand,
    wavelet: &[Complex64],
) -> Result<ImageResult> {
    check_inputs(&[ur], band, Some(c))?;
    if wavelet.len() != band.len() {
        return Err(RtmError::GridMismatch("wavelet spectrum length differs from the band".into()));
    }
    let grid = ur.grid;
    let (oi, oj) = offset_in(go.grid(), &grid)?;
    let gg = *go.grid();
    let cv = c.values();
    // per-cell ray quantities, None where the cell has no single arrival
    let cells: Vec<Option<(f64, f64, [f64; 2])>> = (0..grid.len())
        .map(|k| {
            let (i, j) = grid.ij(k);
            let (gi, gj) = (oi + i, oj + j);
            let idx = gg.idx(gi, gj);
            let a = go.a_s.at(gi, gj);
            (go.valid(idx) && a > 0.0).then(|| (go.t_s.at(gi, gj), a, go.ns_at(gi, gj)))
        })
        .collect();
    let parts = par::map_range(band.len(), |f| {
        let weight = band.weights[f];
        if weight == 0.0 || wavelet[f].norm() == 0.0 {
            return None;
        }
        let w = 2.0 * PI * band.freqs[f];
        let us = &ur.data[f];
        let [gu1, gu2] = gradient(us, &grid);
        let factor = iw_pow_m32(w) / wavelet[f] * (2.0 * weight * band.df);
        let iw = Complex64::new(0.0, w);
        Some(
            (0..grid.len())
                .map(|k| match cells[k] {
                    None => 0.0,
                    Some((ts, a, ns)) => {
                        let h = iw * us[k] + (gu1[k] * ns[0] + gu2[k] * ns[1]) * cv[k];
                        (factor * h * Complex64::from_polar(1.0 / a, w * ts)).re
                    }
                })
                .collect(),
        )
    });
    let mut res = ImageResult {
        image: reduce(grid, parts)?,
        condition: Condition::Excitation,
        band: (band.f_lo, band.f_hi),
        epsilon: 0.0,
        masks: vec![],
    };
    res.apply_shadow(go)?;
    Ok(res)
}

/// Plain crosscorrelation baseline `sum Omega 2 Re(conj(g) u) df`.
pub fn image_xcorr(g: &FreqSlices, ur: &FreqSlices, band: &ImagingBand) -> Result<ImageResult> {
    check_inputs(&[g, ur], band, None)?;
    let grid = g.grid;
    let parts = par::map_range(band.len(), |f| {
        let weight = band.weights[f];
        (weight != 0.0).then(|| {
            let s = 2.0 * weight * band.df;
            g.data[f].iter().zip(&ur.data[f]).map(|(a, b)| s * (a.conj() * b).re).collect()
        })
    });
    Ok(ImageResult {
        image: reduce(grid, parts)?,
        condition: Condition::XcorrBaseline,
        band: (band.f_lo, band.f_hi),
        epsilon: 0.0,
        masks: vec![],
    })
}
