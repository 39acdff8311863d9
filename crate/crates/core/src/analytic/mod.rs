//! Closed-form scattering of a plane wave `A δ(t - x2/c)` by a contrast `r`
//! in a homogeneous medium, and the exact inversion of that experiment.
//!
//! The scattered field solves `[c^-2 ∂t² - Δ] u = A δ(t - x2/c) r`. Once the
//! incident front has passed the support of `r` its spectrum is the sum of two
//! free branches,
//!
//! ```text
//! û(ξ,t) = e^{ i|ξ|ct} K(ξ) r̂(ξ + (0,|ξ|))  -  e^{-i|ξ|ct} K(ξ) r̂(ξ - (0,|ξ|)),
//! K(ξ)   = c²A / (2ic|ξ|),
//! ```
//!
//! and the image `I(x) = 2/(c²A) (∂t + c ∂x2) u(x, x2/c)` returns every
//! wavenumber of `r` except the row `ξ̃2 = 0`.
//!
//! All spectra are taken about a reference point `x_c` at the center of a
//! zero-padded copy of the grid, so a compact `r` near the middle has a smooth
//! spectrum and bilinear resampling of the shifted branches stays accurate.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, RtmError};
use crate::fft::{self, bin_frequency, Direction};
use crate::modelkit::{Grid2D, ScalarField};
use crate::par;

/// Zero-padding factor applied before any transform.
pub const PAD: usize = 2;

/// Cells with `|r|` below this fraction of `max |r|` do not count as support.
pub const SUPPORT_TOL: f64 = 1e-6;

/// Spectrum of a field on a padded grid, referenced to the padded center node.
///
/// `F(k) = Σ f(x) e^{-ik·(x - x_c)}` on the FFT grid. Nyquist rows and columns
/// are held at zero so that real input gives an exactly conjugate-symmetric
/// array.
#[derive(Debug, Clone)]
pub struct SpectralField {
    /// Padded grid the transform lives on.
    grid: Grid2D,
    /// Offset and shape of the unpadded input inside `grid`.
    inner: (usize, usize, Grid2D),
    data: Vec<Complex64>,
    pub dk1: f64,
    pub dk2: f64,
    /// Set when the input was real.
    pub conjugate_symmetric: bool,
}

impl SpectralField {
    /// Transform a real field.
    pub fn of_real(f: &ScalarField) -> Self {
        let v: Vec<Complex64> = f.values().iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::build(*f.grid(), &v, true)
    }

    /// Transform a complex field sampled on `grid`.
    pub fn of_complex(grid: Grid2D, values: &[Complex64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(RtmError::GridMismatch(format!(
                "{} samples for a {}x{} grid",
                values.len(),
                grid.nx1,
                grid.nx2
            )));
        }
        Ok(Self::build(grid, values, false))
    }

    fn build(g: Grid2D, values: &[Complex64], real: bool) -> Self {
        let (n1, n2) = (even(PAD * g.nx1), even(PAD * g.nx2));
        let (i0, j0) = ((n1 - g.nx1) / 2, (n2 - g.nx2) / 2);
        let origin = (g.origin.0 - i0 as f64 * g.dx, g.origin.1 - j0 as f64 * g.dx);
        let grid = Grid2D::new(n1, n2, g.dx, origin).expect("padded grid is valid");
        let mut data = vec![Complex64::new(0.0, 0.0); n1 * n2];
        for j in 0..g.nx2 {
            let src = &values[j * g.nx1..(j + 1) * g.nx1];
            data[(j + j0) * n1 + i0..(j + j0) * n1 + i0 + g.nx1].copy_from_slice(src);
        }
        fft::fft2(&mut data, n1, n2, Direction::Forward);
        // center node n/2: the phase e^{ik (n/2) dx} is (-1)^bin
        par::for_each_chunk_mut(&mut data, n1, |b2, row| {
            for (b1, v) in row.iter_mut().enumerate() {
                if b1 == n1 / 2 || b2 == n2 / 2 {
                    *v = Complex64::new(0.0, 0.0);
                } else if (b1 + b2) % 2 == 1 {
                    *v = -*v;
                }
            }
        });
        let dk1 = 2.0 * PI / (n1 as f64 * g.dx);
        let dk2 = 2.0 * PI / (n2 as f64 * g.dx);
        Self { grid, inner: (i0, j0, g), data, dk1, dk2, conjugate_symmetric: real }
    }

    /// An empty spectrum with the same layout.
    fn zeros_like(&self) -> Self {
        Self {
            data: vec![Complex64::new(0.0, 0.0); self.data.len()],
            conjugate_symmetric: false,
            ..self.clone()
        }
    }

    pub fn padded_grid(&self) -> &Grid2D {
        &self.grid
    }

    /// The unpadded grid of the original field.
    pub fn grid(&self) -> &Grid2D {
        &self.inner.2
    }

    /// Reference point of the phases.
    pub fn center(&self) -> (f64, f64) {
        self.grid.coords(self.grid.nx1 / 2, self.grid.nx2 / 2)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.grid.nx1, self.grid.nx2)
    }

    /// Wavenumber of storage bin `(b1, b2)`.
    #[inline]
    pub fn k(&self, b1: usize, b2: usize) -> (f64, f64) {
        (
            bin_frequency(b1, self.grid.nx1, self.grid.dx),
            bin_frequency(b2, self.grid.nx2, self.grid.dx),
        )
    }

    #[inline]
    pub fn at(&self, b1: usize, b2: usize) -> Complex64 {
        self.data[b2 * self.grid.nx1 + b1]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    /// Bilinear interpolation at an arbitrary wavenumber; zero outside the
    /// sampled band.
    pub fn sample(&self, k1: f64, k2: f64) -> Complex64 {
        let (n1, n2) = self.shape();
        let (h1, h2) = ((n1 / 2) as i64, (n2 / 2) as i64);
        let f1 = k1 / self.dk1;
        let f2 = k2 / self.dk2;
        let (a1, a2) = (f1.floor(), f2.floor());
        let (t1, t2) = (f1 - a1, f2 - a2);
        let (a1, a2) = (a1 as i64, a2 as i64);
        if a1 + 1 < -h1 || a1 > h1 || a2 + 1 < -h2 || a2 > h2 {
            return Complex64::new(0.0, 0.0);
        }
        let get = |s1: i64, s2: i64| -> Complex64 {
            if s1.abs() > h1 || s2.abs() > h2 {
                return Complex64::new(0.0, 0.0);
            }
            let b1 = s1.rem_euclid(n1 as i64) as usize;
            let b2 = s2.rem_euclid(n2 as i64) as usize;
            self.at(b1, b2)
        };
        get(a1, a2) * ((1.0 - t1) * (1.0 - t2))
            + get(a1 + 1, a2) * (t1 * (1.0 - t2))
            + get(a1, a2 + 1) * ((1.0 - t1) * t2)
            + get(a1 + 1, a2 + 1) * (t1 * t2)
    }

    /// Largest `|F(-k) - conj F(k)|` relative to `max |F|`.
    pub fn asymmetry(&self) -> f64 {
        let (n1, n2) = self.shape();
        let peak = self.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for b2 in 0..n2 {
            for b1 in 0..n1 {
                let m = self.at((n1 - b1) % n1, (n2 - b2) % n2);
                worst = worst.max((m - self.at(b1, b2).conj()).norm());
            }
        }
        worst / peak
    }

    /// Inverse transform, cropped to the unpadded grid.
    pub fn inverse(&self) -> Vec<Complex64> {
        let (n1, n2) = self.shape();
        let mut data = self.data.clone();
        par::for_each_chunk_mut(&mut data, n1, |b2, row| {
            for (b1, v) in row.iter_mut().enumerate() {
                if (b1 + b2) % 2 == 1 {
                    *v = -*v;
                }
            }
        });
        fft::ifft2_normalized(&mut data, n1, n2);
        self.crop(&data)
    }

    fn crop(&self, padded: &[Complex64]) -> Vec<Complex64> {
        let (i0, j0, g) = self.inner;
        let n1 = self.grid.nx1;
        let mut out = Vec::with_capacity(g.len());
        for j in 0..g.nx2 {
            out.extend_from_slice(&padded[(j + j0) * n1 + i0..(j + j0) * n1 + i0 + g.nx1]);
        }
        out
    }
}

fn even(n: usize) -> usize {
    n + n % 2
}

/// Real part as a field; the imaginary part is dropped.
pub fn real_part(grid: Grid2D, v: &[Complex64]) -> ScalarField {
    ScalarField::new(grid, v.iter().map(|z| z.re).collect()).expect("length matches grid")
}

/// Largest `|Im|` relative to the largest modulus.
pub fn imaginary_fraction(v: &[Complex64]) -> f64 {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    v.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / peak
}

/// Scattered field after the incident front has passed, held as its two
/// spectral branches:
/// `û(ξ,t) = e^{i|ξ|(ct - x_c2)} P(ξ) - e^{-i|ξ|(ct - x_c2)} M(ξ)`.
#[derive(Debug, Clone)]
pub struct PlaneWaveField {
    c: f64,
    plus: SpectralField,
    minus: SpectralField,
    /// The branches of a real contrast satisfy `P(-ξ) = -conj M(ξ)`.
    real: bool,
}

impl PlaneWaveField {
    /// Branches for the contrast spectrum `r` under the incident amplitude `a`.
    pub fn new(r: &SpectralField, c: f64, a: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(RtmError::Precondition(format!("velocity must be positive, got {c}")));
        }
        let mut plus = r.zeros_like();
        let mut minus = r.zeros_like();
        let (n1, n2) = r.shape();
        let fill = |sign: f64, out: &mut SpectralField| {
            par::for_each_chunk_mut(&mut out.data, n1, |b2, row| {
                for (b1, v) in row.iter_mut().enumerate() {
                    let (k1, k2) = r.k(b1, b2);
                    let kn = k1.hypot(k2);
                    // Nyquist bins have no mirror partner; keep û real
                    if kn == 0.0 || b1 == n1 / 2 || b2 == n2 / 2 {
                        continue;
                    }
                    let k = Complex64::new(0.0, -c * a / (2.0 * kn));
                    *v = k * r.sample(k1, k2 + sign * kn);
                }
            });
        };
        fill(1.0, &mut plus);
        fill(-1.0, &mut minus);
        Ok(Self { c, plus, minus, real: r.conjugate_symmetric })
    }

    /// Replace the impulsive incident pulse by `w(t - x2/c)`, given through its
    /// spectrum `ŵ(ω) = ∫ w(τ) e^{-iωτ} dτ`.
    pub fn with_wavelet(mut self, w_hat: impl Fn(f64) -> Complex64 + Sync) -> Self {
        let (n1, _) = self.plus.shape();
        let c = self.c;
        let grid = self.plus.grid;
        let k = |b1: usize, b2: usize| {
            bin_frequency(b1, grid.nx1, grid.dx).hypot(bin_frequency(b2, grid.nx2, grid.dx))
        };
        par::for_each_chunk_mut(&mut self.plus.data, n1, |b2, row| {
            row.iter_mut().enumerate().for_each(|(b1, v)| *v *= w_hat(c * k(b1, b2)));
        });
        par::for_each_chunk_mut(&mut self.minus.data, n1, |b2, row| {
            row.iter_mut().enumerate().for_each(|(b1, v)| *v *= w_hat(-c * k(b1, b2)));
        });
        self
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn grid(&self) -> &Grid2D {
        self.plus.grid()
    }

    pub fn plus(&self) -> &SpectralField {
        &self.plus
    }

    pub fn minus(&self) -> &SpectralField {
        &self.minus
    }

    /// `û(·, t)` on the padded FFT grid.
    pub fn spectrum_at(&self, t: f64) -> SpectralField {
        let mut out = self.plus.zeros_like();
        out.conjugate_symmetric = self.real;
        let (n1, _) = out.shape();
        let s = self.c * t - self.plus.center().1;
        let (plus, minus) = (&self.plus, &self.minus);
        par::for_each_chunk_mut(&mut out.data, n1, |b2, row| {
            for (b1, v) in row.iter_mut().enumerate() {
                let (k1, k2) = plus.k(b1, b2);
                let ph = Complex64::from_polar(1.0, k1.hypot(k2) * s);
                *v = ph * plus.at(b1, b2) - ph.conj() * minus.at(b1, b2);
            }
        });
        out
    }

    /// `u(·, t)` on the unpadded grid, complex.
    pub fn snapshot_complex(&self, t: f64) -> Vec<Complex64> {
        self.spectrum_at(t).inverse()
    }

    /// `u(·, t)` on the unpadded grid.
    pub fn snapshot(&self, t: f64) -> ScalarField {
        real_part(*self.grid(), &self.snapshot_complex(t))
    }
}

/// Axis-aligned box `[x1_min, x1_max, x2_min, x2_max]` of the cells where
/// `|r|` exceeds `SUPPORT_TOL` of its peak; `None` for a zero field.
pub fn support_box(r: &ScalarField) -> Option<[f64; 4]> {
    let peak = r.max_abs();
    if peak == 0.0 {
        return None;
    }
    let g = r.grid();
    let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for j in 0..g.nx2 {
        for i in 0..g.nx1 {
            if r.at(i, j).abs() > SUPPORT_TOL * peak {
                let (x1, x2) = g.coords(i, j);
                b = [b[0].min(x1), b[1].max(x1), b[2].min(x2), b[3].max(x2)];
            }
        }
    }
    Some(b)
}

/// Scattered field `u(·, t)` of the plane wave `A δ(t - x2/c)` hitting `r`.
/// The support of `r` must lie inside `0 < x2 < ct`.
pub fn planewave_field(r: &ScalarField, c: f64, a: f64, t: f64) -> Result<ScalarField> {
    if let Some(b) = support_box(r) {
        if !(b[2] > 0.0 && b[3] < c * t) {
            return Err(RtmError::Precondition(format!(
                "contrast occupies x2 in [{:.1}, {:.1}] m; the front at t = {t} s sits at {:.1} m",
                b[2],
                b[3],
                c * t
            )));
        }
    }
    Ok(PlaneWaveField::new(&SpectralField::of_real(r), c, a)?.snapshot(t))
}

/// Which spectral branches enter the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branches {
    Both,
    /// Only the `e^{-i|ξ|ct}` branch, which covers `ξ̃2 < 0`.
    Minus,
}

/// `I(x) = 2/(c²A) (∂t + c ∂x2) u(x, x2/c)`, real part.
///
/// The time derivative and the substitution `t = x2/c` are applied to each
/// branch exactly: the branch `e^{±i|ξ|ct}` becomes the plane wave
/// `e^{i(ξ ± (0,|ξ|))·x}` weighted by `(1 ± ξ2/|ξ|)`, summed directly along `x2`
/// and by FFT along `x1`.
pub fn planewave_reconstruct(u: &PlaneWaveField, a: f64) -> ScalarField {
    real_part(*u.grid(), &reconstruct(u, a, Branches::Both))
}

/// The downward branch alone: the projection of `r` onto `ξ̃2 < 0`.
/// For real `r` the full image is twice its real part.
pub fn planewave_reconstruct_branch(u: &PlaneWaveField, a: f64) -> Vec<Complex64> {
    reconstruct(u, a, Branches::Minus)
}

fn reconstruct(u: &PlaneWaveField, a: f64, which: Branches) -> Vec<Complex64> {
    let sp = &u.plus;
    let (n1, n2) = sp.shape();
    let (i0, j0, g) = sp.inner;
    let dx = sp.grid.dx;
    let c = u.c;
    let scale = 2.0 / (c * c * a);
    // y2 = x2 - x_c2 for the output rows
    let y2: Vec<f64> = (0..g.nx2).map(|j| (j0 + j) as f64 * dx - (n2 / 2) as f64 * dx).collect();

    // column sums over ξ2, one x1-wavenumber per chunk
    let mut cols = vec![Complex64::new(0.0, 0.0); n1 * g.nx2];
    par::for_each_chunk_mut(&mut cols, g.nx2, |b1, out| {
        for b2 in 0..n2 {
            let (k1, k2) = sp.k(b1, b2);
            let kn = k1.hypot(k2);
            if kn == 0.0 {
                continue;
            }
            let i_c = Complex64::new(0.0, c * scale);
            let wm = i_c * (kn - k2) * u.minus.at(b1, b2);
            let wp = if which == Branches::Both { i_c * (kn + k2) * u.plus.at(b1, b2) } else { Complex64::new(0.0, 0.0) };
            for (o, &y) in out.iter_mut().zip(&y2) {
                *o += wm * Complex64::from_polar(1.0, (k2 - kn) * y);
                if which == Branches::Both {
                    *o += wp * Complex64::from_polar(1.0, (k2 + kn) * y);
                }
            }
        }
    });

    // along x1: y1 = (q - n1/2) dx, so e^{ik1 y1} = (-1)^b1 e^{2πi b1 q / n1}
    let rows = fft::transpose(&cols, g.nx2, n1);
    let plan = FftPlanner::new().plan_fft_inverse(n1);
    let norm = 1.0 / (n1 * n2) as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
    par::for_each_chunk_mut(&mut out, g.nx1, |j, dst| {
        let mut row: Vec<Complex64> = rows[j * n1..(j + 1) * n1]
            .iter()
            .enumerate()
            .map(|(b1, v)| if b1 % 2 == 1 { -*v } else { *v })
            .collect();
        plan.process(&mut row);
        for (d, v) in dst.iter_mut().zip(&row[i0..i0 + g.nx1]) {
            *d = v * norm;
        }
    });
    out
}

/// Ground-truth partial inverse: `r` with the `ξ̃2 = 0` row of its spectrum
/// removed, i.e. minus its average over `x2` at each `x1` wavenumber.
pub fn halfspace_oracle(r: &ScalarField) -> ScalarField {
    let g = *r.grid();
    let mut d: Vec<Complex64> = r.values().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft::fft2(&mut d, g.nx1, g.nx2, Direction::Forward);
    d[..g.nx1].fill(Complex64::new(0.0, 0.0));
    fft::ifft2_normalized(&mut d, g.nx1, g.nx2);
    real_part(g, &d)
}

/// The map `ξ -> ξ̃ = ξ - (0, |ξ|)` onto the lower half-plane.
#[inline]
pub fn downward_shift(k1: f64, k2: f64) -> (f64, f64) {
    (k1, k2 - k1.hypot(k2))
}

/// Branch weight `1 - ξ2/|ξ|` that `(∂t + c∂x2)` leaves on the downward
/// branch after normalization by `2/(c²A)` and `K(ξ)`.
#[inline]
pub fn downward_weight(k1: f64, k2: f64) -> f64 {
    1.0 - k2 / k1.hypot(k2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid2D {
        Grid2D::new(n, n + 6, 10.0, (-(n as f64) * 5.0, 100.0)).unwrap()
    }

    #[test]
    fn real_input_is_conjugate_symmetric() {
        let g = grid(41);
        let r = ScalarField::from_fn(g, |x1, x2| {
            let y2 = x2 - 335.0;
            (0.03 * x1 + 0.01 * x2).sin() * (-(x1 * x1 + y2 * y2) / 2e3).exp()
        });
        let s = SpectralField::of_real(&r);
        assert!(s.conjugate_symmetric);
        assert!(s.asymmetry() < 1e-12);
        let back = s.inverse();
        for (z, x) in back.iter().zip(r.values()) {
            assert!((z.re - x).abs() < 1e-10 && z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn sample_hits_bins_exactly() {
        let g = grid(16);
        let r = ScalarField::from_fn(g, |x1, x2| (0.02 * x1 - 0.05 * x2).cos() + 0.1 * x1 / 100.0);
        let s = SpectralField::of_real(&r);
        for (b1, b2) in [(1, 2), (5, 30), (31, 0), (0, 3)] {
            let (k1, k2) = s.k(b1, b2);
            assert!((s.sample(k1, k2) - s.at(b1, b2)).norm() < 1e-9 * (1.0 + s.at(b1, b2).norm()));
        }
        assert_eq!(s.sample(10.0, 0.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn zero_contrast_scatters_nothing() {
        let r = ScalarField::zeros(grid(12));
        let u = planewave_field(&r, 1500.0, 1.0, 1.0).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn support_condition_is_checked() {
        let g = grid(12);
        let r = ScalarField::from_fn(g, |_, x2| if x2 > 150.0 { 1.0 } else { 0.0 });
        let err = planewave_field(&r, 1000.0, 1.0, 0.1).unwrap_err();
        assert!(matches!(err, RtmError::Precondition(_)));
    }

    #[test]
    fn oracle_kills_layering() {
        let g = grid(10);
        let r = ScalarField::from_fn(g, |x1, _| (0.05 * x1).sin());
        assert!(halfspace_oracle(&r).max_abs() < 1e-12);
    }

    #[test]
    fn weight_vanishes_only_straight_down() {
        assert!(downward_weight(0.0, 1.0).abs() < 1e-15);
        assert!((downward_weight(0.0, -1.0) - 2.0).abs() < 1e-15);
        assert!((downward_weight(1.0, 0.0) - 1.0).abs() < 1e-15);
        let (a, b) = downward_shift(0.3, 0.4);
        assert!((a - 0.3).abs() < 1e-15 && (b + 0.1).abs() < 1e-15);
    }
}
