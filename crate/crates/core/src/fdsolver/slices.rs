//! Temporal Fourier coefficients accumulated while a simulation runs.
//!
//! `u_hat(x, f) = sum_k u(x, t_k) exp(-i 2 pi f t_k) dt` over positive
//! frequencies only; negative ones follow by conjugation.
//!
//! File layout: `{"RTMS", version u32, nfreq u32, nx1 u32, nx2 u32, dx f64,
//! origin 2 x f64}` then `nfreq` f64 frequencies, then for each frequency
//! `nx1 * nx2` (re, im) pairs, x1 fastest.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Result, RtmError};
use crate::modelkit::io::{expect_magic, get_f64, get_f64s, get_u32, put_f64, put_f64s, put_u32};
use crate::modelkit::Grid2D;
use crate::par;

pub const SLICES_MAGIC: &[u8; 4] = b"RTMS";

#[derive(Debug, Clone, PartialEq)]
pub struct FreqSlices {
    pub freqs: Vec<f64>,
    /// Grid of the stored window.
    pub grid: Grid2D,
    /// One complex plane per frequency.
    pub data: Vec<Vec<Complex64>>,
}

impl FreqSlices {
    pub fn zeros(freqs: &[f64], grid: Grid2D) -> Self {
        Self {
            freqs: freqs.to_vec(),
            grid,
            data: vec![vec![Complex64::default(); grid.len()]; freqs.len()],
        }
    }

    pub fn nfreq(&self) -> usize {
        self.freqs.len()
    }

    #[inline]
    pub fn at(&self, f: usize, i: usize, j: usize) -> Complex64 {
        self.data[f][self.grid.idx(i, j)]
    }

    /// Add `u(t) * exp(-i w t) * weight` to every plane. `u` covers `full`,
    /// and the window starts at `(i0, j0)` of `full`.
    pub fn accumulate(&mut self, u: &[f64], full: &Grid2D, i0: usize, j0: usize, t: f64, weight: f64) {
        let g = self.grid;
        let freqs = &self.freqs;
        let n1 = full.nx1;
        let mut planes: Vec<(f64, &mut Vec<Complex64>)> =
            freqs.iter().copied().zip(self.data.iter_mut()).collect();
        par::for_each_mut(&mut planes, |_, (f, plane)| {
            let ph = Complex64::from_polar(weight, -2.0 * PI * *f * t);
            for j in 0..g.nx2 {
                let src = &u[(j0 + j) * n1 + i0..(j0 + j) * n1 + i0 + g.nx1];
                let dst = &mut plane[j * g.nx1..(j + 1) * g.nx1];
                for (d, &s) in dst.iter_mut().zip(src) {
                    d.re += ph.re * s;
                    d.im += ph.im * s;
                }
            }
        });
    }

    pub fn ensure_compatible(&self, o: &FreqSlices) -> Result<()> {
        self.grid.ensure_same(&o.grid, "frequency slices")?;
        if self.freqs != o.freqs {
            return Err(RtmError::GridMismatch("frequency sets differ".into()));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn norm(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|p| p.iter())
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let g = self.grid;
        w.write_all(SLICES_MAGIC)?;
        put_u32(w, 1)?;
        put_u32(w, self.freqs.len() as u32)?;
        put_u32(w, g.nx1 as u32)?;
        put_u32(w, g.nx2 as u32)?;
        put_f64(w, g.dx)?;
        put_f64(w, g.origin.0)?;
        put_f64(w, g.origin.1)?;
        put_f64s(w, &self.freqs)?;
        for plane in &self.data {
            for v in plane {
                put_f64(w, v.re)?;
                put_f64(w, v.im)?;
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        expect_magic(r, SLICES_MAGIC)?;
        let version = get_u32(r)?;
        if version != 1 {
            return Err(RtmError::Format(format!("unsupported slices version {version}")));
        }
        let nf = get_u32(r)? as usize;
        let nx1 = get_u32(r)? as usize;
        let nx2 = get_u32(r)? as usize;
        let dx = get_f64(r)?;
        let o1 = get_f64(r)?;
        let o2 = get_f64(r)?;
        let grid = Grid2D::new(nx1, nx2, dx, (o1, o2))?;
        let freqs = get_f64s(r, nf)?;
        let mut data = Vec::with_capacity(nf);
        for _ in 0..nf {
            let raw = get_f64s(r, 2 * grid.len())?;
            data.push(raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect());
        }
        Ok(Self { freqs, grid, data })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }
}
