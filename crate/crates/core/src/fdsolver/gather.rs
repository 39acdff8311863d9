//! Receiver gathers recorded on the surface row.
//!
//! File layout: `{"RTMG", nt u32, nrec u32, dt f64, x1_first f64, dx_rec f64}`
//! (36 bytes, little endian) then `nt * nrec` f64 values, receivers fastest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, RtmError};
use crate::modelkit::io::{expect_magic, get_f64, get_f64s, get_u32, put_f64, put_f64s, put_u32};

pub const GATHER_MAGIC: &[u8; 4] = b"RTMG";

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGather {
    pub nt: usize,
    pub nrec: usize,
    pub dt: f64,
    pub x1_first: f64,
    pub dx_rec: f64,
    /// `data[k * nrec + r]` is sample `k` of receiver `r`.
    pub data: Vec<f64>,
}

pub type ReceiverGather = SurfaceGather;

impl SurfaceGather {
    pub fn zeros(nt: usize, nrec: usize, dt: f64, x1_first: f64, dx_rec: f64) -> Self {
        Self { nt, nrec, dt, x1_first, dx_rec, data: vec![0.0; nt * nrec] }
    }

    pub fn like(other: &SurfaceGather) -> Self {
        Self::zeros(other.nt, other.nrec, other.dt, other.x1_first, other.dx_rec)
    }

    pub fn x1(&self, r: usize) -> f64 {
        self.x1_first + r as f64 * self.dx_rec
    }

    #[inline]
    pub fn at(&self, k: usize, r: usize) -> f64 {
        self.data[k * self.nrec + r]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.nrec..(k + 1) * self.nrec]
    }

    pub fn trace(&self, r: usize) -> Vec<f64> {
        (0..self.nt).map(|k| self.at(k, r)).collect()
    }

    pub fn same_geometry(&self, o: &SurfaceGather) -> bool {
        self.nt == o.nt
            && self.nrec == o.nrec
            && self.dt == o.dt
            && self.x1_first == o.x1_first
            && self.dx_rec == o.dx_rec
    }

    pub fn ensure_same_geometry(&self, o: &SurfaceGather) -> Result<()> {
        if self.same_geometry(o) {
            Ok(())
        } else {
            Err(RtmError::GridMismatch(format!(
                "gathers differ: {}x{} dt={} x0={} dx={} vs {}x{} dt={} x0={} dx={}",
                self.nt, self.nrec, self.dt, self.x1_first, self.dx_rec,
                o.nt, o.nrec, o.dt, o.x1_first, o.dx_rec
            )))
        }
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut g = self.clone();
        g.data.iter_mut().for_each(|v| *v *= a);
        g
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(GATHER_MAGIC)?;
        put_u32(w, self.nt as u32)?;
        put_u32(w, self.nrec as u32)?;
        put_f64(w, self.dt)?;
        put_f64(w, self.x1_first)?;
        put_f64(w, self.dx_rec)?;
        put_f64s(w, &self.data)
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        expect_magic(r, GATHER_MAGIC)?;
        let nt = get_u32(r)? as usize;
        let nrec = get_u32(r)? as usize;
        let dt = get_f64(r)?;
        let x1_first = get_f64(r)?;
        let dx_rec = get_f64(r)?;
        let data = get_f64s(r, nt * nrec)?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(RtmError::Format("gather holds non-finite samples".into()));
        }
        Ok(Self { nt, nrec, dt, x1_first, dx_rec, data })
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut g = SurfaceGather::zeros(5, 3, 0.002, -10.0, 10.0);
        for (i, v) in g.data.iter_mut().enumerate() {
            *v = i as f64 * 0.5 - 2.0;
        }
        let mut buf = Vec::new();
        g.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 36 + 15 * 8);
        assert_eq!(SurfaceGather::read_from(&mut buf.as_slice()).unwrap(), g);
        assert_eq!(g.trace(1), vec![-1.5, 0.0, 1.5, 3.0, 4.5]);
        assert_eq!(g.x1(2), 10.0);
    }
}
