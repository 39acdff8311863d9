use crate::error::{Result, RtmError};

/// Regular 2D grid with square cells. `x2` is depth (positive down), `x1` is
/// the horizontal coordinate and varies fastest in memory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub nx1: usize,
    pub nx2: usize,
    pub dx: f64,
    pub origin: (f64, f64),
}

impl Grid2D {
    pub fn new(nx1: usize, nx2: usize, dx: f64, origin: (f64, f64)) -> Result<Self> {
        if nx1 < 3 || nx2 < 3 {
            return Err(RtmError::Config(format!(
                "grid needs at least 3x3 cells, got {nx1}x{nx2}"
            )));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(RtmError::Config(format!("grid spacing must be positive, got {dx}")));
        }
        if !(origin.0.is_finite() && origin.1.is_finite()) {
            return Err(RtmError::Config("grid origin must be finite".into()));
        }
        Ok(Self { nx1, nx2, dx, origin })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx1 * self.nx2
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx1 && j < self.nx2);
        j * self.nx1 + i
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx1, idx / self.nx1)
    }

    #[inline]
    pub fn x1(&self, i: usize) -> f64 {
        self.origin.0 + i as f64 * self.dx
    }

    #[inline]
    pub fn x2(&self, j: usize) -> f64 {
        self.origin.1 + j as f64 * self.dx
    }

    #[inline]
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x1(i), self.x2(j))
    }

    pub fn extent(&self) -> (f64, f64, f64, f64) {
        (
            self.origin.0,
            self.x1(self.nx1 - 1),
            self.origin.1,
            self.x2(self.nx2 - 1),
        )
    }

    /// Fractional index of a coordinate (no bounds check).
    #[inline]
    pub fn frac_index(&self, x1: f64, x2: f64) -> (f64, f64) {
        ((x1 - self.origin.0) / self.dx, (x2 - self.origin.1) / self.dx)
    }

    /// Nearest cell, `None` when the point lies outside the grid.
    pub fn nearest(&self, x1: f64, x2: f64) -> Option<(usize, usize)> {
        let (fi, fj) = self.frac_index(x1, x2);
        let (i, j) = (fi.round(), fj.round());
        if i < 0.0 || j < 0.0 || i > (self.nx1 - 1) as f64 || j > (self.nx2 - 1) as f64 {
            return None;
        }
        Some((i as usize, j as usize))
    }

    /// Cell whose coordinate matches `(x1, x2)` to within 1e-6 of a cell.
    pub fn exact_cell(&self, x1: f64, x2: f64) -> Option<(usize, usize)> {
        let (fi, fj) = self.frac_index(x1, x2);
        let (i, j) = self.nearest(x1, x2)?;
        ((fi - i as f64).abs() < 1e-6 && (fj - j as f64).abs() < 1e-6).then_some((i, j))
    }

    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        let (a, b, c, d) = self.extent();
        x1 >= a && x1 <= b && x2 >= c && x2 <= d
    }

    /// Sub-grid covering cells `i0..i0+nx1`, `j0..j0+nx2`.
    pub fn window(&self, i0: usize, j0: usize, nx1: usize, nx2: usize) -> Result<Grid2D> {
        if i0 + nx1 > self.nx1 || j0 + nx2 > self.nx2 {
            return Err(RtmError::GridMismatch(format!(
                "window {nx1}x{nx2} at ({i0},{j0}) exceeds grid {}x{}",
                self.nx1, self.nx2
            )));
        }
        Grid2D::new(nx1, nx2, self.dx, self.coords(i0, j0))
    }

    /// Window covering the box `[x1a, x1b] x [x2a, x2b]`, clipped to the grid
    /// and padded by `halo` cells on every side where possible.
    pub fn window_for_box(&self, bbox: [f64; 4], halo: usize) -> Result<(usize, usize, Grid2D)> {
        let (fa, fc) = self.frac_index(bbox[0], bbox[2]);
        let (fb, fd) = self.frac_index(bbox[1], bbox[3]);
        let clampi = |v: f64, n: usize| v.max(0.0).min((n - 1) as f64);
        let i0 = (clampi(fa.floor(), self.nx1) as usize).saturating_sub(halo);
        let j0 = (clampi(fc.floor(), self.nx2) as usize).saturating_sub(halo);
        let i1 = (clampi(fb.ceil(), self.nx1) as usize + halo).min(self.nx1 - 1);
        let j1 = (clampi(fd.ceil(), self.nx2) as usize + halo).min(self.nx2 - 1);
        let g = self.window(i0, j0, i1 - i0 + 1, j1 - j0 + 1)?;
        Ok((i0, j0, g))
    }

    /// Whether two grids describe the same lattice.
    pub fn same_as(&self, other: &Grid2D) -> bool {
        self.nx1 == other.nx1
            && self.nx2 == other.nx2
            && (self.dx - other.dx).abs() <= 1e-12 * self.dx
            && (self.origin.0 - other.origin.0).abs() <= 1e-9 * self.dx.max(1.0)
            && (self.origin.1 - other.origin.1).abs() <= 1e-9 * self.dx.max(1.0)
    }

    pub fn ensure_same(&self, other: &Grid2D, what: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(RtmError::GridMismatch(format!(
                "{what}: {self:?} vs {other:?}"
            )))
        }
    }
}
