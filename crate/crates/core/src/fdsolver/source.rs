use super::gather::SurfaceGather;
use crate::error::{Result, RtmError};
use crate::modelkit::Grid2D;

/// Right-hand side of the wave equation, sampled on the time grid.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceTerm {
    /// Point source: `signature[k] / dx^2` at one cell.
    Point { cell: (usize, usize), signature: Vec<f64> },
    /// Line source `delta(x2) s(x1, t)` on one row: `s / dx` at each column.
    /// `data[k * cols.len() + r]` drives column `cols[r]`.
    SurfaceLine { row: usize, cols: Vec<usize>, data: Vec<f64> },
}

impl SourceTerm {
    pub fn point(grid: &Grid2D, cell: (usize, usize), signature: Vec<f64>) -> Result<Self> {
        if cell.0 >= grid.nx1 || cell.1 >= grid.nx2 {
            return Err(RtmError::Precondition(format!("source cell {cell:?} outside the grid")));
        }
        Ok(SourceTerm::Point { cell, signature })
    }

    /// Inject a gather along the grid row at `x2 = x2_row`. Receivers must sit
    /// on grid nodes.
    pub fn from_gather(grid: &Grid2D, gather: &SurfaceGather, x2_row: f64) -> Result<Self> {
        let mut cols = Vec::with_capacity(gather.nrec);
        let mut row = None;
        for r in 0..gather.nrec {
            let (i, j) = grid.exact_cell(gather.x1(r), x2_row).ok_or_else(|| {
                RtmError::GridMismatch(format!(
                    "receiver at x1 = {} is not on a grid node of row x2 = {x2_row}",
                    gather.x1(r)
                ))
            })?;
            row = Some(j);
            cols.push(i);
        }
        let row = row.ok_or_else(|| RtmError::GridMismatch("empty gather".into()))?;
        Ok(SourceTerm::SurfaceLine { row, cols, data: gather.data.clone() })
    }

    /// Number of time samples carried by the source.
    pub fn len(&self) -> usize {
        match self {
            SourceTerm::Point { signature, .. } => signature.len(),
            SourceTerm::SurfaceLine { cols, data, .. } => data.len() / cols.len().max(1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fill `out` with `(flat index, density)` pairs for time sample `k`.
    pub fn forcing_at(&self, grid: &Grid2D, k: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        if k >= self.len() {
            return;
        }
        match self {
            SourceTerm::Point { cell, signature } => {
                out.push((grid.idx(cell.0, cell.1), signature[k] / (grid.dx * grid.dx)));
            }
            SourceTerm::SurfaceLine { row, cols, data } => {
                let n = cols.len();
                for (r, &i) in cols.iter().enumerate() {
                    out.push((grid.idx(i, *row), data[k * n + r] / grid.dx));
                }
            }
        }
    }

    /// Same term with every sample multiplied by `a`.
    pub fn scaled(&self, a: f64) -> Self {
        let mut s = self.clone();
        match &mut s {
            SourceTerm::Point { signature, .. } => signature.iter_mut().for_each(|v| *v *= a),
            SourceTerm::SurfaceLine { data, .. } => data.iter_mut().for_each(|v| *v *= a),
        }
        s
    }
}
