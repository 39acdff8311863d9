use super::Grid2D;
use crate::error::{Result, RtmError};

/// Real values on a [`Grid2D`], `x1` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(RtmError::GridMismatch(format!(
                "field has {} values, grid has {} cells",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let (i, j) = grid.ij(k);
            return Err(RtmError::Precondition(format!(
                "non-finite field value at cell ({i},{j})"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: Grid2D, value: f64) -> Self {
        Self { grid, values: vec![value; grid.len()] }
    }

    /// Sample `f(x1, x2)` at every cell.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.nx2 {
            let x2 = grid.x2(j);
            for i in 0..grid.nx1 {
                values.push(f(grid.x1(i), x2));
            }
        }
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.idx(i, j);
        self.values[k] = v;
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Cell holding the smallest value (first one on ties).
    pub fn argmin(&self) -> (usize, usize) {
        let k = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bk, bv), (k, &v)| if v < bv { (k, v) } else { (bk, bv) })
            .0;
        self.grid.ij(k)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid, "zip_with")?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Copy of the cells inside a window of this field's grid.
    pub fn extract(&self, i0: usize, j0: usize, window: Grid2D) -> Result<Self> {
        if i0 + window.nx1 > self.grid.nx1 || j0 + window.nx2 > self.grid.nx2 {
            return Err(RtmError::GridMismatch("extract window out of range".into()));
        }
        let mut values = Vec::with_capacity(window.len());
        for j in 0..window.nx2 {
            let row = self.grid.idx(i0, j0 + j);
            values.extend_from_slice(&self.values[row..row + window.nx1]);
        }
        Ok(Self { grid: window, values })
    }

    /// Linear interpolation between cell centers; clamps at the border.
    pub fn sample_bilinear(&self, x1: f64, x2: f64) -> f64 {
        let g = &self.grid;
        let (fi, fj) = g.frac_index(x1, x2);
        let fi = fi.clamp(0.0, (g.nx1 - 1) as f64);
        let fj = fj.clamp(0.0, (g.nx2 - 1) as f64);
        let i = (fi.floor() as usize).min(g.nx1 - 2);
        let j = (fj.floor() as usize).min(g.nx2 - 2);
        let (a, b) = (fi - i as f64, fj - j as f64);
        (1.0 - a) * (1.0 - b) * self.at(i, j)
            + a * (1.0 - b) * self.at(i + 1, j)
            + (1.0 - a) * b * self.at(i, j + 1)
            + a * b * self.at(i + 1, j + 1)
    }
}
