//! The (2,4) leapfrog kernel and the absorbing sponge.

use std::f64::consts::PI;

use crate::error::{Result, RtmError};
use crate::modelkit::{Grid2D, ScalarField};
use crate::par;

/// Fourth-order second-derivative weights for offsets 0, 1, 2.
pub const L4: [f64; 3] = [-5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];

/// Multiplicative damping frame of `width` cells on all four sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sponge {
    pub width: usize,
    pub strength: f64,
}

impl Default for Sponge {
    fn default() -> Self {
        Self { width: 50, strength: 0.0015 }
    }
}

impl Sponge {
    pub fn none() -> Self {
        Self { width: 0, strength: 0.0 }
    }

    /// Damping factor at `d` cells into the frame (`d = 0` at its inner edge).
    pub fn factor(&self, d: f64) -> f64 {
        if self.width == 0 || d <= 0.0 {
            return 1.0;
        }
        let w = self.width as f64;
        let d = d.min(w);
        (-self.strength * w * 0.5 * (1.0 - (PI * d / w).cos())).exp()
    }

    /// Per-cell damping profile on `grid`.
    pub fn profile(&self, grid: &Grid2D) -> Vec<f64> {
        let w = self.width;
        let depth = |i: usize, n: usize| -> f64 {
            if i < w {
                (w - i) as f64
            } else if i + w >= n {
                (i + w + 1 - n) as f64
            } else {
                0.0
            }
        };
        let mut m = vec![1.0; grid.len()];
        for j in 0..grid.nx2 {
            let fj = self.factor(depth(j, grid.nx2));
            for i in 0..grid.nx1 {
                m[grid.idx(i, j)] = fj * self.factor(depth(i, grid.nx1));
            }
        }
        m
    }

    /// Whether cell `(i, j)` lies inside the damping frame.
    pub fn contains(&self, grid: &Grid2D, i: usize, j: usize) -> bool {
        let w = self.width;
        i < w || j < w || i + w >= grid.nx1 || j + w >= grid.nx2
    }
}

/// Right-hand side applied during one step, in source-density units.
#[derive(Debug, Clone, Copy)]
pub enum Forcing<'a> {
    None,
    /// `(flat index, f)` pairs.
    Sparse(&'a [(usize, f64)]),
    /// One value per cell.
    Dense(&'a [f64]),
}

/// Precomputed coefficients for stepping on a fixed velocity model.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: Grid2D,
    dt: f64,
    /// `(c dt / dx)^2` per cell.
    courant2: Vec<f64>,
    /// `(c dt)^2` per cell, scales the forcing.
    cdt2: Vec<f64>,
    damping: Vec<f64>,
    damped_rows: Vec<bool>,
}

impl Propagator {
    pub fn new(c: &ScalarField, dt: f64, sponge: Sponge) -> Result<Self> {
        let grid = *c.grid();
        if !(dt > 0.0) {
            return Err(RtmError::Precondition(format!("dt must be positive, got {dt}")));
        }
        let courant = c.max() * dt / grid.dx;
        if courant > 0.5 {
            return Err(RtmError::Precondition(format!("Courant number {courant:.4} exceeds 0.5")));
        }
        if c.min() <= 0.0 {
            return Err(RtmError::Precondition("velocity must be positive".into()));
        }
        let courant2 = c.values().iter().map(|v| (v * dt / grid.dx).powi(2)).collect();
        let cdt2 = c.values().iter().map(|v| (v * dt).powi(2)).collect();
        let damping = sponge.profile(&grid);
        let damped_rows = (0..grid.nx2)
            .map(|j| damping[j * grid.nx1..(j + 1) * grid.nx1].iter().any(|&m| m != 1.0))
            .collect();
        Ok(Self { grid, dt, courant2, cdt2, damping, damped_rows })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Writes `u_next` from `u_prev` and `u_curr`, then applies the sponge to
    /// `u_next` and `u_curr`. The two outermost cell layers stay zero.
    pub fn step_into(&self, u_prev: &[f64], u_curr: &mut [f64], u_next: &mut [f64], forcing: Forcing) {
        let n1 = self.grid.nx1;
        let n2 = self.grid.nx2;
        let uc: &[f64] = u_curr;
        par::for_each_chunk_mut(u_next, n1, |j, row| {
            if j < 2 || j + 2 >= n2 {
                row.fill(0.0);
                return;
            }
            let base = j * n1;
            let c0 = &uc[base..base + n1];
            let up1 = &uc[base - n1..base];
            let up2 = &uc[base - 2 * n1..base - n1];
            let dn1 = &uc[base + n1..base + 2 * n1];
            let dn2 = &uc[base + 2 * n1..base + 3 * n1];
            let pv = &u_prev[base..base + n1];
            let k2 = &self.courant2[base..base + n1];
            row[0] = 0.0;
            row[1] = 0.0;
            row[n1 - 2] = 0.0;
            row[n1 - 1] = 0.0;
            for i in 2..n1 - 2 {
                let lap = 2.0 * L4[0] * c0[i]
                    + L4[1] * (c0[i - 1] + c0[i + 1] + up1[i] + dn1[i])
                    + L4[2] * (c0[i - 2] + c0[i + 2] + up2[i] + dn2[i]);
                row[i] = 2.0 * c0[i] - pv[i] + k2[i] * lap;
            }
        });
        match forcing {
            Forcing::None => {}
            Forcing::Sparse(pts) => {
                for &(idx, f) in pts {
                    u_next[idx] += self.cdt2[idx] * f;
                }
            }
            Forcing::Dense(f) => {
                par::for_each_chunk_mut(u_next, n1, |j, row| {
                    let base = j * n1;
                    for (i, v) in row.iter_mut().enumerate() {
                        *v += self.cdt2[base + i] * f[base + i];
                    }
                });
            }
        }
        self.damp(u_next);
        self.damp(u_curr);
    }

    fn damp(&self, u: &mut [f64]) {
        let n1 = self.grid.nx1;
        par::for_each_chunk_mut(u, n1, |j, row| {
            if self.damped_rows[j] {
                let m = &self.damping[j * n1..(j + 1) * n1];
                row.iter_mut().zip(m).for_each(|(v, m)| *v *= m);
            }
        });
    }
}

/// Any non-finite value in `u`.
pub fn has_nonfinite(u: &[f64]) -> bool {
    par::any_chunk(u, 4096, |c| c.iter().any(|v| !v.is_finite()))
}

/// Two consecutive time levels of the pressure field.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefieldState {
    pub u_prev: ScalarField,
    pub u_curr: ScalarField,
    pub step: usize,
    pub dt: f64,
}

impl WavefieldState {
    pub fn zeros(grid: Grid2D, dt: f64) -> Self {
        Self { u_prev: ScalarField::zeros(grid), u_curr: ScalarField::zeros(grid), step: 0, dt }
    }
}

/// Advance `state` by one step with forcing `f` (source density at the
/// current time level).
pub fn step(state: WavefieldState, prop: &Propagator, f: Forcing) -> Result<WavefieldState> {
    state.u_curr.grid().ensure_same(prop.grid(), "wavefield")?;
    let grid = *prop.grid();
    let WavefieldState { u_prev, u_curr, step, dt } = state;
    let mut curr = u_curr.into_values();
    let mut next = vec![0.0; grid.len()];
    prop.step_into(u_prev.values(), &mut curr, &mut next, f);
    if has_nonfinite(&next) {
        return Err(RtmError::Instability { step: step + 1 });
    }
    Ok(WavefieldState {
        u_prev: ScalarField::new(grid, curr)?,
        u_curr: ScalarField::new(grid, next)?,
        step: step + 1,
        dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Grid2D, ScalarField) {
        let g = Grid2D::new(40, 30, 10.0, (0.0, 0.0)).unwrap();
        (g, ScalarField::constant(g, 2000.0))
    }

    #[test]
    fn zero_in_zero_out() {
        let (g, c) = setup();
        let prop = Propagator::new(&c, 1e-3, Sponge { width: 5, strength: 0.01 }).unwrap();
        let mut s = WavefieldState::zeros(g, 1e-3);
        for _ in 0..10 {
            s = step(s, &prop, Forcing::None).unwrap();
        }
        assert!(s.u_curr.values().iter().all(|&v| v == 0.0));
        assert_eq!(s.step, 10);
    }

    #[test]
    fn stencil_exact_on_quartic() {
        // L4 is exact for polynomials up to degree 5 along each axis
        let (g, _) = setup();
        let c = ScalarField::constant(g, 1000.0);
        let dt = 1e-3;
        let prop = Propagator::new(&c, dt, Sponge::none()).unwrap();
        let u = ScalarField::from_fn(g, |x, y| (x / 100.0).powi(4) + (y / 100.0).powi(3) * (x / 100.0));
        let mut curr = u.values().to_vec();
        let prev = curr.clone();
        let mut next = vec![0.0; g.len()];
        prop.step_into(&prev, &mut curr, &mut next, Forcing::None);
        for j in 2..g.nx2 - 2 {
            for i in 2..g.nx1 - 2 {
                let (x, y) = g.coords(i, j);
                let lap = 12.0 * x * x / 1e8 + 6.0 * y * x / 1e8;
                let expect = u.at(i, j) + (1000.0 * dt).powi(2) * lap;
                assert!((next[g.idx(i, j)] - expect).abs() < 1e-9, "{i} {j}");
            }
        }
    }

    #[test]
    fn courant_guard() {
        let (_, c) = setup();
        assert!(Propagator::new(&c, 3e-3, Sponge::none()).is_err());
    }

    #[test]
    fn sponge_profile_shape() {
        let g = Grid2D::new(30, 30, 1.0, (0.0, 0.0)).unwrap();
        let sp = Sponge { width: 8, strength: 0.01 };
        let m = sp.profile(&g);
        assert_eq!(m[g.idx(15, 15)], 1.0);
        assert_eq!(m[g.idx(8, 15)], 1.0);
        assert!(m[g.idx(7, 15)] < 1.0);
        assert!(m[g.idx(0, 15)] < m[g.idx(4, 15)]);
        assert!((m[g.idx(0, 15)] - (-0.08f64).exp()).abs() < 1e-12);
        assert!((m[g.idx(29, 15)] - m[g.idx(0, 15)]).abs() < 1e-15);
    }

    #[test]
    fn instability_names_step() {
        let (g, c) = setup();
        let prop = Propagator::new(&c, 1e-3, Sponge::none()).unwrap();
        let mut s = WavefieldState::zeros(g, 1e-3);
        let pts = [(g.idx(20, 15), f64::INFINITY)];
        s = step(s, &prop, Forcing::None).unwrap();
        let err = step(s, &prop, Forcing::Sparse(&pts)).unwrap_err();
        assert!(matches!(err, RtmError::Instability { step: 2 }));
    }
}
