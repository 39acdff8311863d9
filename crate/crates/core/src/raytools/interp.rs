//! Bicubic B-spline interpolation of a velocity grid. The interpolant is C2,
//! so RK4 keeps its order across cell boundaries and the Hessian needed by
//! the variational system is continuous.
//!
//! The grid is padded by linear extrapolation before prefiltering; with the
//! padding much wider than the filter's decay length, affine models are
//! reproduced up to the edges.

use crate::modelkit::{Grid2D, ScalarField};

/// Value, gradient and Hessian `[h11, h12, h22]` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub v: f64,
    pub grad: [f64; 2],
    pub hess: [f64; 3],
}

const PAD: usize = 16;

#[derive(Debug, Clone)]
pub struct Bicubic {
    field: ScalarField,
    coef: Vec<f64>,
    n1: usize,
    n2: usize,
}

#[inline]
fn weights(t: f64) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let u = 1.0 - t;
    let t2 = t * t;
    let t3 = t2 * t;
    let w = [
        u * u * u / 6.0,
        (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
        (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0,
        t3 / 6.0,
    ];
    let dw = [-0.5 * u * u, 1.5 * t2 - 2.0 * t, -1.5 * t2 + t + 0.5, 0.5 * t2];
    let ddw = [u, 3.0 * t - 2.0, -3.0 * t + 1.0, t];
    (w, dw, ddw)
}

/// In-place cubic B-spline prefilter with mirror boundaries.
fn prefilter(s: &mut [f64]) {
    let n = s.len();
    let z = 3f64.sqrt() - 2.0;
    let mut zk = 1.0;
    let mut sum = 0.0;
    for v in s.iter().take(n.min(40)) {
        sum += zk * v;
        zk *= z;
    }
    s[0] = sum;
    for k in 1..n {
        s[k] += z * s[k - 1];
    }
    s[n - 1] = z / (z * z - 1.0) * (s[n - 1] + z * s[n - 2]);
    for k in (0..n - 1).rev() {
        s[k] = z * (s[k + 1] - s[k]);
    }
    s.iter_mut().for_each(|v| *v *= 6.0);
}

impl Bicubic {
    pub fn new(field: ScalarField) -> Self {
        let g = *field.grid();
        let (n1, n2) = (g.nx1 + 2 * PAD, g.nx2 + 2 * PAD);
        let mut a = vec![0.0; n1 * n2];
        for j in 0..g.nx2 {
            let row = &mut a[(j + PAD) * n1..(j + PAD + 1) * n1];
            for i in 0..g.nx1 {
                row[i + PAD] = field.at(i, j);
            }
            let (l0, l1) = (row[PAD], row[PAD + 1]);
            let (r0, r1) = (row[PAD + g.nx1 - 1], row[PAD + g.nx1 - 2]);
            for k in 1..=PAD {
                row[PAD - k] = l0 - k as f64 * (l1 - l0);
                row[PAD + g.nx1 - 1 + k] = r0 + k as f64 * (r0 - r1);
            }
        }
        for i in 0..n1 {
            let (t0, t1) = (a[PAD * n1 + i], a[(PAD + 1) * n1 + i]);
            let (b0, b1) = (a[(PAD + g.nx2 - 1) * n1 + i], a[(PAD + g.nx2 - 2) * n1 + i]);
            for k in 1..=PAD {
                a[(PAD - k) * n1 + i] = t0 - k as f64 * (t1 - t0);
                a[(PAD + g.nx2 - 1 + k) * n1 + i] = b0 + k as f64 * (b0 - b1);
            }
        }
        for row in a.chunks_mut(n1) {
            prefilter(row);
        }
        let mut col = vec![0.0; n2];
        for i in 0..n1 {
            for j in 0..n2 {
                col[j] = a[j * n1 + i];
            }
            prefilter(&mut col);
            for j in 0..n2 {
                a[j * n1 + i] = col[j];
            }
        }
        Self { field, coef: a, n1, n2 }
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn grid(&self) -> &Grid2D {
        self.field.grid()
    }

    /// Sample at `(x1, x2)`; far outside the grid the position is clamped.
    pub fn sample(&self, x1: f64, x2: f64) -> Sample {
        let g = self.field.grid();
        let (fi, fj) = g.frac_index(x1, x2);
        let lim = (PAD - 2) as f64;
        let fi = fi.clamp(-lim, g.nx1 as f64 - 1.0 + lim) + PAD as f64;
        let fj = fj.clamp(-lim, g.nx2 as f64 - 1.0 + lim) + PAD as f64;
        let i0 = (fi.floor() as usize).min(self.n1 - 3);
        let j0 = (fj.floor() as usize).min(self.n2 - 3);
        let (tx, ty) = (fi - i0 as f64, fj - j0 as f64);
        let (wx, dwx, ddwx) = weights(tx);
        let (wy, dwy, ddwy) = weights(ty);
        let mut s = [0.0; 6];
        for b in 0..4 {
            let j = j0 + b - 1;
            let base = j * self.n1 + i0 - 1;
            let mut row = [0.0; 3];
            for a in 0..4 {
                let v = self.coef[base + a];
                row[0] += wx[a] * v;
                row[1] += dwx[a] * v;
                row[2] += ddwx[a] * v;
            }
            s[0] += wy[b] * row[0];
            s[1] += wy[b] * row[1];
            s[2] += dwy[b] * row[0];
            s[3] += wy[b] * row[2];
            s[4] += dwy[b] * row[1];
            s[5] += ddwy[b] * row[0];
        }
        let h = g.dx;
        Sample {
            v: s[0],
            grad: [s[1] / h, s[2] / h],
            hess: [s[3] / (h * h), s[4] / (h * h), s[5] / (h * h)],
        }
    }

    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        self.sample(x1, x2).v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_grid_values() {
        let g = Grid2D::new(15, 12, 3.0, (1.0, -4.0)).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (x * 0.3).sin() + (y * 0.2).cos() * x);
        let b = Bicubic::new(f.clone());
        for j in 0..12 {
            for i in 0..15 {
                let (x, y) = g.coords(i, j);
                assert!((b.value(x, y) - f.at(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn affine_exact_to_the_edges() {
        let g = Grid2D::new(30, 25, 10.0, (-100.0, -50.0)).unwrap();
        let b = Bicubic::new(ScalarField::from_fn(g, |x, y| 2000.0 + 0.3 * x + y));
        for &(x, y) in &[(-100.0, -50.0), (-95.5, 180.0), (185.0, 3.3), (190.0, 190.0)] {
            let s = b.sample(x, y);
            assert!((s.v - (2000.0 + 0.3 * x + y)).abs() < 1e-6, "{x} {y} {}", s.v);
            assert!((s.grad[0] - 0.3).abs() < 1e-7 && (s.grad[1] - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn reproduces_quadratics() {
        let g = Grid2D::new(60, 60, 5.0, (-10.0, 0.0)).unwrap();
        let f = |x: f64, y: f64| 3.0 + 0.2 * x - 0.1 * y + 0.01 * x * x + 0.003 * x * y - 0.002 * y * y;
        let b = Bicubic::new(ScalarField::from_fn(g, f));
        for &(x, y) in &[(120.3, 140.7), (150.1, 144.4), (132.5, 160.0)] {
            let s = b.sample(x, y);
            assert!((s.v - f(x, y)).abs() < 1e-8);
            assert!((s.grad[0] - (0.2 + 0.02 * x + 0.003 * y)).abs() < 1e-8);
            assert!((s.grad[1] - (-0.1 + 0.003 * x - 0.004 * y)).abs() < 1e-8);
            assert!((s.hess[0] - 0.02).abs() < 1e-8);
            assert!((s.hess[1] - 0.003).abs() < 1e-8);
            assert!((s.hess[2] + 0.004).abs() < 1e-8);
        }
    }

    #[test]
    fn hessian_is_continuous_across_cells() {
        let g = Grid2D::new(12, 12, 1.0, (0.0, 0.0)).unwrap();
        let b = Bicubic::new(ScalarField::from_fn(g, |x, y| (x * 0.7).sin() * (y * 0.4).cos()));
        let (l, r) = (b.sample(4.999_999_9, 5.3), b.sample(5.000_000_1, 5.3));
        assert!((l.grad[0] - r.grad[0]).abs() < 1e-6);
        assert!((l.hess[0] - r.hess[0]).abs() < 1e-5);
        assert!((l.v - r.v).abs() < 1e-7);
    }
}
