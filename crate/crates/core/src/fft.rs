//! Two-dimensional FFT on row-major complex arrays (rustfft underneath).

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    /// Unnormalized inverse; divide by `n1 * n2` to invert `Forward`.
    Inverse,
}

/// Transform a `n2 x n1` array (rows of length `n1`) along both axes.
pub fn fft2(data: &mut [Complex64], n1: usize, n2: usize, dir: Direction) {
    assert_eq!(data.len(), n1 * n2);
    let mut planner = FftPlanner::new();
    let (p1, p2) = match dir {
        Direction::Forward => (planner.plan_fft_forward(n1), planner.plan_fft_forward(n2)),
        Direction::Inverse => (planner.plan_fft_inverse(n1), planner.plan_fft_inverse(n2)),
    };
    par::for_each_chunk_mut(data, n1, |_, row| p1.process(row));
    let mut t = transpose(data, n1, n2);
    par::for_each_chunk_mut(&mut t, n2, |_, col| p2.process(col));
    let back = transpose(&t, n2, n1);
    data.copy_from_slice(&back);
}

/// Inverse transform including the `1 / (n1 n2)` normalization.
pub fn ifft2_normalized(data: &mut [Complex64], n1: usize, n2: usize) {
    fft2(data, n1, n2, Direction::Inverse);
    let s = 1.0 / (n1 * n2) as f64;
    par::for_each_mut(data, |_, v| *v *= s);
}

/// `n2 x n1` row-major to `n1 x n2` row-major.
pub fn transpose<T: Copy + Default + Send + Sync>(a: &[T], n1: usize, n2: usize) -> Vec<T> {
    let mut out = vec![T::default(); a.len()];
    par::for_each_chunk_mut(&mut out, n2, |i, row| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[j * n1 + i];
        }
    });
    out
}

/// Angular frequency of FFT bin `k` out of `n` with sample spacing `d`.
#[inline]
pub fn bin_frequency(k: usize, n: usize, d: f64) -> f64 {
    let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    2.0 * std::f64::consts::PI * kk / (n as f64 * d)
}
