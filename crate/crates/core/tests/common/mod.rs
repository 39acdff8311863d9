//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use rtm_core::fdsolver::ricker;

/// Ricker wavelet convolved with the causal 2D Green's function of
/// `[c^-2 d_tt - lap]` at distance `r`, by quadrature.
///
/// With `tau = r/c + s^2` the inverse-square-root singularity disappears and
/// the integrand `w(t - r/c - s^2) / (pi sqrt(2r/c + s^2))` is smooth.
pub fn green_ricker(t: f64, r: f64, c: f64, f_peak: f64, delay: f64) -> f64 {
    let t0 = r / c;
    let tail = 4.0 / f_peak;
    let s_max = (t - t0 + delay + tail).max(0.0).sqrt();
    if s_max == 0.0 {
        return 0.0;
    }
    let n = 4000;
    let h = s_max / n as f64;
    let integrand = |s: f64| ricker(t - t0 - s * s - delay, f_peak) / (PI * (2.0 * t0 + s * s).sqrt());
    let mut acc = integrand(0.0) + integrand(s_max);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(k as f64 * h);
    }
    acc * h / 3.0
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// Zero-lag normalized correlation.
pub fn ncc(a: &[f64], b: &[f64]) -> f64 {
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let aa: f64 = a.iter().map(|x| x * x).sum();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    ab / (aa * bb).sqrt()
}

use rtm_core::fdsolver::{ricker_series, simulate, Forcing, Propagator, Receivers, Recording, SimParams, SourceTerm, Sponge};
use rtm_core::modelkit::{Grid2D, ScalarField};

/// Square grid covering `[-half, half]^2` plus a sponge frame, with the
/// origin on a node.
pub fn centered_grid(half: f64, dx: f64, sponge: usize) -> Grid2D {
    let n = (2.0 * half / dx).round() as usize + 1 + 2 * sponge;
    let o = -half - sponge as f64 * dx;
    Grid2D::new(n, n, dx, (o, o)).unwrap()
}

/// Trace recorded at `rec` from a Ricker point source at `src`.
pub fn point_trace(
    c: &ScalarField,
    src: (f64, f64),
    rec: (f64, f64),
    f_peak: f64,
    delay: f64,
    dt: f64,
    nt: usize,
    sponge: Sponge,
) -> Vec<f64> {
    let g = *c.grid();
    let cell = g.exact_cell(src.0, src.1).expect("source on node");
    let s = SourceTerm::point(&g, cell, ricker_series(f_peak, delay, dt, nt)).unwrap();
    let (ri, rj) = g.exact_cell(rec.0, rec.1).expect("receiver on node");
    let recording = Recording { receivers: Some(Receivers { row: rj, cols: vec![ri] }), ..Default::default() };
    simulate(c, &s, SimParams { dt, nt, sponge }, &recording)
        .unwrap()
        .gather
        .unwrap()
        .trace(0)
}

/// FD-vs-quadrature relative L2 error for a homogeneous medium.
pub fn green_error(dx: f64, dt: f64, r: f64, f_peak: f64) -> f64 {
    let c0 = 2000.0;
    let sponge = Sponge { width: (500.0 / dx) as usize, strength: 0.0015 };
    let g = centered_grid(1400.0, dx, sponge.width);
    let c = ScalarField::constant(g, c0);
    let delay = 1.5 / f_peak;
    let t_end = r / c0 + delay + 3.0 / f_peak;
    let nt = (t_end / dt).round() as usize + 1;
    let fd = point_trace(&c, (0.0, 0.0), (r, 0.0), f_peak, delay, dt, nt, sponge);
    let oracle: Vec<f64> = (0..nt).map(|k| green_ricker(k as f64 * dt, r, c0, f_peak, delay)).collect();
    rel_l2(&fd, &oracle)
}

fn lap4(u: &[f64], g: &Grid2D, i: usize, j: usize) -> f64 {
    let w = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
    let mut s = 0.0;
    for (o, c) in w.iter().enumerate() {
        let d = o as isize - 2;
        s += c * u[g.idx((i as isize + d) as usize, j)];
        s += c * u[g.idx(i, (j as isize + d) as usize)];
    }
    s / (g.dx * g.dx)
}

/// Leapfrog-conserved energy between levels `a` (older) and `b`.
fn energy(a: &[f64], b: &[f64], c: &ScalarField, dt: f64) -> f64 {
    let g = c.grid();
    let mut e = 0.0;
    for j in 2..g.nx2 - 2 {
        for i in 2..g.nx1 - 2 {
            let k = g.idx(i, j);
            let v = (b[k] - a[k]) / dt;
            e += v * v / c.values()[k].powi(2) - lap4(b, g, i, j) * a[k];
        }
    }
    e
}

/// Leapfrog energy in a gradient medium from the end of the source ramp
/// until the front reaches the sponge: largest relative drift, the initial
/// energy and the number of levels compared.
pub fn interior_energy_drift() -> (f64, f64, usize) {
    let g = centered_grid(2000.0, 10.0, 50);
    let c = ScalarField::from_fn(g, |_, x2| 2500.0 + 0.5 * x2);
    let dt = 0.001;
    let prop = Propagator::new(&c, dt, Sponge::default()).unwrap();
    let (f_peak, delay) = (10.0, 0.15);
    let sig = ricker_series(f_peak, delay, dt, 600);
    let (si, sj) = g.exact_cell(0.0, 0.0).unwrap();
    let cell = g.idx(si, sj);
    let mut prev = vec![0.0; g.len()];
    let mut curr = vec![0.0; g.len()];
    let mut next = vec![0.0; g.len()];
    let ramp_end = ((delay + 1.5 / f_peak) / dt) as usize;
    // nearest sponge 2000 m away at up to 3500 m/s: contact after ~0.57 s
    let contact = (0.55 / dt) as usize;
    let mut energies = Vec::new();
    for k in 0..contact {
        let f = [(cell, sig[k] / (g.dx * g.dx))];
        prop.step_into(&prev, &mut curr, &mut next, Forcing::Sparse(&f));
        std::mem::swap(&mut prev, &mut curr);
        std::mem::swap(&mut curr, &mut next);
        if k > ramp_end {
            energies.push(energy(&prev, &curr, &c, dt));
        }
    }
    let e0 = energies[0];
    let drift = energies.iter().map(|e| (e - e0).abs() / e0).fold(0.0, f64::max);
    (drift, e0, energies.len())
}
