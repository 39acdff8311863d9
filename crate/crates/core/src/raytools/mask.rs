//! Recoverable-aperture predictor: the principal symbol of the resolution
//! operator evaluated by tracing scattered rays back to the array.

use super::covariables::xi_from_zeta;
use super::gofields::GoFields;
use super::interp::Bicubic;
use super::ray::{trace_ray_with, Exit};
use crate::modelkit::taper::{grazing_rolloff, tukey};

/// Acquisition line on `x2 = 0` and the cutoffs applied to recorded data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Acquisition {
    pub x1_min: f64,
    pub x1_max: f64,
    pub taper_fraction: f64,
    pub grazing_delta: f64,
}

impl Acquisition {
    /// Spatial taper times grazing cutoff for a ray reaching `x1` with
    /// covector `p`.
    pub fn weight(&self, x1: f64, p: [f64; 2]) -> f64 {
        let sin = p[0].abs() / p[0].hypot(p[1]);
        tukey(x1, self.x1_min, self.x1_max, self.taper_fraction) * grazing_rolloff(sin, self.grazing_delta)
    }
}

/// Bilinear sample of `T_s` and `n_s` at `z`; `None` when any surrounding
/// cell is masked.
pub fn go_at(go: &GoFields, z: [f64; 2]) -> Option<(f64, [f64; 2])> {
    let g = go.grid();
    let (fi, fj) = g.frac_index(z[0], z[1]);
    if fi < 0.0 || fj < 0.0 || fi > (g.nx1 - 1) as f64 || fj > (g.nx2 - 1) as f64 {
        return None;
    }
    let i0 = (fi.floor() as usize).min(g.nx1 - 2);
    let j0 = (fj.floor() as usize).min(g.nx2 - 2);
    for (i, j) in [(i0, j0), (i0 + 1, j0), (i0, j0 + 1), (i0 + 1, j0 + 1)] {
        if !go.valid(g.idx(i, j)) {
            return None;
        }
    }
    let t = go.t_s.sample_bilinear(z[0], z[1]);
    let n = [go.ns[0].sample_bilinear(z[0], z[1]), go.ns[1].sample_bilinear(z[0], z[1])];
    let nn = n[0].hypot(n[1]);
    Some((t, [n[0] / nn, n[1] / nn]))
}

/// Symbol value in `[0, 1]` for reflector position `z` and wavenumber
/// `zeta`: for whichever of `+-zeta` lies in the halfspace `. n_s < 0`, the
/// scattered ray leaves `z` at time `T_s(z)` along `xi(zeta)`; it
/// contributes the acquisition weight where it reaches the surface before
/// `t_max`.
pub fn resolution_mask(
    z: [f64; 2],
    zeta: [f64; 2],
    go: &GoFields,
    c: &Bicubic,
    acq: &Acquisition,
    t_max: f64,
) -> f64 {
    resolution_symbol(z, zeta, go, c, acq, t_max, |_| 1.0)
}

/// Like [`resolution_mask`], but `zeta` carries its magnitude (rad/m) and
/// each branch is also weighted by `band` at the frequency (Hz) that images
/// that wavenumber, `c(z) |xi| / (2 pi)`.
pub fn resolution_symbol(
    z: [f64; 2],
    zeta: [f64; 2],
    go: &GoFields,
    c: &Bicubic,
    acq: &Acquisition,
    t_max: f64,
    band: impl Fn(f64) -> f64,
) -> f64 {
    let Some((ts, ns)) = go_at(go, z) else { return 0.0 };
    if ts >= t_max {
        return 0.0;
    }
    let cz = c.value(z[0], z[1]);
    let dt_ray = 0.25 * c.grid().dx / c.field().max();
    let n_steps = ((t_max - ts) / dt_ray).ceil() as usize;
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let zs = [sign * zeta[0], sign * zeta[1]];
        let Ok(xi) = xi_from_zeta(zs, ns) else { continue };
        let nxi = xi[0].hypot(xi[1]);
        let w_band = band(cz * nxi / (2.0 * std::f64::consts::PI));
        if w_band == 0.0 {
            continue;
        }
        let p0 = [xi[0] / (nxi * cz), xi[1] / (nxi * cz)];
        let Ok(path) = trace_ray_with(z, p0, ([0.0; 2], [0.0; 2]), c, ts, dt_ray, n_steps, true) else {
            continue;
        };
        if let Some(Exit::Surface { point, time, p }) = path.exit {
            if time <= t_max {
                total += w_band * acq.weight(point[0], p);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelkit::{Grid2D, ScalarField};
    use crate::raytools::gofields::{go_fields, FanSpec};

    fn setup() -> (GoFields, Bicubic, Acquisition) {
        let g = Grid2D::new(201, 131, 10.0, (-500.0, -100.0)).unwrap();
        let c = ScalarField::constant(g, 2000.0);
        let go = go_fields(&c, [0.0, 0.0], &FanSpec::downgoing(2001, 2000.0, 10.0, 1.5)).unwrap();
        let acq = Acquisition { x1_min: -400.0, x1_max: 1400.0, taper_fraction: 0.1, grazing_delta: 0.1 };
        (go, Bicubic::new(c), acq)
    }

    #[test]
    fn straight_up_under_array_is_one() {
        let (go, c, acq) = setup();
        // reflector right below the source: n_s points down, zeta up
        let v = resolution_mask([0.0, 800.0], [0.0, -0.05], &go, &c, &acq, 3.0);
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn band_sees_the_normal_incidence_frequency() {
        let (go, c, acq) = setup();
        // normal incidence images |zeta| = 2 omega / c
        let k = 0.04;
        let f = 2000.0 * k / (4.0 * std::f64::consts::PI);
        let near = |x: f64| if (x - f).abs() < 1e-6 * f { 1.0 } else { 0.0 };
        let v = resolution_symbol([0.0, 800.0], [0.0, -k], &go, &c, &acq, 3.0, near);
        assert!((v - 1.0).abs() < 1e-12, "{v}");
        let v = resolution_symbol([0.0, 800.0], [0.0, -k], &go, &c, &acq, 3.0, |x| near(x / 1.1));
        assert_eq!(v, 0.0);
    }

    #[test]
    fn exit_beyond_array_is_zero() {
        let (go, c, acq) = setup();
        // steep dip: scattered ray leaves far to the right of the array
        let z = [900.0, 600.0];
        let (_, ns) = go_at(&go, z).unwrap();
        let xi: [f64; 2] = [0.95, -0.31];
        let n = xi[0] * xi[0] + xi[1] * xi[1];
        let xi = [xi[0] / n.sqrt(), xi[1] / n.sqrt()];
        let zeta = crate::raytools::zeta_from_xi(xi, ns);
        assert_eq!(resolution_mask(z, zeta, &go, &c, &acq, 3.0), 0.0);
    }

    #[test]
    fn boundary_of_halfspace_is_zero() {
        let (go, c, acq) = setup();
        let z = [0.0, 800.0];
        assert_eq!(resolution_mask(z, [1.0, 0.0], &go, &c, &acq, 3.0), 0.0);
    }
}
