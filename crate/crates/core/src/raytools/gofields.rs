//! Gridded geometrical-optics source fields from a dense ray fan.

use std::f64::consts::PI;

use super::interp::Bicubic;
use super::ray::{trace_ray, RayPath};
use crate::error::{Result, RtmError};
use crate::modelkit::{Grid2D, ScalarField};
use crate::par;

/// Takeoff angles (radians from +x1 toward +x2) and integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanSpec {
    pub n_rays: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    pub dt_ray: f64,
    pub t_max: f64,
}

impl FanSpec {
    /// Down-going fan just short of the horizontal, step length about a
    /// quarter cell at the fastest velocity.
    pub fn downgoing(n_rays: usize, c_max: f64, dx: f64, t_max: f64) -> Self {
        let margin = 0.2f64.to_radians();
        Self { n_rays, theta_min: margin, theta_max: PI - margin, dt_ray: 0.25 * dx / c_max, t_max }
    }

    pub fn angle(&self, k: usize) -> f64 {
        self.theta_min + (self.theta_max - self.theta_min) * k as f64 / (self.n_rays - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoFields {
    pub t_s: ScalarField,
    pub a_s: ScalarField,
    /// Components of the unit source direction `n_s`.
    pub ns: [ScalarField; 2],
    /// Post-caustic or multipath cells.
    pub caustic_mask: Vec<bool>,
    /// Cells reached by more than one fan branch.
    pub multipath_mask: Vec<bool>,
    /// Cells no ray reaches.
    pub shadow_mask: Vec<bool>,
    pub source: [f64; 2],
}

impl GoFields {
    pub fn grid(&self) -> &Grid2D {
        self.t_s.grid()
    }

    /// Cell holds a valid single-arrival value.
    pub fn valid(&self, idx: usize) -> bool {
        !self.shadow_mask[idx] && !self.caustic_mask[idx]
    }

    pub fn ns_at(&self, i: usize, j: usize) -> [f64; 2] {
        [self.ns[0].at(i, j), self.ns[1].at(i, j)]
    }

    /// Fraction of grid cells inside `zone` flagged as multipath.
    pub fn multipath_fraction(&self, zone: [f64; 4]) -> f64 {
        let g = self.grid();
        let (mut hit, mut total) = (0usize, 0usize);
        for j in 0..g.nx2 {
            for i in 0..g.nx1 {
                let (x1, x2) = g.coords(i, j);
                if x1 >= zone[0] && x1 <= zone[1] && x2 >= zone[2] && x2 <= zone[3] {
                    total += 1;
                    hit += self.multipath_mask[g.idx(i, j)] as usize;
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            hit as f64 / total as f64
        }
    }

    /// Refuse to certify a zone where multipathing exceeds `limit`.
    pub fn check_sme(&self, zone: [f64; 4], limit: f64) -> Result<f64> {
        let f = self.multipath_fraction(zone);
        if f > limit {
            Err(RtmError::SmeViolation { fraction: f, limit })
        } else {
            Ok(f)
        }
    }

    pub fn caustic_cells(&self) -> usize {
        self.caustic_mask.iter().filter(|&&b| b).count()
    }
}

#[derive(Clone, Copy)]
struct Corner {
    t: f64,
    y: [f64; 2],
    p: [f64; 2],
    spread: f64,
    post_caustic: bool,
}

fn corners(path: &RayPath) -> Vec<Corner> {
    let mut sign = 0.0;
    let mut flipped = false;
    path.samples
        .iter()
        .map(|s| {
            let d = s.det();
            if sign == 0.0 && d != 0.0 {
                sign = d.signum();
            } else if sign != 0.0 && d * sign < 0.0 {
                flipped = true;
            }
            Corner { t: s.s, y: s.y, p: s.p, spread: s.spreading(), post_caustic: flipped }
        })
        .collect()
}

/// Solve the bilinear map of quad `q` (order: 00, 10, 01, 11) for `x`.
fn inverse_bilinear(q: [[f64; 2]; 4], x: [f64; 2]) -> Option<(f64, f64)> {
    let (mut a, mut b) = (0.5, 0.5);
    for _ in 0..20 {
        let f = |k: usize| {
            (1.0 - a) * (1.0 - b) * q[0][k] + a * (1.0 - b) * q[1][k] + (1.0 - a) * b * q[2][k] + a * b * q[3][k]
                - x[k]
        };
        let da = |k: usize| (1.0 - b) * (q[1][k] - q[0][k]) + b * (q[3][k] - q[2][k]);
        let db = |k: usize| (1.0 - a) * (q[2][k] - q[0][k]) + a * (q[3][k] - q[1][k]);
        let (r0, r1) = (f(0), f(1));
        let (j00, j01, j10, j11) = (da(0), db(0), da(1), db(1));
        let det = j00 * j11 - j01 * j10;
        if det.abs() < 1e-300 {
            return None;
        }
        let sa = (j11 * r0 - j01 * r1) / det;
        let sb = (-j10 * r0 + j00 * r1) / det;
        a -= sa;
        b -= sb;
        if sa.abs() < 1e-12 && sb.abs() < 1e-12 {
            break;
        }
    }
    let tol = 1e-9;
    if a >= -tol && a <= 1.0 + tol && b >= -tol && b <= 1.0 + tol {
        Some((a.clamp(0.0, 1.0), b.clamp(0.0, 1.0)))
    } else {
        None
    }
}

/// Trace a ray fan from `x_s` and rasterize traveltime, amplitude and
/// direction onto `c`'s grid.
///
/// Amplitude follows from ray-tube spreading `L = |dy/dtheta|`:
/// `A_s = sqrt(c / (8 pi L))`, which is the 2D point-source amplitude in a
/// constant medium. Traveltime inside a tube is a first-order Taylor
/// expansion from each corner, blended bilinearly.
pub fn go_fields(c: &ScalarField, x_s: [f64; 2], fan: &FanSpec) -> Result<GoFields> {
    let grid = *c.grid();
    if !grid.contains(x_s[0], x_s[1]) {
        return Err(RtmError::Precondition(format!("source {x_s:?} outside the grid")));
    }
    if fan.n_rays < 2 || !(fan.dt_ray > 0.0) || !(fan.theta_max > fan.theta_min) {
        return Err(RtmError::Precondition("invalid ray fan".into()));
    }
    let interp = Bicubic::new(c.clone());
    let cs = interp.value(x_s[0], x_s[1]);
    let n_steps = (fan.t_max / fan.dt_ray).ceil() as usize;
    let rays: Vec<Vec<Corner>> = par::map_range(fan.n_rays, |k| {
        let th = fan.angle(k);
        trace_ray(x_s, [th.cos() / cs, th.sin() / cs], &interp, fan.dt_ray, n_steps)
            .map(|p| corners(&p))
            .unwrap_or_default()
    });

    let n = grid.len();
    let mut t_s = vec![f64::INFINITY; n];
    let mut a_s = vec![0.0; n];
    let mut ns0 = vec![0.0; n];
    let mut ns1 = vec![0.0; n];
    let mut caustic = vec![false; n];
    let mut multipath = vec![false; n];
    let min_spread = 1e-3 * grid.dx;
    let threshold = 2.0 * fan.dt_ray;

    for k in 0..fan.n_rays - 1 {
        let (ra, rb) = (&rays[k], &rays[k + 1]);
        let m = ra.len().min(rb.len());
        for s in 0..m.saturating_sub(1) {
            let cs4 = [ra[s], ra[s + 1], rb[s], rb[s + 1]];
            let q = [cs4[0].y, cs4[1].y, cs4[2].y, cs4[3].y];
            let (lo1, hi1) = q.iter().fold((f64::MAX, f64::MIN), |(l, h), p| (l.min(p[0]), h.max(p[0])));
            let (lo2, hi2) = q.iter().fold((f64::MAX, f64::MIN), |(l, h), p| (l.min(p[1]), h.max(p[1])));
            let (fi0, fj0) = grid.frac_index(lo1, lo2);
            let (fi1, fj1) = grid.frac_index(hi1, hi2);
            let i_lo = fi0.ceil().max(0.0) as usize;
            let j_lo = fj0.ceil().max(0.0) as usize;
            let i_hi = fi1.floor().min((grid.nx1 - 1) as f64);
            let j_hi = fj1.floor().min((grid.nx2 - 1) as f64);
            if i_hi < 0.0 || j_hi < 0.0 {
                continue;
            }
            let post = cs4.iter().any(|c| c.post_caustic);
            for j in j_lo..=j_hi as usize {
                for i in i_lo..=i_hi as usize {
                    let x = [grid.x1(i), grid.x2(j)];
                    let Some((a, b)) = inverse_bilinear(q, x) else { continue };
                    let w = [(1.0 - a) * (1.0 - b), a * (1.0 - b), (1.0 - a) * b, a * b];
                    let mut t = 0.0;
                    let mut spread = 0.0;
                    let mut dir = [0.0; 2];
                    for (wk, ck) in w.iter().zip(&cs4) {
                        t += wk * (ck.t + ck.p[0] * (x[0] - ck.y[0]) + ck.p[1] * (x[1] - ck.y[1]));
                        spread += wk * ck.spread;
                        let np = ck.p[0].hypot(ck.p[1]);
                        dir[0] += wk * ck.p[0] / np;
                        dir[1] += wk * ck.p[1] / np;
                    }
                    let idx = grid.idx(i, j);
                    if t_s[idx].is_finite() && (t - t_s[idx]).abs() > threshold {
                        multipath[idx] = true;
                    }
                    if post {
                        caustic[idx] = true;
                    }
                    if t < t_s[idx] {
                        let nd = dir[0].hypot(dir[1]);
                        t_s[idx] = t;
                        a_s[idx] = (c.values()[idx] / (8.0 * PI * spread.max(min_spread))).sqrt();
                        ns0[idx] = dir[0] / nd;
                        ns1[idx] = dir[1] / nd;
                    }
                }
            }
        }
    }

    let shadow: Vec<bool> = t_s.iter().map(|t| !t.is_finite()).collect();
    for (idx, s) in shadow.iter().enumerate() {
        if *s {
            t_s[idx] = 0.0;
        }
        if multipath[idx] {
            caustic[idx] = true;
        }
    }
    Ok(GoFields {
        t_s: ScalarField::new(grid, t_s)?,
        a_s: ScalarField::new(grid, a_s)?,
        ns: [ScalarField::new(grid, ns0)?, ScalarField::new(grid, ns1)?],
        caustic_mask: caustic,
        multipath_mask: multipath,
        shadow_mask: shadow,
        source: x_s,
    })
}
