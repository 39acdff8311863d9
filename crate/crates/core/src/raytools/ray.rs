//! Bicharacteristics of `c(y)|p|`: `dy/dt = c p/|p|`, `dp/dt = -|p| grad c`,
//! integrated with RK4 together with their variation along one initial
//! parameter (takeoff angle for source fans).

use super::interp::Bicubic;
use crate::error::{Result, RtmError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySample {
    /// Time along the ray, seconds.
    pub s: f64,
    pub y: [f64; 2],
    pub p: [f64; 2],
    /// Flow Jacobian `[dy/dt, dy/dtheta]` (columns).
    pub j: [[f64; 2]; 2],
}

impl RaySample {
    /// `det[dy/dt, dy/dtheta]`; positive before the first caustic of a
    /// counter-clockwise fan.
    pub fn det(&self) -> f64 {
        self.j[0][0] * self.j[1][1] - self.j[0][1] * self.j[1][0]
    }

    /// Unit propagation direction.
    pub fn direction(&self) -> [f64; 2] {
        let n = self.p[0].hypot(self.p[1]);
        [self.p[0] / n, self.p[1] / n]
    }

    /// Ray-tube width per unit angle, `|dy/dtheta|` across the ray.
    pub fn spreading(&self) -> f64 {
        let d = self.direction();
        (d[0] * self.j[1][1] - d[1] * self.j[0][1]).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exit {
    /// Crossed `x2 = 0` upward; linear interpolation of the crossing.
    Surface { point: [f64; 2], time: f64, p: [f64; 2] },
    /// Left the grid elsewhere.
    Domain { point: [f64; 2], time: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayPath {
    pub samples: Vec<RaySample>,
    pub exit: Option<Exit>,
}

type State = [f64; 8];

fn rhs(c: &Bicubic, z: &State) -> State {
    let s = c.sample(z[0], z[1]);
    let (p0, p1) = (z[2], z[3]);
    let np = p0.hypot(p1);
    let (u0, u1) = (p0 / np, p1 / np);
    let (yy0, yy1, pp0, pp1) = (z[4], z[5], z[6], z[7]);
    let gy = s.grad[0] * yy0 + s.grad[1] * yy1;
    // d(p/|p|) along the variation
    let up = u0 * pp0 + u1 * pp1;
    let du0 = (pp0 - u0 * up) / np;
    let du1 = (pp1 - u1 * up) / np;
    let hy0 = s.hess[0] * yy0 + s.hess[1] * yy1;
    let hy1 = s.hess[1] * yy0 + s.hess[2] * yy1;
    [
        s.v * u0,
        s.v * u1,
        -np * s.grad[0],
        -np * s.grad[1],
        gy * u0 + s.v * du0,
        gy * u1 + s.v * du1,
        -np * hy0 - up * s.grad[0],
        -np * hy1 - up * s.grad[1],
    ]
}

fn rk4(c: &Bicubic, z: &State, h: f64) -> State {
    let add = |a: &State, b: &State, k: f64| -> State {
        let mut o = *a;
        for i in 0..8 {
            o[i] += k * b[i];
        }
        o
    };
    let k1 = rhs(c, z);
    let k2 = rhs(c, &add(z, &k1, 0.5 * h));
    let k3 = rhs(c, &add(z, &k2, 0.5 * h));
    let k4 = rhs(c, &add(z, &k3, h));
    let mut o = *z;
    for i in 0..8 {
        o[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    o
}

fn sample_of(c: &Bicubic, z: &State, s: f64) -> RaySample {
    let v = c.value(z[0], z[1]);
    let np = z[2].hypot(z[3]);
    RaySample {
        s,
        y: [z[0], z[1]],
        p: [z[2], z[3]],
        j: [[v * z[2] / np, z[4]], [v * z[3] / np, z[5]]],
    }
}

/// Initial variation for a fan parameterized by angle: `y` fixed, `p`
/// rotated.
pub fn angle_variation(p0: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    ([0.0, 0.0], [-p0[1], p0[0]])
}

/// General tracer with an explicit initial variation `(dy0, dp0)` and start
/// time `s0`. Stops when the ray leaves the grid, crosses the surface
/// upward (if `stop_at_surface`), or after `n_steps`.
pub fn trace_ray_with(
    x0: [f64; 2],
    xi0: [f64; 2],
    variation: ([f64; 2], [f64; 2]),
    c: &Bicubic,
    s0: f64,
    dt_ray: f64,
    n_steps: usize,
    stop_at_surface: bool,
) -> Result<RayPath> {
    let g = c.grid();
    if !g.contains(x0[0], x0[1]) {
        return Err(RtmError::Precondition(format!("ray start {x0:?} outside the grid")));
    }
    if xi0[0].hypot(xi0[1]) == 0.0 || !(dt_ray > 0.0) {
        return Err(RtmError::Precondition("ray needs a nonzero covector and positive step".into()));
    }
    let (dy, dp) = variation;
    let mut z: State = [x0[0], x0[1], xi0[0], xi0[1], dy[0], dy[1], dp[0], dp[1]];
    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push(sample_of(c, &z, s0));
    let mut exit = None;
    for n in 0..n_steps {
        let s = s0 + (n + 1) as f64 * dt_ray;
        let znew = rk4(c, &z, dt_ray);
        if stop_at_surface && z[1] >= 0.0 && znew[1] < 0.0 {
            let a = z[1] / (z[1] - znew[1]);
            let lerp = |i: usize| z[i] + a * (znew[i] - z[i]);
            exit = Some(Exit::Surface {
                point: [lerp(0), 0.0],
                time: s - dt_ray + a * dt_ray,
                p: [lerp(2), lerp(3)],
            });
            break;
        }
        if !g.contains(znew[0], znew[1]) {
            exit = Some(Exit::Domain { point: [znew[0], znew[1]], time: s });
            break;
        }
        z = znew;
        samples.push(sample_of(c, &z, s));
    }
    Ok(RayPath { samples, exit })
}

/// Ray from `x0` with initial covector `xi0`, varied along the takeoff angle.
pub fn trace_ray(x0: [f64; 2], xi0: [f64; 2], c: &Bicubic, dt_ray: f64, n_steps: usize) -> Result<RayPath> {
    trace_ray_with(x0, xi0, angle_variation(xi0), c, 0.0, dt_ray, n_steps, false)
}
