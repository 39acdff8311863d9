//! Snell covariables: reflector wavenumber `zeta` versus scattered
//! wavevector `xi` for a given incident direction `n_s`.

use crate::error::{Result, RtmError};

#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

/// `zeta = xi - |xi| n_s`.
pub fn zeta_from_xi(xi: [f64; 2], ns: [f64; 2]) -> [f64; 2] {
    let n = norm(xi);
    [xi[0] - n * ns[0], xi[1] - n * ns[1]]
}

/// Inverse on the halfspace `zeta . n_s < 0`: `xi = zeta + t n_s` with
/// `t = -|zeta|^2 / (2 zeta . n_s) = |xi|`.
pub fn xi_from_zeta(zeta: [f64; 2], ns: [f64; 2]) -> Result<[f64; 2]> {
    let zn = dot(zeta, ns);
    if !(zn < 0.0) {
        return Err(RtmError::Precondition(format!(
            "zeta {zeta:?} is outside the halfspace zeta . n_s < 0"
        )));
    }
    let t = -dot(zeta, zeta) / (2.0 * zn);
    Ok([zeta[0] + t * ns[0], zeta[1] + t * ns[1]])
}

/// Jacobian determinant of `xi -> zeta`: `1 - (xi/|xi|) . n_s`.
pub fn snell_jacobian(xi: [f64; 2], ns: [f64; 2]) -> f64 {
    1.0 - dot(xi, ns) / norm(xi)
}
