use crate::modelkit::{Grid2D, ScalarField};
use crate::raytools::{resolution_mask, Acquisition, Bicubic, GoFields};

/// Recoverable reflector dips per cell. Dips are the angle of the reflector
/// normal from vertical, degrees, in `(-90, 90)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureMap {
    pub grid: Grid2D,
    /// Smallest and largest dip with symbol above one half, per cell.
    pub dip_range: Vec<Option<[f64; 2]>>,
    /// Fraction of sampled dips with symbol above one half.
    pub coverage: ScalarField,
    /// Source multipath or caustic at the cell (SME fails there).
    pub multipath: Vec<bool>,
    pub dips: Vec<f64>,
}

impl ApertureMap {
    pub fn covers(&self, i: usize, j: usize, dip: f64) -> bool {
        self.dip_range[self.grid.idx(i, j)].is_some_and(|[a, b]| dip >= a && dip <= b)
    }

    pub fn multipath_near(&self, x: (f64, f64), radius: f64) -> bool {
        (0..self.grid.len()).any(|k| {
            let (i, j) = self.grid.ij(k);
            let (x1, x2) = self.grid.coords(i, j);
            self.multipath[k] && (x1 - x.0).hypot(x2 - x.1) <= radius
        })
    }
}

/// Sample the resolution symbol over `n_dips` reflector normals at every
/// cell of `zone` (a window of the ray grid), tracing scattered rays until
/// `t_max`.
pub fn predict_aperture(
    zone: Grid2D,
    go: &GoFields,
    c: &Bicubic,
    acq: &Acquisition,
    t_max: f64,
    n_dips: usize,
) -> ApertureMap {
    let dips: Vec<f64> = (0..n_dips).map(|k| -89.0 + 178.0 * k as f64 / (n_dips.max(2) - 1) as f64).collect();
    let gg = *go.grid();
    let rows = crate::par::map_range(zone.len(), |k| {
        let (i, j) = zone.ij(k);
        let (x1, x2) = zone.coords(i, j);
        let multi = gg
            .nearest(x1, x2)
            .map(|(gi, gj)| {
                let idx = gg.idx(gi, gj);
                go.multipath_mask[idx] || go.caustic_mask[idx]
            })
            .unwrap_or(false);
        let (mut range, mut hits): (Option<[f64; 2]>, usize) = (None, 0);
        for &d in &dips {
            let a = d.to_radians();
            // unit normal pointing up for dip 0
            let zeta = [a.sin(), -a.cos()];
            if resolution_mask([x1, x2], zeta, go, c, acq, t_max) > 0.5 {
                hits += 1;
                range = Some(range.map_or([d, d], |[a, b]| [a.min(d), b.max(d)]));
            }
        }
        (range, hits as f64 / dips.len() as f64, multi)
    });
    ApertureMap {
        grid: zone,
        dip_range: rows.iter().map(|r| r.0).collect(),
        coverage: ScalarField::new(zone, rows.iter().map(|r| r.1).collect()).expect("zone sized"),
        multipath: rows.iter().map(|r| r.2).collect(),
        dips,
    }
}
