//! Time loops: causal forward modeling and anticausal continuation.

use super::gather::SurfaceGather;
use super::propagator::{has_nonfinite, Forcing, Propagator, Sponge};
use super::slices::FreqSlices;
use super::source::SourceTerm;
use crate::error::{Result, RtmError};
use crate::modelkit::{ExperimentConfig, Grid2D, ScalarField};

/// Time stepping parameters shared by every run of an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub dt: f64,
    pub nt: usize,
    pub sponge: Sponge,
}

impl SimParams {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            dt: cfg.time.dt,
            nt: cfg.time.steps,
            sponge: Sponge { width: cfg.sponge.width, strength: cfg.sponge.strength },
        }
    }
}

/// Surface receivers: one grid row, a list of columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Receivers {
    pub row: usize,
    pub cols: Vec<usize>,
}

impl Receivers {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(Self { row: cfg.surface_row()?, cols: cfg.receiver_columns()? })
    }
}

/// Frequencies to accumulate and the sub-window `(i0, j0, window)` they cover.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceRequest {
    pub freqs: Vec<f64>,
    pub i0: usize,
    pub j0: usize,
    pub window: Grid2D,
}

impl SliceRequest {
    pub fn full(freqs: &[f64], grid: Grid2D) -> Self {
        Self { freqs: freqs.to_vec(), i0: 0, j0: 0, window: grid }
    }
}

/// What a run should keep.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Recording {
    pub receivers: Option<Receivers>,
    pub slices: Option<SliceRequest>,
    /// Keep every n-th time level (physical index divisible by n).
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimOutput {
    pub gather: Option<SurfaceGather>,
    pub slices: Option<FreqSlices>,
    /// `(physical time index, field)`, in stepping order.
    pub snapshots: Vec<(usize, ScalarField)>,
}

/// Collects products from successive time levels.
pub struct Recorder {
    grid: Grid2D,
    dt: f64,
    receivers: Option<Receivers>,
    gather: Option<SurfaceGather>,
    slices: Option<(usize, usize, FreqSlices)>,
    snapshot_every: Option<usize>,
    snapshots: Vec<(usize, ScalarField)>,
}

impl Recorder {
    pub fn new(grid: Grid2D, dt: f64, nt: usize, rec: &Recording) -> Result<Self> {
        let gather = match &rec.receivers {
            Some(r) => {
                if r.cols.is_empty() || r.row >= grid.nx2 || r.cols.iter().any(|&i| i >= grid.nx1) {
                    return Err(RtmError::Precondition("receivers outside the grid".into()));
                }
                let dx_rec = if r.cols.len() > 1 {
                    grid.x1(r.cols[1]) - grid.x1(r.cols[0])
                } else {
                    grid.dx
                };
                Some(SurfaceGather::zeros(nt, r.cols.len(), dt, grid.x1(r.cols[0]), dx_rec))
            }
            None => None,
        };
        let slices = match &rec.slices {
            Some(s) => {
                if s.i0 + s.window.nx1 > grid.nx1 || s.j0 + s.window.nx2 > grid.nx2 {
                    return Err(RtmError::Precondition("slice window leaves the grid".into()));
                }
                Some((s.i0, s.j0, FreqSlices::zeros(&s.freqs, s.window)))
            }
            None => None,
        };
        Ok(Self {
            grid,
            dt,
            receivers: rec.receivers.clone(),
            gather,
            slices,
            snapshot_every: rec.snapshot_every.filter(|&n| n > 0),
            snapshots: Vec::new(),
        })
    }

    /// Record time level `k` (physical index, `t = k dt`).
    pub fn observe(&mut self, u: &[f64], k: usize) -> Result<()> {
        if let (Some(r), Some(g)) = (&self.receivers, &mut self.gather) {
            let base = r.row * self.grid.nx1;
            let n = g.nrec;
            for (slot, &i) in g.data[k * n..(k + 1) * n].iter_mut().zip(&r.cols) {
                *slot = u[base + i];
            }
        }
        if let Some((i0, j0, s)) = &mut self.slices {
            s.accumulate(u, &self.grid, *i0, *j0, k as f64 * self.dt, self.dt);
        }
        if let Some(n) = self.snapshot_every {
            if k.is_multiple_of(n) {
                self.snapshots.push((k, ScalarField::new(self.grid, u.to_vec())?));
            }
        }
        Ok(())
    }

    pub fn finish(self) -> SimOutput {
        SimOutput {
            gather: self.gather,
            slices: self.slices.map(|(_, _, s)| s),
            snapshots: self.snapshots,
        }
    }
}

fn drive(
    c: &ScalarField,
    src: &SourceTerm,
    params: SimParams,
    rec: &Recording,
    reverse: bool,
) -> Result<SimOutput> {
    let grid = *c.grid();
    let nt = params.nt;
    let prop = Propagator::new(c, params.dt, params.sponge)?;
    let mut recorder = Recorder::new(grid, params.dt, nt, rec)?;
    let mut prev = vec![0.0; grid.len()];
    let mut curr = vec![0.0; grid.len()];
    let mut next = vec![0.0; grid.len()];
    let mut pts = Vec::new();
    let last = nt - 1;
    for k in 0..nt {
        // reversed stepping visits physical levels last, last-1, ..., 0
        let phys = if reverse { last - k } else { k };
        recorder.observe(&curr, phys)?;
        if k == last {
            break;
        }
        src.forcing_at(&grid, phys, &mut pts);
        prop.step_into(&prev, &mut curr, &mut next, Forcing::Sparse(&pts));
        if has_nonfinite(&next) {
            return Err(RtmError::Instability { step: k + 1 });
        }
        std::mem::swap(&mut prev, &mut curr);
        std::mem::swap(&mut curr, &mut next);
    }
    Ok(recorder.finish())
}

/// Causal run from rest: level `k` sits at `t = k dt`, and the source
/// sample `k` drives the step from `k` to `k + 1`.
pub fn simulate(c: &ScalarField, src: &SourceTerm, params: SimParams, rec: &Recording) -> Result<SimOutput> {
    if params.nt < 2 {
        return Err(RtmError::Precondition("need at least two time levels".into()));
    }
    drive(c, src, params, rec, false)
}

/// Anticausal run: the field vanishes after the last level and the loop
/// steps backwards in time, so the loop's `k`-th level is the physical level
/// `nt - 1 - k`. Slices are accumulated against physical time.
pub fn simulate_reverse(
    c: &ScalarField,
    surface_src: &SourceTerm,
    params: SimParams,
    rec: &Recording,
) -> Result<SimOutput> {
    if params.nt < 2 {
        return Err(RtmError::Precondition("need at least two time levels".into()));
    }
    if let SourceTerm::SurfaceLine { .. } = surface_src {
        if surface_src.len() != params.nt {
            return Err(RtmError::GridMismatch(format!(
                "gather has {} samples, run has {}",
                surface_src.len(),
                params.nt
            )));
        }
    }
    drive(c, surface_src, params, rec, true)
}
