use num_complex::Complex64;

use crate::boundary::{apply_fm, remove_direct, FmParams, MuteSpec};
use crate::error::{Result, RtmError};
use crate::fdsolver::{
    has_nonfinite, ricker_series, simulate, simulate_reverse, Forcing, FreqSlices, Propagator, Receivers, Recorder, Recording,
    SimOutput, SimParams, SliceRequest, SourceTerm, SurfaceGather,
};
use crate::modelkit::config::BornMode;
use crate::modelkit::{ExperimentConfig, Grid2D, ScalarField};
use crate::par;

/// Everything the runs of one experiment share.
#[derive(Debug, Clone)]
pub struct Setup {
    pub grid: Grid2D,
    pub c: ScalarField,
    pub r: ScalarField,
    pub params: SimParams,
    pub receivers: Receivers,
    pub source: SourceTerm,
    pub signature: Vec<f64>,
    /// Frequencies and image window for slice accumulation.
    pub slices: SliceRequest,
    pub fm: FmParams,
    pub mode: BornMode,
}

impl Setup {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let grid = cfg.grid()?;
        let c = cfg.velocity_model()?;
        let r = cfg.reflectivity()?;
        let params = SimParams::from_config(cfg);
        let signature = ricker_series(cfg.source.peak_frequency, cfg.wavelet_delay(), params.dt, params.nt);
        let source = SourceTerm::point(&grid, cfg.source_cell()?, signature.clone())?;
        let (i0, j0, window) = grid.window_for_box(cfg.imaging.zone, 0)?;
        let slices = SliceRequest { freqs: cfg.frequencies(), i0, j0, window };
        Ok(Self {
            grid,
            c,
            r,
            params,
            receivers: Receivers::from_config(cfg)?,
            source,
            signature,
            slices,
            fm: fm_params(cfg),
            mode: cfg.imaging.born,
        })
    }

    /// Model `c (1 + r)`.
    pub fn perturbed_model(&self) -> Result<ScalarField> {
        self.c.zip_with(&self.r, |c, r| c * (1.0 + r))
    }

    /// Background run recording the surface gather and, optionally, the
    /// source-field slices.
    pub fn background_run(&self, with_slices: bool) -> Result<SimOutput> {
        let rec = Recording {
            receivers: Some(self.receivers.clone()),
            slices: with_slices.then(|| self.slices.clone()),
            snapshot_every: None,
        };
        simulate(&self.c, &self.source, self.params, &rec)
    }

    /// Scattered data for the configured Born mode; `background` is the
    /// gather of [`Setup::background_run`].
    pub fn scattered(&self, background: &SurfaceGather) -> Result<SurfaceGather> {
        match self.mode {
            BornMode::Nonlinear => {
                let rec = Recording { receivers: Some(self.receivers.clone()), ..Default::default() };
                let full = simulate(&self.perturbed_model()?, &self.source, self.params, &rec)?
                    .gather
                    .ok_or_else(|| RtmError::Precondition("no gather recorded".into()))?;
                remove_direct(&full, background)
            }
            BornMode::Linearized => self.linearized(),
        }
    }

    /// Second-order field driven by `2 r c^-2 d_tt u0`, stepped in lockstep
    /// with the background field `u0`.
    pub fn linearized(&self) -> Result<SurfaceGather> {
        let grid = self.grid;
        let dt = self.params.dt;
        let nt = self.params.nt;
        let prop = Propagator::new(&self.c, dt, self.params.sponge)?;
        let rec = Recording { receivers: Some(self.receivers.clone()), ..Default::default() };
        let mut recorder = Recorder::new(grid, dt, nt, &rec)?;
        let n = grid.len();
        let (mut p0, mut c0, mut n0) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let (mut p1, mut c1, mut n1) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        // 2 r / (c^2 dt^2), zero where r vanishes
        let coef: Vec<f64> = self
            .r
            .values()
            .iter()
            .zip(self.c.values())
            .map(|(r, c)| 2.0 * r / (c * c * dt * dt))
            .collect();
        let mut force = vec![0.0; n];
        let mut pts = Vec::new();
        for k in 0..nt {
            recorder.observe(&c1, k)?;
            if k + 1 == nt {
                break;
            }
            self.source.forcing_at(&grid, k, &mut pts);
            prop.step_into(&p0, &mut c0, &mut n0, Forcing::Sparse(&pts));
            {
                let (p0r, c0r, n0r) = (&p0, &c0, &n0);
                par::for_each_mut(&mut force, |i, f| {
                    *f = if coef[i] == 0.0 { 0.0 } else { coef[i] * (n0r[i] - 2.0 * c0r[i] + p0r[i]) };
                });
            }
            prop.step_into(&p1, &mut c1, &mut n1, Forcing::Dense(&force));
            if has_nonfinite(&n1) || has_nonfinite(&n0) {
                return Err(RtmError::Instability { step: k + 1 });
            }
            std::mem::swap(&mut p0, &mut c0);
            std::mem::swap(&mut c0, &mut n0);
            std::mem::swap(&mut p1, &mut c1);
            std::mem::swap(&mut c1, &mut n1);
        }
        recorder
            .finish()
            .gather
            .ok_or_else(|| RtmError::Precondition("no gather recorded".into()))
    }

    /// Apply the boundary filter and continue the result anticausally.
    pub fn reverse_continue(&self, d_scat: &SurfaceGather) -> Result<FreqSlices> {
        reverse_continue(d_scat, &self.c, self.params, &self.fm, &self.slices)
    }

    /// Rectangle-rule spectrum of the source signature on the slice frequencies.
    pub fn wavelet_spectrum(&self) -> Vec<Complex64> {
        wavelet_spectrum(&self.signature, self.params.dt, &self.slices.freqs)
    }
}

/// Boundary filter settings implied by a config.
pub fn fm_params(cfg: &ExperimentConfig) -> FmParams {
    let im = &cfg.imaging;
    FmParams {
        c_surface: cfg.velocity.c0,
        taper_fraction: cfg.acquisition.taper_fraction,
        grazing_delta: im.grazing_delta,
        mute: im.mute.then(|| MuteSpec {
            source_x1: cfg.source.position[0],
            delay: cfg.wavelet_delay(),
            half_width: im.mute_window,
        }),
        f_max: im.f_hi,
        pad: true,
    }
}

/// Scattered surface data of a config: background and perturbed (or
/// linearized) runs.
pub fn born_data(cfg: &ExperimentConfig) -> Result<SurfaceGather> {
    let s = Setup::from_config(cfg)?;
    let bg = s.background_run(false)?.gather.expect("receivers requested");
    s.scattered(&bg)
}

/// Source-field slices `g^(x, w)` on the image window.
pub fn source_slices(cfg: &ExperimentConfig) -> Result<FreqSlices> {
    let s = Setup::from_config(cfg)?;
    Ok(s.background_run(true)?.slices.expect("slices requested"))
}

/// `u_r^`: boundary filter, then anticausal continuation through `c` from
/// the surface row `x2 = 0`.
pub fn reverse_continue(
    d_scat: &SurfaceGather,
    c: &ScalarField,
    params: SimParams,
    fm: &FmParams,
    slices: &SliceRequest,
) -> Result<FreqSlices> {
    if d_scat.nt != params.nt {
        return Err(RtmError::GridMismatch(format!(
            "gather has {} samples, run has {}",
            d_scat.nt, params.nt
        )));
    }
    let filtered = apply_fm(d_scat, fm)?;
    let src = SourceTerm::from_gather(c.grid(), &filtered, 0.0)?;
    let rec = Recording { slices: Some(slices.clone()), ..Default::default() };
    Ok(simulate_reverse(c, &src, params, &rec)?.slices.expect("slices requested"))
}

/// `sum_k w_k exp(-i 2 pi f k dt) dt`, the same quadrature the slices use.
pub fn wavelet_spectrum(signature: &[f64], dt: f64, freqs: &[f64]) -> Vec<Complex64> {
    freqs
        .iter()
        .map(|&f| {
            let w = 2.0 * std::f64::consts::PI * f;
            signature
                .iter()
                .enumerate()
                .map(|(k, &s)| Complex64::from_polar(s * dt, -w * k as f64 * dt))
                .sum()
        })
        .collect()
}
