//! The full chain for one configuration: forward modeling, boundary
//! filtering, reverse continuation, imaging and scoring.

use std::time::Instant;

use crate::error::{Result, RtmError, StageExt};
use crate::fdsolver::{FreqSlices, SurfaceGather};
use crate::modelkit::config::Axis;
use crate::modelkit::{ExperimentConfig, Grid2D, ScalarField};
use crate::raytools::{go_fields, resolution_symbol, Acquisition, Bicubic, FanSpec, GoFields};
use crate::report::{amplitude_ratio, box_values, compare_traces, correlation, low_wavenumber_fraction_windowed, TraceComparison};
use crate::rtm::{
    image_excitation, image_ratio, image_xcorr, predict_aperture, ApertureMap, ImageResult, ImagingBand, Setup,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Form the excitation image even where the source field multipaths.
    pub force: bool,
    /// Cell stride of the aperture map; 0 skips it.
    pub aperture_stride: usize,
    pub aperture_dips: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { force: false, aperture_stride: 10, aperture_dips: 61 }
    }
}

pub struct ExperimentRun {
    pub setup: Setup,
    pub background: SurfaceGather,
    pub scattered: SurfaceGather,
    pub g: FreqSlices,
    pub ur: FreqSlices,
    pub go: GoFields,
    pub band: ImagingBand,
    /// Background velocity and true reflectivity on the image window.
    pub c_window: ScalarField,
    pub truth: ScalarField,
    pub ratio: ImageResult,
    pub excitation: Option<ImageResult>,
    /// Multipath fraction of the image zone and whether it passed the limit.
    pub multipath_fraction: f64,
    pub sme_ok: bool,
    pub xcorr: ImageResult,
    pub aperture: Option<ApertureMap>,
}

/// Acquisition cutoffs shared by the boundary filter and the aperture map.
pub fn acquisition(cfg: &ExperimentConfig) -> Acquisition {
    Acquisition {
        x1_min: cfg.acquisition.x1_min,
        x1_max: cfg.acquisition.x1_max,
        taper_fraction: cfg.acquisition.taper_fraction,
        grazing_delta: cfg.imaging.grazing_delta,
    }
}

pub fn record_length(cfg: &ExperimentConfig) -> f64 {
    cfg.time.steps as f64 * cfg.time.dt
}

/// Ray-traced source fields over the whole grid.
pub fn source_go(cfg: &ExperimentConfig, c: &ScalarField) -> Result<GoFields> {
    let fan = FanSpec::downgoing(cfg.imaging.fan_rays, c.max(), c.grid().dx, record_length(cfg));
    go_fields(c, cfg.source.position, &fan)
}

fn timed<T>(label: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let out = f();
    if std::env::var_os("RTM_TRACE").is_some() {
        eprintln!("[{label}] {:.2} s", t.elapsed().as_secs_f64());
    }
    out
}

pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentRun> {
    let setup = Setup::from_config(cfg).stage("setup")?;
    let band = ImagingBand::from_config(cfg).stage("setup")?;
    let bg = timed("background", || setup.background_run(true)).stage("forward")?;
    let background = bg.gather.expect("receivers requested");
    let g = bg.slices.expect("slices requested");
    let scattered = timed("scattered", || setup.scattered(&background)).stage("forward")?;
    let ur = timed("reverse", || setup.reverse_continue(&scattered)).stage("migrate")?;
    let go = timed("rays", || source_go(cfg, &setup.c)).stage("rays")?;

    let w = setup.slices.window;
    let (i0, j0) = (setup.slices.i0, setup.slices.j0);
    let c_window = setup.c.extract(i0, j0, w)?;
    let truth = setup.r.extract(i0, j0, w)?;
    let ratio = timed("ratio", || image_ratio(&g, &ur, &c_window, &band, cfg.imaging.epsilon)).stage("image")?;
    let xcorr = image_xcorr(&g, &ur, &band).stage("image")?;

    let zone = cfg.imaging.zone;
    let (multipath_fraction, sme_ok) = match go.check_sme(zone, cfg.imaging.sme_limit) {
        Ok(f) => (f, true),
        Err(RtmError::SmeViolation { fraction, .. }) => (fraction, false),
        Err(e) => return Err(e).stage("image"),
    };
    let excitation = if sme_ok || opts.force {
        let wavelet = setup.wavelet_spectrum();
        Some(timed("excitation", || image_excitation(&ur, &go, &c_window, &band, &wavelet)).stage("image")?)
    } else {
        None
    };
    let aperture = (opts.aperture_stride > 0)
        .then(|| -> Result<ApertureMap> {
            let s = opts.aperture_stride;
            let coarse = Grid2D::new(
                (w.nx1 - 1) / s + 1,
                (w.nx2 - 1) / s + 1,
                w.dx * s as f64,
                w.origin,
            )?;
            let bc = Bicubic::new(setup.c.clone());
            timed("aperture", || {
                Ok(predict_aperture(coarse, &go, &bc, &acquisition(cfg), record_length(cfg), opts.aperture_dips))
            })
        })
        .transpose()
        .stage("aperture")?;
    Ok(ExperimentRun {
        setup,
        background,
        scattered,
        g,
        ur,
        go,
        band,
        c_window,
        truth,
        ratio,
        excitation,
        multipath_fraction,
        sme_ok,
        xcorr,
        aperture,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketScore {
    pub center: [f64; 2],
    pub correlation: f64,
    pub amplitude_ratio: f64,
}

/// Box of two window widths around a packet center.
pub fn packet_box(p: &crate::modelkit::WavePacketSpec) -> [f64; 4] {
    [
        p.center[0] - 2.0 * p.widths[0],
        p.center[0] + 2.0 * p.widths[0],
        p.center[1] - 2.0 * p.widths[1],
        p.center[1] + 2.0 * p.widths[1],
    ]
}

pub fn packet_scores(cfg: &ExperimentConfig, truth: &ScalarField, image: &ScalarField) -> Vec<PacketScore> {
    cfg.contrast
        .packets
        .iter()
        .map(|p| {
            let (t, r) = box_values(truth, image, packet_box(p), &[]);
            PacketScore { center: p.center, correlation: correlation(&t, &r), amplitude_ratio: amplitude_ratio(&t, &r) }
        })
        .collect()
}

/// Correlation of two images over the packet boxes (worst packet).
pub fn method_agreement(cfg: &ExperimentConfig, a: &ScalarField, b: &ScalarField) -> f64 {
    cfg.contrast
        .packets
        .iter()
        .map(|p| {
            let (x, y) = box_values(a, b, packet_box(p), &[]);
            correlation(&x, &y)
        })
        .fold(1.0, f64::min)
}

/// Columns of `window` where the reflector's spectrum (its central
/// wavenumber and one spectral width either side, at zero dip) is predicted
/// to be recoverable: symbol at least one half at all three wavenumbers, and
/// the source field single-valued at the reflector.
pub fn resolved_columns(
    cfg: &ExperimentConfig,
    r: &crate::modelkit::config::ReflectorSpec,
    go: &GoFields,
    c: &Bicubic,
    window: Grid2D,
) -> Vec<f64> {
    let acq = acquisition(cfg);
    let im = &cfg.imaging;
    let band = |f: f64| crate::modelkit::taper::band_weight(f, im.f_lo, im.f_hi, im.ramp_fraction);
    let spread = 2.0 / r.thickness;
    let ks = [r.wavenumber - spread, r.wavenumber, r.wavenumber + spread];
    let gg = *go.grid();
    let t_max = record_length(cfg);
    let cols: Vec<Option<f64>> = crate::par::map_range(window.nx1, |i| {
        let x1 = window.x1(i);
        let inside = x1 >= r.x1_range[0] + 0.5 * r.taper * (r.x1_range[1] - r.x1_range[0])
            && x1 <= r.x1_range[1] - 0.5 * r.taper * (r.x1_range[1] - r.x1_range[0]);
        let single = gg
            .nearest(x1, r.depth)
            .is_some_and(|(a, b)| !go.multipath_mask[gg.idx(a, b)] && !go.caustic_mask[gg.idx(a, b)]);
        let ok = inside
            && single
            && ks.iter().all(|&k| k > 0.0 && resolution_symbol([x1, r.depth], [0.0, -k], go, c, &acq, t_max, band) >= 0.5);
        ok.then_some(x1)
    });
    cols.into_iter().flatten().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectorScore {
    pub depth: f64,
    /// Resolved columns used for the score.
    pub columns: Vec<f64>,
    pub correlation: f64,
    pub amplitude_ratio: f64,
    /// Per lateral segment: center, correlation, amplitude ratio.
    pub segments: Vec<(f64, f64, f64)>,
}

/// Reflector scores over its resolved columns, two thicknesses either side
/// of its depth, away from the artifact zones.
pub fn reflector_scores(
    cfg: &ExperimentConfig,
    truth: &ScalarField,
    image: &ScalarField,
    go: &GoFields,
    c: &Bicubic,
    segment: f64,
) -> Vec<ReflectorScore> {
    let g = *truth.grid();
    let ex = &cfg.evaluation.artifact_zones;
    let excluded = |x1: f64, x2: f64| ex.iter().any(|z| x1 >= z[0] && x1 <= z[1] && x2 >= z[2] && x2 <= z[3]);
    cfg.contrast
        .reflectors
        .iter()
        .map(|r| {
            let columns = resolved_columns(cfg, r, go, c, g);
            let collect = |lo: f64, hi: f64| {
                let (mut t, mut v) = (Vec::new(), Vec::new());
                for i in 0..g.nx1 {
                    let x1 = g.x1(i);
                    if x1 < lo || x1 >= hi || !columns.iter().any(|&x| (x - x1).abs() < 0.5 * g.dx) {
                        continue;
                    }
                    for j in 0..g.nx2 {
                        let x2 = g.x2(j);
                        if (x2 - r.depth).abs() <= 2.0 * r.thickness && !excluded(x1, x2) {
                            t.push(truth.at(i, j));
                            v.push(image.at(i, j));
                        }
                    }
                }
                (t, v)
            };
            let (t, v) = collect(f64::NEG_INFINITY, f64::INFINITY);
            let mut segments = Vec::new();
            if let (Some(&first), Some(&last)) = (columns.first(), columns.last()) {
                let mut x = first;
                while x <= last {
                    let (ts, vs) = collect(x, x + segment);
                    if ts.len() > 10 {
                        segments.push((x + 0.5 * segment, correlation(&ts, &vs), amplitude_ratio(&ts, &vs)));
                    }
                    x += segment;
                }
            }
            ReflectorScore {
                depth: r.depth,
                correlation: correlation(&t, &v),
                amplitude_ratio: amplitude_ratio(&t, &v),
                columns,
                segments,
            }
        })
        .collect()
}

/// Wavenumber below which image energy can only come from source and
/// receiver waves meeting at more than 120 degrees, i.e. from near
/// transmission: `omega / c` at the lower plateau edge and the fastest
/// velocity of the zone.
pub fn band_wavenumber_floor(band: &ImagingBand, c_window: &ScalarField, ramp_fraction: f64) -> f64 {
    let f_plateau = band.f_lo + ramp_fraction * (band.f_hi - band.f_lo);
    2.0 * std::f64::consts::PI * f_plateau / c_window.max()
}

impl ExperimentRun {
    pub fn traces(&self, cfg: &ExperimentConfig) -> Result<Vec<TraceComparison>> {
        cfg.evaluation
            .traces
            .iter()
            .map(|t| compare_traces(&self.truth, &self.ratio.image, t.axis, t.coord, Some(t.window)))
            .collect()
    }

    pub fn low_wavenumber(&self, cfg: &ExperimentConfig) -> (f64, f64, f64) {
        let k = band_wavenumber_floor(&self.band, &self.c_window, cfg.imaging.ramp_fraction);
        let ex = &cfg.evaluation.artifact_zones;
        let ramp = 10.0 * self.truth.grid().dx;
        (
            k,
            low_wavenumber_fraction_windowed(&self.ratio.image, k, ex, ramp),
            low_wavenumber_fraction_windowed(&self.xcorr.image, k, ex, ramp),
        )
    }

    /// Every score as `key=value` lines, in a fixed order.
    pub fn metrics(&self, cfg: &ExperimentConfig) -> Result<Vec<(String, String)>> {
        let mut m: Vec<(String, String)> = Vec::new();
        let mut put = |k: String, v: String| m.push((k, v));
        put("name".into(), cfg.name.clone());
        put("scattered_energy".into(), format!("{:.6e}", self.scattered.energy()));
        put("multipath_fraction".into(), format!("{:.6}", self.multipath_fraction));
        put("sme_ok".into(), self.sme_ok.to_string());
        put("caustic_cells".into(), self.go.caustic_cells().to_string());
        for (k, s) in packet_scores(cfg, &self.truth, &self.ratio.image).iter().enumerate() {
            put(format!("packet{k}.correlation"), format!("{:.6}", s.correlation));
            put(format!("packet{k}.amplitude_ratio"), format!("{:.6}", s.amplitude_ratio));
        }
        if let Some(ex) = &self.excitation {
            for (k, s) in packet_scores(cfg, &self.truth, &ex.image).iter().enumerate() {
                put(format!("excitation.packet{k}.correlation"), format!("{:.6}", s.correlation));
                put(format!("excitation.packet{k}.amplitude_ratio"), format!("{:.6}", s.amplitude_ratio));
            }
            if !cfg.contrast.packets.is_empty() {
                put(
                    "method_agreement".into(),
                    format!("{:.6}", method_agreement(cfg, &self.ratio.image, &ex.image)),
                );
            }
        }
        let bc = Bicubic::new(self.setup.c.clone());
        for (k, r) in reflector_scores(cfg, &self.truth, &self.ratio.image, &self.go, &bc, 200.0).iter().enumerate() {
            let span = match (r.columns.first(), r.columns.last()) {
                (Some(a), Some(b)) => format!("{a:.0}..{b:.0}"),
                _ => "none".into(),
            };
            put(format!("reflector{k}.resolved_x1"), span);
            put(format!("reflector{k}.correlation"), format!("{:.6}", r.correlation));
            put(format!("reflector{k}.amplitude_ratio"), format!("{:.6}", r.amplitude_ratio));
            for (x, c, a) in &r.segments {
                put(format!("reflector{k}.x1_{x:.0}.correlation"), format!("{c:.6}"));
                put(format!("reflector{k}.x1_{x:.0}.amplitude_ratio"), format!("{a:.6}"));
            }
        }
        for t in self.traces(cfg)? {
            let axis = match t.axis {
                Axis::X1 => "x1",
                Axis::X2 => "x2",
            };
            put(format!("trace.{axis}_{:.0}.correlation", t.coord), format!("{:.6}", t.correlation));
            put(format!("trace.{axis}_{:.0}.amplitude_ratio", t.coord), format!("{:.6}", t.amplitude_ratio));
        }
        let (k, lr, lx) = self.low_wavenumber(cfg);
        put("low_k.cutoff".into(), format!("{k:.6}"));
        put("low_k.ratio_fraction".into(), format!("{lr:.6e}"));
        put("low_k.xcorr_fraction".into(), format!("{lx:.6e}"));
        if let Some(a) = &self.aperture {
            for (k, z) in cfg.evaluation.artifact_zones.iter().enumerate() {
                let center = (0.5 * (z[0] + z[1]), 0.5 * (z[2] + z[3]));
                let radius = 0.5 * (z[1] - z[0]).hypot(z[3] - z[2]);
                put(format!("artifact_zone{k}.multipath_flagged"), a.multipath_near(center, radius).to_string());
            }
        }
        Ok(m)
    }
}
