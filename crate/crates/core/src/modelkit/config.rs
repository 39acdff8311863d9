//! Experiment configuration loaded from TOML.
//!
//! Every section rejects unknown keys. Velocities may be given in km/s with
//! `unit = "km/s"`; they are converted to m/s on load and everything
//! downstream works in meters and seconds.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::io::read_field;
use super::packet::{packet_sum, WavePacketSpec};
use super::taper::tukey;
use super::velocity::{build_gradient_model, build_lens_model, Lens};
use super::{Grid2D, ScalarField};
use crate::error::{Result, RtmError};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nx1: usize,
    pub nx2: usize,
    pub dx: f64,
    pub origin: [f64; 2],
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
pub enum VelocityUnit {
    #[default]
    #[serde(rename = "m/s")]
    MetersPerSecond,
    #[serde(rename = "km/s")]
    KilometersPerSecond,
}

impl VelocityUnit {
    pub fn scale(self) -> f64 {
        match self {
            VelocityUnit::MetersPerSecond => 1.0,
            VelocityUnit::KilometersPerSecond => 1000.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LensSection {
    pub center: [f64; 2],
    pub radius: f64,
    /// Velocity change at the center, in the section's unit.
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VelocitySection {
    #[serde(default)]
    pub unit: VelocityUnit,
    pub c0: f64,
    /// Vertical gradient, velocity unit per meter.
    #[serde(default)]
    pub gradient: f64,
    pub lens: Option<LensSection>,
}

/// Horizontal band-limited reflector: a cosine in depth under a Gaussian
/// envelope, with a Tukey taper along x1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReflectorSpec {
    pub depth: f64,
    pub wavenumber: f64,
    pub thickness: f64,
    pub x1_range: [f64; 2],
    pub taper: f64,
    pub amplitude: f64,
}

impl ReflectorSpec {
    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        let z = x2 - self.depth;
        let env = (-(z / self.thickness).powi(2)).exp();
        let lateral = tukey(x1, self.x1_range[0], self.x1_range[1], self.taper);
        self.amplitude * (self.wavenumber * z).cos() * env * lateral
    }

    pub fn support(&self) -> [f64; 4] {
        [
            self.x1_range[0],
            self.x1_range[1],
            self.depth - 3.0 * self.thickness,
            self.depth + 3.0 * self.thickness,
        ]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct ContrastSection {
    /// Shallowest depth any contrast support may reach.
    pub min_depth: f64,
    #[serde(default)]
    pub packets: Vec<WavePacketSpec>,
    #[serde(default)]
    pub reflectors: Vec<ReflectorSpec>,
    /// Explicit reflectivity field, resolved relative to the config file.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub position: [f64; 2],
    pub peak_frequency: f64,
    /// Wavelet delay; defaults to `1.5 / peak_frequency`.
    pub delay: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpongeSection {
    pub width: usize,
    pub strength: f64,
}

impl Default for SpongeSection {
    fn default() -> Self {
        Self { width: 50, strength: 0.0015 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AcquisitionSection {
    pub x1_min: f64,
    pub x1_max: f64,
    #[serde(default = "default_taper")]
    pub taper_fraction: f64,
}

fn default_taper() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum BornMode {
    #[default]
    Nonlinear,
    Linearized,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ImagingSection {
    pub f_lo: f64,
    pub f_hi: f64,
    #[serde(default = "default_nfreq")]
    pub n_freq: usize,
    #[serde(default = "default_ramp")]
    pub ramp_fraction: f64,
    #[serde(default = "default_eps")]
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub grazing_delta: f64,
    #[serde(default)]
    pub mute: bool,
    /// Half-width of the direct-arrival mute, seconds.
    #[serde(default = "default_mute_window")]
    pub mute_window: f64,
    /// Image zone `[x1_min, x1_max, x2_min, x2_max]`.
    pub zone: [f64; 4],
    #[serde(default)]
    pub born: BornMode,
    /// Largest tolerated fraction of multipath cells in the image zone.
    #[serde(default = "default_sme")]
    pub sme_limit: f64,
    #[serde(default = "default_fan")]
    pub fan_rays: usize,
}

fn default_nfreq() -> usize {
    32
}
fn default_ramp() -> f64 {
    0.25
}
fn default_eps() -> f64 {
    1e-4
}
fn default_delta() -> f64 {
    0.1
}
fn default_mute_window() -> f64 {
    0.05
}
fn default_sme() -> f64 {
    0.0
}
fn default_fan() -> usize {
    4001
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X1,
    X2,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TraceSpec {
    pub axis: Axis,
    pub coord: f64,
    /// Window along the profile, meters.
    pub window: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct EvaluationSection {
    #[serde(default)]
    pub traces: Vec<TraceSpec>,
    /// Boxes where artifacts are expected; excluded from amplitude scoring.
    #[serde(default)]
    pub artifact_zones: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub grid: GridSection,
    pub velocity: VelocitySection,
    #[serde(default)]
    pub contrast: ContrastSection,
    pub source: SourceSection,
    pub time: TimeSection,
    #[serde(default)]
    pub sponge: SpongeSection,
    pub acquisition: AcquisitionSection,
    pub imaging: ImagingSection,
    pub output: OutputSection,
    #[serde(default)]
    pub evaluation: EvaluationSection,
    /// Directory the config was read from; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| RtmError::Config(e.to_string()))?;
        cfg.normalize_units();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| RtmError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if let Some(f) = &cfg.contrast.file {
            if !cfg.resolve(f).exists() {
                return Err(RtmError::Config(format!("contrast file {} not found", f.display())));
            }
        }
        Ok(cfg)
    }

    fn normalize_units(&mut self) {
        let s = self.velocity.unit.scale();
        self.velocity.c0 *= s;
        self.velocity.gradient *= s;
        if let Some(l) = &mut self.velocity.lens {
            l.delta *= s;
        }
        self.velocity.unit = VelocityUnit::MetersPerSecond;
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output.dir)
    }

    pub fn grid(&self) -> Result<Grid2D> {
        let g = &self.grid;
        Grid2D::new(g.nx1, g.nx2, g.dx, (g.origin[0], g.origin[1]))
    }

    pub fn velocity_model(&self) -> Result<ScalarField> {
        let grid = self.grid()?;
        let v = &self.velocity;
        match &v.lens {
            None => build_gradient_model(grid, v.c0, v.gradient),
            Some(l) => build_lens_model(
                grid,
                v.c0,
                v.gradient,
                Lens { center: (l.center[0], l.center[1]), radius: l.radius, delta: l.delta },
            ),
        }
    }

    /// Reflectivity `r`; the velocity perturbation is `c * r`.
    pub fn reflectivity(&self) -> Result<ScalarField> {
        let grid = self.grid()?;
        let c = &self.contrast;
        let mut r = packet_sum(grid, &c.packets, c.min_depth)?;
        for refl in &c.reflectors {
            let s = refl.support();
            if s[2] <= c.min_depth.max(0.0) {
                return Err(RtmError::Precondition(format!(
                    "reflector at {} m reaches above the minimum contrast depth",
                    refl.depth
                )));
            }
            for j in 0..grid.nx2 {
                for i in 0..grid.nx1 {
                    let v = r.at(i, j) + refl.value(grid.x1(i), grid.x2(j));
                    r.set(i, j, v);
                }
            }
        }
        if let Some(f) = &c.file {
            let extra = read_field(self.resolve(f))?;
            grid.ensure_same(extra.grid(), "contrast file")?;
            for (j, i) in (0..grid.nx2).flat_map(|j| (0..grid.nx1).map(move |i| (j, i))) {
                let v = extra.at(i, j);
                if v != 0.0 && grid.x2(j) <= c.min_depth.max(0.0) {
                    return Err(RtmError::Precondition(
                        "contrast file has nonzero values above the minimum depth".into(),
                    ));
                }
                r.set(i, j, r.at(i, j) + v);
            }
        }
        Ok(r)
    }

    pub fn wavelet_delay(&self) -> f64 {
        self.source.delay.unwrap_or(1.5 / self.source.peak_frequency)
    }

    /// Grid row holding the surface x2 = 0.
    pub fn surface_row(&self) -> Result<usize> {
        let g = self.grid()?;
        g.exact_cell(g.origin.0, 0.0)
            .map(|(_, j)| j)
            .ok_or_else(|| RtmError::Config("x2 = 0 is not a grid row".into()))
    }

    pub fn source_cell(&self) -> Result<(usize, usize)> {
        let g = self.grid()?;
        let [x1, x2] = self.source.position;
        g.exact_cell(x1, x2).ok_or_else(|| {
            RtmError::Config(format!("source ({x1}, {x2}) does not sit on a grid node"))
        })
    }

    /// Column indices of the receivers (every surface node inside the acquisition).
    pub fn receiver_columns(&self) -> Result<Vec<usize>> {
        let g = self.grid()?;
        let a = &self.acquisition;
        let cols: Vec<usize> = (0..g.nx1)
            .filter(|&i| {
                let x = g.x1(i);
                x >= a.x1_min - 1e-9 && x <= a.x1_max + 1e-9
            })
            .collect();
        if cols.len() < 2 {
            return Err(RtmError::Config("acquisition holds fewer than two receivers".into()));
        }
        Ok(cols)
    }

    /// Uniform frequency grid over `[f_lo, f_hi]`, end points included.
    pub fn frequencies(&self) -> Vec<f64> {
        let im = &self.imaging;
        let n = im.n_freq;
        (0..n)
            .map(|k| im.f_lo + (im.f_hi - im.f_lo) * k as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn max_velocity(&self) -> Result<f64> {
        Ok(self.velocity_model()?.max())
    }

    pub fn courant(&self) -> Result<f64> {
        Ok(self.max_velocity()? * self.time.dt / self.grid.dx)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(RtmError::Config(m));
        let grid = self.grid()?;
        if !(self.time.dt > 0.0) || self.time.steps < 2 {
            return bad(format!("invalid time stepping dt={} steps={}", self.time.dt, self.time.steps));
        }
        let courant = self.courant()?;
        if courant > 0.5 {
            return bad(format!("Courant number {courant:.4} exceeds 0.5"));
        }
        if self.source.position[1] != 0.0 {
            return bad(format!("source must sit on the surface x2 = 0, got x2 = {}", self.source.position[1]));
        }
        if !(self.source.peak_frequency > 0.0) {
            return bad("peak frequency must be positive".into());
        }
        self.surface_row()?;
        self.source_cell()?;
        let sp = &self.sponge;
        if 2 * sp.width + 3 > grid.nx1.min(grid.nx2) || sp.strength < 0.0 {
            return bad(format!("sponge width {} does not fit the grid", sp.width));
        }
        let a = &self.acquisition;
        if !(a.x1_max > a.x1_min) || !(0.0..=0.5).contains(&a.taper_fraction) {
            return bad("acquisition extent or taper fraction invalid".into());
        }
        self.receiver_columns()?;
        let im = &self.imaging;
        if !(im.f_lo > 0.0 && im.f_hi > im.f_lo) || im.n_freq < 2 {
            return bad(format!("invalid band [{}, {}] x {}", im.f_lo, im.f_hi, im.n_freq));
        }
        // the band sum is a Fourier series in time with period 1 / df
        let df = (im.f_hi - im.f_lo) / (im.n_freq - 1) as f64;
        let record = self.time.steps as f64 * self.time.dt;
        if df * record > 1.0 {
            return bad(format!(
                "frequency spacing {df:.3} Hz aliases a {record:.3} s record; raise n_freq"
            ));
        }
        if im.f_hi >= 0.5 / self.time.dt {
            return bad("f_hi exceeds the temporal Nyquist frequency".into());
        }
        let c_surface = self.velocity.c0;
        if im.f_hi >= c_surface / (2.0 * grid.dx) {
            return bad("f_hi exceeds the spatial Nyquist frequency at the surface".into());
        }
        if !(im.grazing_delta > 0.0 && im.grazing_delta < 1.0) {
            return bad("grazing_delta must lie in (0, 1)".into());
        }
        if !(0.0..=0.5).contains(&im.ramp_fraction) || !(im.epsilon >= 0.0) {
            return bad("ramp_fraction or epsilon invalid".into());
        }
        let z = im.zone;
        if !(z[1] > z[0] && z[3] > z[2]) || !grid.contains(z[0], z[2]) || !grid.contains(z[1], z[3]) {
            return bad(format!("image zone {z:?} is not inside the grid"));
        }
        if !(self.contrast.min_depth > 0.0) {
            return bad("contrast min_depth must be positive".into());
        }
        self.reflectivity_support_check()
    }

    fn reflectivity_support_check(&self) -> Result<()> {
        let grid = self.grid()?;
        for p in &self.contrast.packets {
            p.validate()?;
            let s = p.support();
            if s[2] <= self.contrast.min_depth {
                return Err(RtmError::Config(format!(
                    "packet at {:?} reaches above the minimum depth",
                    p.center
                )));
            }
            if !(grid.contains(s[0], s[2]) && grid.contains(s[1], s[3])) {
                return Err(RtmError::Config(format!("packet at {:?} leaves the grid", p.center)));
            }
        }
        for r in &self.contrast.reflectors {
            if !(r.thickness > 0.0) || r.depth - 3.0 * r.thickness <= self.contrast.min_depth {
                return Err(RtmError::Config(format!("reflector at {} m invalid", r.depth)));
            }
        }
        Ok(())
    }
}
