//! `rtm-scatter`: runs the modeling and imaging chain of an experiment
//! config and writes fields, gathers, previews, metrics and a manifest.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rtm_core::analytic::{halfspace_oracle, planewave_reconstruct, support_box, PlaneWaveField, SpectralField};
use rtm_core::error::{Result, RtmError, StageExt};
use rtm_core::experiment::{self, RunOptions};
use rtm_core::fdsolver::{FreqSlices, SurfaceGather};
use rtm_core::modelkit::config::Axis;
use rtm_core::modelkit::io::read_field;
use rtm_core::modelkit::{ExperimentConfig, Grid2D, ScalarField};
use rtm_core::raytools::Bicubic;
use rtm_core::report::{compare_traces, correlation};
use rtm_core::rtm::{image_excitation, image_ratio, image_xcorr, predict_aperture, ImagingBand, Setup};

use output::Outputs;

#[derive(Parser)]
#[command(name = "rtm-scatter", version, about = "Reverse-time-migration inverse scattering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config (TOML).
    config: PathBuf,
    /// Output directory; defaults to the config's `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fraction of the aperture tapered at each end.
    #[arg(long)]
    taper: Option<f64>,
    /// Width of the grazing-ray rolloff.
    #[arg(long)]
    grazing_delta: Option<f64>,
    /// Mute the direct arrival before back-propagation.
    #[arg(long, value_enum)]
    mute: Option<Switch>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConditionArg {
    Ratio,
    Excitation,
    XcorrBaseline,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    X1,
    X2,
}

#[derive(Subcommand)]
enum Command {
    /// Forward modeling, filtering, migration, imaging and scoring.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Form the excitation image even where the source field multipaths.
        #[arg(long)]
        force: bool,
    },
    /// Background and scattered surface gathers plus source slices.
    Forward {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Reverse continuation of the scattered gather.
    Migrate {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Scattered gather; defaults to `scattered.gather` in the output directory.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// One imaging condition from stored source and receiver slices.
    Image {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum, default_value = "ratio")]
        condition: ConditionArg,
        #[arg(long)]
        force: bool,
    },
    /// Predicted recoverable dips and source multipathing over the image zone.
    Aperture {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Cell stride of the map.
        #[arg(long, default_value_t = 5)]
        stride: usize,
        #[arg(long, default_value_t = 61)]
        dips: usize,
    },
    /// Constant-velocity plane-wave scattering and its exact inversion for
    /// the config's contrast, at the surface velocity.
    Oracle {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Compare a true field and an image along one grid line.
    Compare {
        truth: PathBuf,
        image: PathBuf,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long)]
        coord: f64,
        /// Profile window along the line, meters.
        #[arg(long, num_args = 2)]
        window: Option<Vec<f64>>,
    },
}

impl ConfigArgs {
    fn load(&self) -> Result<(ExperimentConfig, PathBuf)> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(t) = self.taper {
            cfg.acquisition.taper_fraction = t;
        }
        if let Some(d) = self.grazing_delta {
            cfg.imaging.grazing_delta = d;
        }
        if let Some(m) = self.mute {
            cfg.imaging.mute = matches!(m, Switch::On);
        }
        cfg.validate()?;
        let out = self.out.clone().unwrap_or_else(|| cfg.output_dir());
        Ok((cfg, out))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { cfg, force } => run(&cfg, force),
        Command::Forward { cfg } => forward(&cfg),
        Command::Migrate { cfg, data } => migrate(&cfg, data),
        Command::Image { cfg, condition, force } => image(&cfg, condition, force),
        Command::Aperture { cfg, stride, dips } => aperture(&cfg, stride, dips),
        Command::Oracle { cfg } => oracle(&cfg),
        Command::Compare { truth, image, axis, coord, window } => compare(&truth, &image, axis, coord, window),
    }
}

fn print_metrics(lines: &[(String, String)]) {
    for (k, v) in lines {
        println!("{k}={v}");
    }
}

fn done(out: Outputs, manifest: &str) -> Result<()> {
    let path = out.finish(manifest)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(args: &ConfigArgs, force: bool) -> Result<()> {
    let (cfg, dir) = args.load()?;
    let r = experiment::run(&cfg, &RunOptions { force, ..RunOptions::default() })?;
    let mut out = Outputs::create(&dir)?;
    out.field("velocity", &r.c_window)?;
    out.field("reflectivity", &r.truth)?;
    out.gather("background", &r.background)?;
    out.gather("scattered", &r.scattered)?;
    out.field("image_ratio", &r.ratio.image)?;
    out.field("image_xcorr", &r.xcorr.image)?;
    if let Some(e) = &r.excitation {
        out.field("image_excitation", &e.image)?;
    }
    if let Some(a) = &r.aperture {
        out.field("aperture_coverage", &a.coverage)?;
        out.field("aperture_multipath", &mask_field(a.grid, &a.multipath))?;
    }
    let metrics = r.metrics(&cfg)?;
    out.metrics("metrics.txt", &metrics)?;
    print_metrics(&metrics);
    done(out, "manifest.txt")
}

fn forward(args: &ConfigArgs) -> Result<()> {
    let (cfg, dir) = args.load()?;
    let setup = Setup::from_config(&cfg).stage("setup")?;
    let bg = setup.background_run(true).stage("forward")?;
    let background = bg.gather.expect("receivers requested");
    let scattered = setup.scattered(&background).stage("forward")?;
    let mut out = Outputs::create(&dir)?;
    out.gather("background", &background)?;
    out.gather("scattered", &scattered)?;
    out.slices("source", &bg.slices.expect("slices requested"))?;
    let metrics = vec![("scattered_energy".to_string(), format!("{:.6e}", scattered.energy()))];
    out.metrics("forward.metrics.txt", &metrics)?;
    print_metrics(&metrics);
    done(out, "forward.manifest.txt")
}

fn migrate(args: &ConfigArgs, data: Option<PathBuf>) -> Result<()> {
    let (cfg, dir) = args.load()?;
    let setup = Setup::from_config(&cfg).stage("setup")?;
    let d = SurfaceGather::read(data.unwrap_or_else(|| dir.join("scattered.gather")))?;
    let ur = setup.reverse_continue(&d).stage("migrate")?;
    let mut out = Outputs::create(&dir)?;
    out.slices("receiver", &ur)?;
    done(out, "migrate.manifest.txt")
}

fn image(args: &ConfigArgs, condition: ConditionArg, force: bool) -> Result<()> {
    let (cfg, dir) = args.load()?;
    let setup = Setup::from_config(&cfg).stage("setup")?;
    let band = ImagingBand::from_config(&cfg).stage("setup")?;
    // the source rays decide up front whether the excitation image is allowed
    let go = match condition {
        ConditionArg::Excitation => {
            let go = experiment::source_go(&cfg, &setup.c).stage("rays")?;
            if let Err(e) = go.check_sme(cfg.imaging.zone, cfg.imaging.sme_limit) {
                if !force {
                    return Err(e).stage("image");
                }
                eprintln!("warning: {e}; imaging anyway");
            }
            Some(go)
        }
        _ => None,
    };
    let g = FreqSlices::read(dir.join("source.slices"))?;
    let ur = FreqSlices::read(dir.join("receiver.slices"))?;
    let (i0, j0, w) = (setup.slices.i0, setup.slices.j0, setup.slices.window);
    let c = setup.c.extract(i0, j0, w)?;
    let result = match (condition, &go) {
        (ConditionArg::Excitation, Some(go)) => image_excitation(&ur, go, &c, &band, &setup.wavelet_spectrum()),
        (ConditionArg::XcorrBaseline, _) => image_xcorr(&g, &ur, &band),
        _ => image_ratio(&g, &ur, &c, &band, cfg.imaging.epsilon),
    }
    .stage("image")?;
    let mut out = Outputs::create(&dir)?;
    let name = result.condition.name().replace('-', "_");
    out.field(&format!("image_{name}"), &result.image)?;
    done(out, &format!("image_{name}.manifest.txt"))
}

fn mask_field(grid: Grid2D, mask: &[bool]) -> ScalarField {
    ScalarField::new(grid, mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()).expect("mask sized to grid")
}

fn aperture(args: &ConfigArgs, stride: usize, dips: usize) -> Result<()> {
    let (cfg, dir) = args.load()?;
    if stride == 0 || dips < 2 {
        return Err(RtmError::Config("stride must be positive and dips at least 2".into()));
    }
    let c = cfg.velocity_model()?;
    let go = experiment::source_go(&cfg, &c).stage("rays")?;
    let z = cfg.imaging.zone;
    let (_, _, w) = c.grid().window_for_box(z, 0)?;
    let coarse = Grid2D::new((w.nx1 - 1) / stride + 1, (w.nx2 - 1) / stride + 1, w.dx * stride as f64, w.origin)?;
    let map = predict_aperture(
        coarse,
        &go,
        &Bicubic::new(c),
        &experiment::acquisition(&cfg),
        experiment::record_length(&cfg),
        dips,
    );
    let mut out = Outputs::create(&dir)?;
    out.field("aperture_coverage", &map.coverage)?;
    out.field("aperture_multipath", &mask_field(coarse, &map.multipath))?;
    let mut metrics = vec![
        ("multipath_fraction".to_string(), format!("{:.6}", go.multipath_fraction(z))),
        ("caustic_cells".to_string(), go.caustic_cells().to_string()),
        ("mean_coverage".to_string(), format!("{:.6}", map.coverage.values().iter().sum::<f64>() / coarse.len() as f64)),
    ];
    for (k, a) in cfg.evaluation.artifact_zones.iter().enumerate() {
        let center = (0.5 * (a[0] + a[1]), 0.5 * (a[2] + a[3]));
        let radius = 0.5 * (a[1] - a[0]).hypot(a[3] - a[2]);
        metrics.push((format!("artifact_zone{k}.multipath_flagged"), map.multipath_near(center, radius).to_string()));
    }
    out.metrics("aperture.metrics.txt", &metrics)?;
    print_metrics(&metrics);
    done(out, "aperture.manifest.txt")
}

fn oracle(args: &ConfigArgs) -> Result<()> {
    let (cfg, dir) = args.load()?;
    let r = cfg.reflectivity()?;
    let c = cfg.velocity.c0;
    let Some(b) = support_box(&r) else {
        return Err(RtmError::Precondition("the config has no contrast".into()));
    };
    // observe once the front has cleared the deepest contrast by a tenth
    let t = 1.1 * b[3] / c;
    let u = PlaneWaveField::new(&SpectralField::of_real(&r), c, 1.0)?;
    let snapshot = rtm_core::analytic::planewave_field(&r, c, 1.0, t)?;
    let img = planewave_reconstruct(&u, 1.0);
    let truth = halfspace_oracle(&r);
    let num: f64 = img.values().iter().zip(truth.values()).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = truth.values().iter().map(|b| b * b).sum();
    let mut out = Outputs::create(&dir)?;
    out.field("oracle_field", &snapshot)?;
    out.field("oracle_image", &img)?;
    out.field("oracle_halfspace", &truth)?;
    let metrics = vec![
        ("oracle.velocity".to_string(), format!("{c:.3}")),
        ("oracle.time".to_string(), format!("{t:.6}")),
        ("oracle.rel_l2".to_string(), format!("{:.6e}", (num / den).sqrt())),
        ("oracle.correlation".to_string(), format!("{:.6}", correlation(truth.values(), img.values()))),
    ];
    out.metrics("oracle.metrics.txt", &metrics)?;
    print_metrics(&metrics);
    done(out, "oracle.manifest.txt")
}

fn compare(truth: &Path, image: &Path, axis: AxisArg, coord: f64, window: Option<Vec<f64>>) -> Result<()> {
    let (t, i) = (read_field(truth)?, read_field(image)?);
    let axis = match axis {
        AxisArg::X1 => Axis::X1,
        AxisArg::X2 => Axis::X2,
    };
    let tc = compare_traces(&t, &i, axis, coord, window.map(|w| [w[0], w[1]]))?;
    println!("samples={}", tc.positions.len());
    println!("amplitude_ratio={:.6}", tc.amplitude_ratio);
    println!("correlation={:.6}", tc.correlation);
    Ok(())
}
