use serde::{Deserialize, Serialize};

use super::{Grid2D, ScalarField};
use crate::error::{Result, RtmError};

/// Plane wave under a Gaussian window: a contrast localized both in space and
/// in wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavePacketSpec {
    pub center: [f64; 2],
    pub wavevector: [f64; 2],
    pub widths: [f64; 2],
    pub amplitude: f64,
}

impl WavePacketSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.widths[0] > 0.0 && self.widths[1] > 0.0) {
            return Err(RtmError::Config(format!("packet widths must be positive: {:?}", self.widths)));
        }
        if self.wavevector[0].hypot(self.wavevector[1]) <= 0.0 {
            return Err(RtmError::Config("packet wavevector must be nonzero".into()));
        }
        Ok(())
    }

    /// Box holding three window widths around the center.
    pub fn support(&self) -> [f64; 4] {
        [
            self.center[0] - 3.0 * self.widths[0],
            self.center[0] + 3.0 * self.widths[0],
            self.center[1] - 3.0 * self.widths[1],
            self.center[1] + 3.0 * self.widths[1],
        ]
    }

    #[inline]
    pub fn window(&self, x1: f64, x2: f64) -> f64 {
        let a = (x1 - self.center[0]) / self.widths[0];
        let b = (x2 - self.center[1]) / self.widths[1];
        (-(a * a + b * b)).exp()
    }

    #[inline]
    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        let phase = self.wavevector[0] * (x1 - self.center[0]) + self.wavevector[1] * (x2 - self.center[1]);
        self.amplitude * phase.cos() * self.window(x1, x2)
    }
}

/// Sample a wave packet. The three-width support must sit inside the grid and
/// strictly below `min_depth`.
pub fn wave_packet(grid: Grid2D, spec: &WavePacketSpec, min_depth: f64) -> Result<ScalarField> {
    spec.validate()?;
    let s = spec.support();
    if s[2] <= min_depth.max(0.0) {
        return Err(RtmError::Precondition(format!(
            "packet support reaches depth {:.1} m, above the minimum contrast depth {min_depth} m",
            s[2]
        )));
    }
    if !(grid.contains(s[0], s[2]) && grid.contains(s[1], s[3])) {
        return Err(RtmError::Precondition(format!("packet support {s:?} leaves the grid")));
    }
    Ok(ScalarField::from_fn(grid, |x1, x2| spec.value(x1, x2)))
}

/// Sum of several packets on one grid.
pub fn packet_sum(grid: Grid2D, specs: &[WavePacketSpec], min_depth: f64) -> Result<ScalarField> {
    let mut acc = ScalarField::zeros(grid);
    for spec in specs {
        let p = wave_packet(grid, spec, min_depth)?;
        acc.values_mut().iter_mut().zip(p.values()).for_each(|(a, b)| *a += b);
    }
    Ok(acc)
}
