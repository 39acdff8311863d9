use crate::error::{Result, RtmError};
use crate::modelkit::taper::band_weight;
use crate::modelkit::ExperimentConfig;

/// Frequency weights `Omega(f)` on a uniform grid: zero at and beyond the
/// band edges, cosine ramps, one on the plateau.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagingBand {
    pub freqs: Vec<f64>,
    pub weights: Vec<f64>,
    /// Grid spacing in Hz, the quadrature weight of each sample.
    pub df: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl ImagingBand {
    pub fn new(freqs: &[f64], f_lo: f64, f_hi: f64, ramp_fraction: f64) -> Result<Self> {
        if freqs.len() < 2 || !(f_hi > f_lo) {
            return Err(RtmError::Config("imaging band is empty".into()));
        }
        let df = freqs[1] - freqs[0];
        if freqs.windows(2).any(|w| ((w[1] - w[0]) - df).abs() > 1e-9 * df.abs().max(1.0)) || !(df > 0.0) {
            return Err(RtmError::Config("imaging frequencies must be uniformly spaced".into()));
        }
        let weights: Vec<f64> = freqs.iter().map(|&f| band_weight(f, f_lo, f_hi, ramp_fraction)).collect();
        if weights.iter().all(|&w| w == 0.0) {
            return Err(RtmError::Config("imaging band has no nonzero weight".into()));
        }
        Ok(Self { freqs: freqs.to_vec(), weights, df, f_lo, f_hi })
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let im = &cfg.imaging;
        Self::new(&cfg.frequencies(), im.f_lo, im.f_hi, im.ramp_fraction)
    }

    /// Same frequency grid with the support shrunk to `[lo, hi]`.
    pub fn restricted(&self, lo: f64, hi: f64, ramp_fraction: f64) -> Result<Self> {
        Self::new(&self.freqs, lo.max(self.f_lo), hi.min(self.f_hi), ramp_fraction)
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub(crate) fn check_matches(&self, freqs: &[f64]) -> Result<()> {
        if freqs.len() != self.freqs.len()
            || freqs.iter().zip(&self.freqs).any(|(a, b)| (a - b).abs() > 1e-9 * b.abs().max(1.0))
        {
            return Err(RtmError::GridMismatch("slices and band use different frequencies".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_vanish_at_edges_and_reach_one() {
        let f: Vec<f64> = (0..41).map(|k| 5.0 + 0.5 * k as f64).collect();
        let b = ImagingBand::new(&f, 5.0, 25.0, 0.25).unwrap();
        assert_eq!(b.weights[0], 0.0);
        assert_eq!(b.weights[40], 0.0);
        assert_eq!(b.weights[20], 1.0);
        assert!(b.weights.iter().all(|&w| (0.0..=1.0).contains(&w)));
        assert_eq!(b.df, 0.5);
        let r = b.restricted(10.0, 20.0, 0.25).unwrap();
        assert!(r.weights.iter().zip(&f).all(|(&w, &x)| (x > 10.0 && x < 20.0) || w == 0.0));
    }

    #[test]
    fn rejects_nonuniform_grid() {
        assert!(ImagingBand::new(&[1.0, 2.0, 4.0], 1.0, 4.0, 0.2).is_err());
        assert!(ImagingBand::new(&[1.0, 2.0], 1.0, 1.0, 0.2).is_err());
    }
}
