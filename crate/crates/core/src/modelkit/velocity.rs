use super::{Grid2D, ScalarField};
use crate::error::{Result, RtmError};

/// Gaussian low- or high-velocity anomaly added on top of a gradient model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lens {
    pub center: (f64, f64),
    pub radius: f64,
    pub delta: f64,
}

impl Lens {
    #[inline]
    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        let d2 = (x1 - self.center.0).powi(2) + (x2 - self.center.1).powi(2);
        self.delta * (-d2 / (self.radius * self.radius)).exp()
    }
}

/// `c(x) = c0 + g * x2`.
pub fn build_gradient_model(grid: Grid2D, c0: f64, g: f64) -> Result<ScalarField> {
    build_lens_model_opt(grid, c0, g, None)
}

/// Gradient model plus a Gaussian lens `delta * exp(-|x - center|^2 / radius^2)`.
pub fn build_lens_model(grid: Grid2D, c0: f64, g: f64, lens: Lens) -> Result<ScalarField> {
    if !(lens.radius > 0.0) {
        return Err(RtmError::Config(format!("lens radius must be positive, got {}", lens.radius)));
    }
    build_lens_model_opt(grid, c0, g, Some(lens))
}

fn build_lens_model_opt(grid: Grid2D, c0: f64, g: f64, lens: Option<Lens>) -> Result<ScalarField> {
    if !(c0 > 0.0 && c0.is_finite() && g.is_finite()) {
        return Err(RtmError::Config(format!("invalid gradient model c0={c0}, g={g}")));
    }
    let field = ScalarField::from_fn(grid, |x1, x2| {
        c0 + g * x2 + lens.map_or(0.0, |l| l.value(x1, x2))
    });
    let cmin = field.min();
    if !(cmin > 0.0) || !field.values().iter().all(|v| v.is_finite()) {
        let (i, j) = field.argmin();
        return Err(RtmError::Config(format!(
            "velocity model is not strictly positive: c = {cmin} m/s at ({}, {})",
            grid.x1(i),
            grid.x2(j)
        )));
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2D {
        Grid2D::new(201, 201, 10.0, (0.0, 0.0)).unwrap()
    }

    #[test]
    fn gradient_values() {
        let c = build_gradient_model(grid(), 2000.0, 1.0).unwrap();
        assert_eq!(c.at(0, 0), 2000.0);
        assert_eq!(c.at(57, 200), 4000.0);
        let flat = build_gradient_model(grid(), 2000.0, 0.0).unwrap();
        assert!(flat.values().iter().all(|&v| v == 2000.0));
    }

    #[test]
    fn nonpositive_velocity_rejected() {
        let g = Grid2D::new(10, 10, 10.0, (0.0, -100.0)).unwrap();
        assert!(build_gradient_model(g, 50.0, 1.0).is_err());
        let lens = Lens { center: (50.0, 0.0), radius: 20.0, delta: -2500.0 };
        assert!(build_lens_model(grid(), 2000.0, 0.0, lens).is_err());
    }

    #[test]
    fn lens_center_and_far_field() {
        let lens = Lens { center: (800.0, 1200.0), radius: 150.0, delta: -300.0 };
        let c = build_lens_model(grid(), 2000.0, 1.0, lens).unwrap();
        assert!((c.at(80, 120) - (2000.0 + 1200.0 - 300.0)).abs() < 1e-9);
        // five radii away the Gaussian is below e^-25
        let far = c.at(80, 45);
        let base = 2000.0 + 450.0;
        assert!(((far - base) / base).abs() < 1e-9);
    }

    #[test]
    fn lens_minimum_at_center() {
        let lens = Lens { center: (800.0, 1200.0), radius: 200.0, delta: -300.0 };
        let c = build_lens_model(grid(), 2000.0, 0.0, lens).unwrap();
        let (i, j) = c.argmin();
        assert!((c.grid().x1(i) - 800.0).abs() <= 10.0);
        assert!((c.grid().x2(j) - 1200.0).abs() <= 10.0);
    }
}
