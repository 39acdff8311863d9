//! Ray tracing, geometrical-optics source fields, Snell covariables and the
//! recoverable-aperture predictor.

pub mod covariables;
pub mod gofields;
pub mod interp;
pub mod mask;
pub mod ray;

pub use covariables::{snell_jacobian, xi_from_zeta, zeta_from_xi};
pub use gofields::{go_fields, FanSpec, GoFields};
pub use interp::Bicubic;
pub use mask::{resolution_mask, resolution_symbol, Acquisition};
pub use ray::{trace_ray, trace_ray_with, Exit, RayPath, RaySample};
