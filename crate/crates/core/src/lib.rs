//! Reverse-time migration as linearized inverse scattering, in 2D.
//!
//! The crate bundles a (2,4) finite-difference solver, a ray tracer for
//! geometrical-optics source fields, the surface boundary filter, two
//! imaging conditions and a closed-form constant-velocity oracle.

pub mod analytic;
pub mod boundary;
pub mod error;
pub mod experiment;
pub mod fdsolver;
pub mod fft;
pub mod modelkit;
pub mod par;
pub mod raytools;
pub mod report;
pub mod rtm;

pub use error::{Result, RtmError, StageExt};
