//! Grids, fields, velocity models, contrasts and experiment configuration.

pub mod config;
mod field;
mod grid;
pub mod io;
pub mod packet;
pub mod taper;
pub mod velocity;

pub use config::ExperimentConfig;
pub use field::ScalarField;
pub use grid::Grid2D;
pub use packet::{wave_packet, WavePacketSpec};
pub use velocity::{build_gradient_model, build_lens_model, Lens};
