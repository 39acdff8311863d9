//! Finite-difference time-domain modeling of the 2D acoustic wave equation.

pub mod gather;
pub mod propagator;
pub mod simulate;
pub mod slices;
pub mod source;
pub mod wavelet;

pub use gather::{ReceiverGather, SurfaceGather};
pub use propagator::{has_nonfinite, step, Forcing, Propagator, Sponge, WavefieldState};
pub use simulate::{simulate, simulate_reverse, Receivers, Recorder, Recording, SimOutput, SimParams, SliceRequest};
pub use slices::FreqSlices;
pub use source::SourceTerm;
pub use wavelet::{ricker, ricker_series};
