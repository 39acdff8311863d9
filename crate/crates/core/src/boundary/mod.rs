//! Acquisition-surface processing: direct-wave removal and the boundary
//! operator that turns recorded traces into a back-propagation source.

mod fm;

pub use fm::{apply_fm, fm_filter_spectrum, fm_symbol, mute_direct, remove_direct, FmParams, MuteSpec};
