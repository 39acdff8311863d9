//! Born data, reverse-time continuation and the imaging conditions.

mod aperture;
mod band;
mod born;
mod imaging;

pub use aperture::{predict_aperture, ApertureMap};
pub use band::ImagingBand;
pub use born::{born_data, fm_params, reverse_continue, source_slices, wavelet_spectrum, Setup};
pub use imaging::{
    gradient, image_excitation, image_ratio, image_xcorr, Condition, ImageResult,
};
