//! Image-processing primitives: smoothing, histogram hyperbolization,
//! Otsu thresholding, rectangular morphology and connected components.
//!
//! Everything here is a pure function of its inputs.

mod components;
mod filter;
mod histogram;
mod image;
pub mod io;
mod morphology;
mod threshold;

pub use components::{
    area_filter, clear_border, connected_components, fill_holes, keep_largest, label_components,
    ComponentStats, Connectivity, Labels,
};
pub use filter::{gaussian_kernel, gaussian_smooth, masked_gaussian_smooth};
pub use histogram::{
    cdf_of, histogram, histogram_cdf, hyperbolic_response, hyperbolize, Histogram,
    HyperbolizationParams,
};
pub use image::{intensity_bin, BinaryMask, GrayImage, BINS};
pub use morphology::{
    close, dilate, erode, gray_dilate, gray_erode, gray_open, open, top_hat, StructuringElement,
};
pub use threshold::{
    intensity_band_filter, intensity_band_filter_in, otsu_from_histogram, otsu_threshold,
    otsu_threshold_in, OtsuResult,
};
