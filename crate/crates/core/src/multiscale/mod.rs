//! Wavelet transform, Laplacian pyramid, directional filter bank,
//! contourlets, soft thresholding and Besov-type norms.
//!
//! All transforms use periodic extension on sides padded (symmetrically,
//! right and bottom) to the multiple their depth requires; inverses crop
//! back to the original size.

mod contourlet;
mod dfb;
mod dump;
mod dwt;
mod filters;
mod lp;
mod norms;
mod shrink;

pub use contourlet::{
    contourlet_forward, contourlet_inverse, cst, ContourletCoeffs, ContourletPlan, DEFAULT_DIRS,
};
pub use dfb::{dfb_decompose, dfb_reconstruct, DfbPlan, DirectionalBands, MAX_DEPTH};
pub use dump::{dump_contourlet, dump_wavelet};
pub use dwt::{dwt2_forward, dwt2_inverse, DetailBands, WaveletPyramid};
pub use filters::{FanFilter, FilterSpec, PyramidFilter, WaveletFamily, WaveletFilters};
pub use lp::{lp_decompose, lp_reconstruct, LaplacianPyramid};
pub use norms::{besov_norm, besov_norm_of, contourlet_norm, contourlet_norm_of, BesovIndex};
pub use shrink::{project_e, soft_shrink, wst};

/// Default number of wavelet levels for the shrinkage-based models.
pub const DEFAULT_WAVELET_LEVELS: usize = 3;
