//! Structures / textures / noise image decomposition.
//!
//! The crate splits an image `f` into a piecewise-smooth part `u`, an
//! oscillating texture part `v` and, for the three-part models, a noise part
//! `w`. Building blocks:
//!
//! - [`tv`]: discrete gradient/divergence, total variation and the dual
//!   projectors onto `G`-balls;
//! - [`multiscale`]: wavelet, Laplacian pyramid, directional filter bank and
//!   contourlet transforms with soft thresholding and Besov-type norms;
//! - [`decompose`]: the decomposition models, behind a name-keyed registry;
//! - [`eval`]: synthetic phantoms and the error / autocorrelation metrics.

pub mod decompose;
pub mod error;
pub mod eval;
pub mod image;
pub mod multiscale;
pub mod tv;

pub use error::{Error, Result};
pub use image::{Image, NoiseSpec};
