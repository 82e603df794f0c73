use crate::error::{Error, Result};
use crate::image::Image;

use super::dwt::{dwt2_forward, dwt2_inverse};
use super::filters::FilterSpec;

/// `sign(c) * max(|c| - t, 0)`, the minimizer of `|c - d|^2 + 2t|d|`.
#[inline]
pub fn soft_shrink(c: f64, t: f64) -> f64 {
    let m = c.abs() - t;
    if m > 0.0 {
        m.copysign(c)
    } else {
        0.0
    }
}

pub(crate) fn check_threshold(name: &'static str, t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be >= 0, got {t}")))
    }
}

/// Wavelet soft thresholding: shrink every detail coefficient by
/// `threshold`, keep the approximation band, transform back.
///
/// A zero threshold returns `f` unchanged without a transform round trip.
pub fn wst(f: &Image, threshold: f64, levels: usize, spec: &FilterSpec) -> Result<Image> {
    check_threshold("threshold", threshold)?;
    if threshold == 0.0 {
        return Ok(f.clone());
    }
    let pyr = dwt2_forward(f, levels, spec)?;
    let shrunk = pyr.map_details(|c| soft_shrink(c, threshold));
    dwt2_inverse(&shrunk, spec)?.ensure_finite("wavelet shrinkage")
}

/// Projection onto the ball `E_mu`, `f - wst(f, 2 mu)`.
pub fn project_e(f: &Image, mu: f64, levels: usize, spec: &FilterSpec) -> Result<Image> {
    check_threshold("mu", mu)?;
    f.sub(&wst(f, 2.0 * mu, levels, spec)?)
}
