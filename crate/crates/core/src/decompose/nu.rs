use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::{reflect_signed, Image};

/// Lower clamp of the normalized local variance; `nu1` lies in
/// `[NU_MIN, 1 - NU_MIN]`.
pub const NU_MIN: f64 = 0.01;

/// Texture/noise weighting: `nu1` is large where the texture part has high
/// local variance, `nu2 = 1 - nu1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuPartition {
    #[serde(skip)]
    pub nu1: Image,
    #[serde(skip)]
    pub nu2: Image,
    pub window: usize,
    pub kappa: f64,
}

/// Local variance of `v` over an `window x window` neighborhood with mirror
/// boundary, affinely mapped onto `[NU_MIN, 1 - NU_MIN]`. A variance map with
/// no spread gives `nu1 = 0.5` everywhere.
pub fn compute_nu(v: &Image, window: usize, kappa: f64) -> Result<NuPartition> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::invalid("window", format!("must be odd and >= 3, got {window}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::invalid("kappa", format!("must be > 0, got {kappa}")));
    }
    let var = local_variance(v, window);
    let (lo, hi) = var.min_max();
    let spread = hi - lo;
    let nu1 = if spread > 0.0 && spread.is_finite() {
        var.map(|x| NU_MIN + (1.0 - 2.0 * NU_MIN) * (x - lo) / spread)
    } else {
        Image::filled(v.width(), v.height(), 0.5)
    };
    let nu2 = nu1.map(|x| 1.0 - x);
    Ok(NuPartition {
        nu1,
        nu2,
        window,
        kappa,
    })
}

fn local_variance(v: &Image, window: usize) -> Image {
    let (w, h) = (v.width(), v.height());
    let r = (window / 2) as isize;
    let n = (window * window) as f64;
    Image::from_fn(w, h, |i, j| {
        let (mut s, mut s2) = (0.0, 0.0);
        for di in -r..=r {
            let ii = reflect_signed(i as isize + di, h);
            for dj in -r..=r {
                let x = v.get(ii, reflect_signed(j as isize + dj, w));
                s += x;
                s2 += x * x;
            }
        }
        let m = s / n;
        (s2 / n - m * m).max(0.0)
    })
}
