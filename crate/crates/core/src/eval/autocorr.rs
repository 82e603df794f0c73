use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::image::Image;

/// Circular autocorrelation `gamma(k, l) = sum_{i,j} a(i, j) a(i + k, j + l)`
/// (indices mod the image size), unnormalized, so `gamma(0, 0) = sum a^2`.
///
/// Computed as the inverse FFT of `|FFT(a)|^2` and symmetrized, so
/// `gamma(k, l) == gamma(-k, -l)` holds exactly.
pub fn autocorrelation(a: &Image) -> Image {
    let (w, h) = (a.width(), a.height());
    if a.is_empty() {
        return a.clone();
    }
    let mut planner = FftPlanner::<f64>::new();
    let (row_fwd, col_fwd) = (planner.plan_fft_forward(w), planner.plan_fft_forward(h));
    let (row_inv, col_inv) = (planner.plan_fft_inverse(w), planner.plan_fft_inverse(h));

    let mut buf: Vec<Complex64> = a.data().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft2(&mut buf, w, h, row_fwd.as_ref(), col_fwd.as_ref());
    for z in &mut buf {
        *z = Complex64::new(z.norm_sqr(), 0.0);
    }
    fft2(&mut buf, w, h, row_inv.as_ref(), col_inv.as_ref());
    let n = (w * h) as f64;
    let raw: Vec<f64> = buf.iter().map(|z| z.re / n).collect();
    Image::from_fn(w, h, |k, l| {
        let (nk, nl) = ((h - k) % h, (w - l) % w);
        0.5 * (raw[k * w + l] + raw[nk * w + nl])
    })
}

fn fft2(buf: &mut [Complex64], w: usize, h: usize, rows: &dyn Fft<f64>, cols: &dyn Fft<f64>) {
    rows.process(buf);
    let mut t = transpose(buf, w, h);
    cols.process(&mut t);
    buf.copy_from_slice(&transpose(&t, h, w));
}

/// Row-major `h x w` to row-major `w x h`.
fn transpose(src: &[Complex64], w: usize, h: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); w * h];
    for i in 0..h {
        for j in 0..w {
            out[j * h + i] = src[i * w + j];
        }
    }
    out
}

/// `|| autocorrelation(w) - autocorrelation(w0) ||_2`.
pub fn residue_metric(w: &Image, w0: &Image) -> Result<f64> {
    w.check_same_shape(w0)?;
    Ok(autocorrelation(w).sub(&autocorrelation(w0))?.l2_norm())
}
