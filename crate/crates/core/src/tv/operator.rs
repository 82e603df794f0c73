use crate::error::{Error, Result};
use crate::image::Image;

use super::ops::{div_into, grad_into};

/// Symmetric positive semi-definite operator used as `K^{-1}` in the
/// generalized projector.
pub trait LinearOperator: Send + Sync {
    fn name(&self) -> &'static str;

    fn apply(&self, x: &Image) -> Image;

    /// Upper estimate of the operator norm on `width x height` images.
    fn norm_estimate(&self, width: usize, height: usize) -> f64 {
        power_iteration(self, width, height, 100)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl LinearOperator for Identity {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn apply(&self, x: &Image) -> Image {
        x.clone()
    }

    fn norm_estimate(&self, _: usize, _: usize) -> f64 {
        1.0
    }
}

/// `-Laplacian` with the Neumann boundary implied by `grad`/`div`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NegLaplacian;

impl LinearOperator for NegLaplacian {
    fn name(&self) -> &'static str {
        "neg-laplacian"
    }

    fn apply(&self, x: &Image) -> Image {
        let (w, h) = (x.width(), x.height());
        let mut g1 = vec![0.0; w * h];
        let mut g2 = vec![0.0; w * h];
        let mut out = vec![0.0; w * h];
        grad_into(x.data(), w, h, &mut g1, &mut g2);
        div_into(&g1, &g2, w, h, &mut out);
        for v in &mut out {
            *v = -*v;
        }
        Image::new(w, h, out).unwrap()
    }

    /// Gershgorin bound: diagonal at most 4, off-diagonal row sum at most 4.
    fn norm_estimate(&self, _: usize, _: usize) -> f64 {
        8.0
    }
}

/// Largest eigenvalue of a symmetric PSD operator by power iteration,
/// inflated by 1% because the iteration approaches it from below.
pub fn power_iteration<O: LinearOperator + ?Sized>(
    op: &O,
    width: usize,
    height: usize,
    iters: usize,
) -> f64 {
    // checkerboard start has a component along the top eigenvector of
    // difference operators; the ramp term breaks symmetry otherwise
    let mut x = Image::from_fn(width, height, |i, j| {
        let s = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        s + 1e-3 * (i * width + j) as f64 / (width * height) as f64
    });
    let mut est = 0.0;
    for _ in 0..iters {
        let n = x.l2_norm();
        if n == 0.0 {
            return 0.0;
        }
        x = x.scale(1.0 / n);
        let y = op.apply(&x);
        est = x.dot(&y).unwrap();
        x = y;
    }
    est * 1.01
}

/// Solves `-Laplacian x = b` for zero-mean `b` by conjugate gradients and
/// returns the zero-mean solution.
pub fn solve_neg_laplacian(b: &Image, tol: f64, max_iter: usize) -> Result<Image> {
    let mean = b.mean();
    let scale = b.max_abs().max(1.0);
    if mean.abs() > 1e-9 * scale {
        return Err(Error::invalid(
            "b",
            format!("right-hand side must have zero mean, got {mean:e}"),
        ));
    }
    let op = NegLaplacian;
    let b = b.map(|v| v - mean);
    let bn = b.l2_norm();
    if bn == 0.0 {
        return Ok(Image::zeros(b.width(), b.height()));
    }
    let mut x = Image::zeros(b.width(), b.height());
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r).unwrap();
    for _ in 0..max_iter {
        if rr.sqrt() <= tol * bn {
            break;
        }
        let ap = op.apply(&p);
        let alpha = rr / p.dot(&ap).unwrap();
        x = x.zip_map(&p, |a, b| a + alpha * b).unwrap();
        r = r.zip_map(&ap, |a, b| a - alpha * b).unwrap();
        let rr_new = r.dot(&r).unwrap();
        p = r.zip_map(&p, |a, b| a + (rr_new / rr) * b).unwrap();
        rr = rr_new;
    }
    if rr.sqrt() > tol * bn * 10.0 {
        return Err(Error::invalid("max_iter", "conjugate gradients did not converge"));
    }
    let m = x.mean();
    Ok(x.map(|v| v - m))
}

/// `||v||^2` in the discrete `H^{-1}` norm, `<v, (-Laplacian)^+ v>`, for
/// zero-mean `v`.
pub fn h_minus1_norm_sq(v: &Image) -> Result<f64> {
    let x = solve_neg_laplacian(v, 1e-8, 20 * v.len().max(100))?;
    v.dot(&x)
}
