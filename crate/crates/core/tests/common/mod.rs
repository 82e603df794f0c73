//! Independent test-side oracles: dense operator matrices built from the
//! index-by-index definitions, and a dense dual solver for the TV problems.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vardecomp::Image;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(w: usize, h: usize, lo: f64, hi: f64, seed: u64) -> Image {
    let mut r = rng(seed);
    Image::from_fn(w, h, |_, _| r.random_range(lo..hi))
}

pub fn to_vec(img: &Image) -> DVector<f64> {
    DVector::from_column_slice(img.data())
}

pub fn from_vec(v: &DVector<f64>, w: usize, h: usize) -> Image {
    Image::new(w, h, v.as_slice().to_vec()).unwrap()
}

/// Gradient as a `2n x n` matrix; rows `0..n` hold component 1, rows
/// `n..2n` component 2. Pixel `(i, j)` has index `i * w + j`.
pub fn dense_grad(w: usize, h: usize) -> DMatrix<f64> {
    let n = w * h;
    let mut d = DMatrix::zeros(2 * n, n);
    for i in 0..h {
        for j in 0..w {
            let k = i * w + j;
            if i < h - 1 {
                d[(k, k + w)] = 1.0;
                d[(k, k)] = -1.0;
            }
            if j < w - 1 {
                d[(n + k, k + 1)] = 1.0;
                d[(n + k, k)] = -1.0;
            }
        }
    }
    d
}

/// `-Laplacian = D^T D`.
pub fn dense_neg_laplacian(w: usize, h: usize) -> DMatrix<f64> {
    let d = dense_grad(w, h);
    d.transpose() * d
}

pub fn tv_of(d: &DMatrix<f64>, u: &DVector<f64>) -> f64 {
    let n = u.len();
    let g = d * u;
    (0..n).map(|k| g[k].hypot(g[n + k])).sum()
}

/// `J(u) + (2 lambda)^{-1} (f-u)^T K (f-u)`.
pub fn primal_energy(
    d: &DMatrix<f64>,
    k: &DMatrix<f64>,
    f: &DVector<f64>,
    u: &DVector<f64>,
    lambda: f64,
) -> f64 {
    let r = f - u;
    tv_of(d, u) + (r.transpose() * k * &r)[(0, 0)] / (2.0 * lambda)
}

/// Solves `min_u J(u) + (2 lambda)^{-1} ||f - u||_K^2` through its dual
/// `min_{|p_i| <= 1} (lambda/2) p^T D Kinv D^T p - f^T D^T p` with
/// accelerated projected gradient. Returns `u = f - lambda Kinv D^T p`.
pub fn dual_tv_solve(
    f: &DVector<f64>,
    lambda: f64,
    k_inv: &DMatrix<f64>,
    w: usize,
    h: usize,
    iters: usize,
) -> DVector<f64> {
    let n = w * h;
    let d = dense_grad(w, h);
    let q = &d * k_inv * d.transpose() * lambda;
    let lin = &d * f;
    let lip = q.symmetric_eigenvalues().max().max(1e-12);
    let step = 1.0 / lip;
    let mut p = DVector::zeros(2 * n);
    let mut y = p.clone();
    let mut t = 1.0f64;
    for _ in 0..iters {
        let grad = &q * &y - &lin;
        let mut next = &y - grad * step;
        for kk in 0..n {
            let norm = next[kk].hypot(next[n + kk]);
            if norm > 1.0 {
                next[kk] /= norm;
                next[n + kk] /= norm;
            }
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        y = &next + (&next - &p) * ((t - 1.0) / t_next);
        p = next;
        t = t_next;
    }
    f - k_inv * d.transpose() * p * lambda
}

pub fn rms(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    ((a - b).norm_squared() / a.len() as f64).sqrt()
}

/// Moore-Penrose inverse of a symmetric PSD matrix.
pub fn pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().pseudo_inverse(1e-10).unwrap()
}
