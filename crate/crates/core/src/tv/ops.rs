use crate::error::Result;
use crate::image::Image;

/// Pair of image-shaped fields `p = (p1, p2)`.
///
/// `p1` is the component along rows (index `i`), `p2` the component along
/// columns (index `j`).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub p1: Image,
    pub p2: Image,
}

impl VectorField {
    pub fn new(p1: Image, p2: Image) -> Result<Self> {
        p1.check_same_shape(&p2)?;
        Ok(Self { p1, p2 })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            p1: Image::zeros(width, height),
            p2: Image::zeros(width, height),
        }
    }

    pub fn width(&self) -> usize {
        self.p1.width()
    }

    pub fn height(&self) -> usize {
        self.p1.height()
    }

    /// Largest pointwise Euclidean norm `sqrt(p1^2 + p2^2)`.
    pub fn max_norm(&self) -> f64 {
        self.p1
            .data()
            .iter()
            .zip(self.p2.data())
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// `<p, q>` summed over pixels and both components.
    pub fn dot(&self, other: &VectorField) -> Result<f64> {
        Ok(self.p1.dot(&other.p1)? + self.p2.dot(&other.p2)?)
    }
}

/// Forward-difference gradient. Component 1 is zero on the last row,
/// component 2 is zero on the last column.
pub fn grad(u: &Image) -> VectorField {
    let (w, h) = (u.width(), u.height());
    let mut g1 = vec![0.0; w * h];
    let mut g2 = vec![0.0; w * h];
    grad_into(u.data(), w, h, &mut g1, &mut g2);
    VectorField {
        p1: Image::new(w, h, g1).unwrap(),
        p2: Image::new(w, h, g2).unwrap(),
    }
}

pub(crate) fn grad_into(u: &[f64], w: usize, h: usize, g1: &mut [f64], g2: &mut [f64]) {
    for i in 0..h {
        let row = &u[i * w..(i + 1) * w];
        let o = i * w;
        if i + 1 < h {
            let next = &u[(i + 1) * w..(i + 2) * w];
            for j in 0..w {
                g1[o + j] = next[j] - row[j];
            }
        } else {
            g1[o..o + w].fill(0.0);
        }
        for j in 0..w - 1 {
            g2[o + j] = row[j + 1] - row[j];
        }
        g2[o + w - 1] = 0.0;
    }
}

/// Backward-difference divergence, the negative adjoint of [`grad`].
pub fn div(p: &VectorField) -> Image {
    let (w, h) = (p.width(), p.height());
    let mut out = vec![0.0; w * h];
    div_into(p.p1.data(), p.p2.data(), w, h, &mut out);
    Image::new(w, h, out).unwrap()
}

pub(crate) fn div_into(p1: &[f64], p2: &[f64], w: usize, h: usize, out: &mut [f64]) {
    for i in 0..h {
        let o = i * w;
        for j in 0..w {
            // row term: p1[i] for i < M-1, minus p1[i-1] for i > 0
            let mut d = 0.0;
            if i + 1 < h {
                d += p1[o + j];
            }
            if i > 0 {
                d -= p1[o - w + j];
            }
            if j + 1 < w {
                d += p2[o + j];
            }
            if j > 0 {
                d -= p2[o + j - 1];
            }
            out[o + j] = d;
        }
    }
}

/// Discrete isotropic total variation `sum |grad u|`.
pub fn total_variation(u: &Image) -> f64 {
    let g = grad(u);
    g.p1
        .data()
        .iter()
        .zip(g.p2.data())
        .map(|(a, b)| a.hypot(*b))
        .sum()
}

/// Neumann 5-point Laplacian, `div(grad u)`.
pub fn laplacian(u: &Image) -> Image {
    div(&grad(u))
}
