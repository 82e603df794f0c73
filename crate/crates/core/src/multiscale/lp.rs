use crate::error::{Error, Result};
use crate::image::Image;

use super::dwt::{check_depth, padded_size};
use super::filters::{FilterSpec, PyramidFilters};

/// Laplacian pyramid: bandpass residuals (finest first) plus the coarse
/// lowpass image.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianPyramid {
    pub levels: usize,
    pub bands: Vec<Image>,
    pub coarse: Image,
    /// Size before symmetric padding.
    pub width: usize,
    pub height: usize,
}

/// Lowpass filter along one axis and keep even samples.
fn down_line(x: &[f64], h: &[f64], out: &mut [f64]) {
    let n = x.len() as isize;
    let c = (h.len() / 2) as isize;
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (t, &ht) in h.iter().enumerate() {
            let idx = (2 * k as isize + t as isize - c).rem_euclid(n);
            acc += ht * x[idx as usize];
        }
        *o = acc;
    }
}

/// Insert zeros between samples and lowpass filter.
fn up_line(c: &[f64], g: &[f64], out: &mut [f64]) {
    let n = out.len() as isize;
    let off = (g.len() / 2) as isize;
    out.fill(0.0);
    for (k, &ck) in c.iter().enumerate() {
        for (t, &gt) in g.iter().enumerate() {
            let idx = (2 * k as isize + t as isize - off).rem_euclid(n);
            out[idx as usize] += gt * ck;
        }
    }
}

fn separable(
    img: &Image,
    out_w: usize,
    out_h: usize,
    taps: &[f64],
    line: fn(&[f64], &[f64], &mut [f64]),
) -> Image {
    let (w, h) = (img.width(), img.height());
    let mut tmp = vec![0.0; out_w * h];
    for i in 0..h {
        line(
            &img.data()[i * w..(i + 1) * w],
            taps,
            &mut tmp[i * out_w..(i + 1) * out_w],
        );
    }
    let mut out = vec![0.0; out_w * out_h];
    let mut col = vec![0.0; h];
    let mut res = vec![0.0; out_h];
    for j in 0..out_w {
        for i in 0..h {
            col[i] = tmp[i * out_w + j];
        }
        line(&col, taps, &mut res);
        for i in 0..out_h {
            out[i * out_w + j] = res[i];
        }
    }
    Image::new(out_w, out_h, out).unwrap()
}

pub(crate) fn reduce(img: &Image, f: &PyramidFilters) -> Image {
    separable(img, img.width() / 2, img.height() / 2, &f.analysis, down_line)
}

pub(crate) fn expand(img: &Image, f: &PyramidFilters) -> Image {
    separable(img, img.width() * 2, img.height() * 2, &f.synthesis, up_line)
}

/// Pyramid of an image whose sides are already multiples of `2^levels`.
pub(crate) fn decompose_exact(f: &Image, levels: usize, filters: &PyramidFilters) -> (Vec<Image>, Image) {
    let mut cur = f.clone();
    let mut bands = Vec::with_capacity(levels);
    for _ in 0..levels {
        let coarse = reduce(&cur, filters);
        let pred = expand(&coarse, filters);
        bands.push(cur.sub(&pred).unwrap());
        cur = coarse;
    }
    (bands, cur)
}

/// Dual-frame reconstruction `x = d + expand(c - reduce(d))`. Since
/// `reduce . expand` is the identity for the biorthogonal pair, this
/// inverts exact coefficients and discards the part of modified bandpass
/// bands that lies outside the pyramid's range.
pub(crate) fn reconstruct_exact(bands: &[Image], coarse: &Image, filters: &PyramidFilters) -> Result<Image> {
    let mut cur = coarse.clone();
    for band in bands.iter().rev() {
        let c = cur.sub(&reduce(band, filters))?;
        cur = expand(&c, filters).add(band)?;
    }
    Ok(cur)
}

pub fn lp_decompose(f: &Image, levels: usize, spec: &FilterSpec) -> Result<LaplacianPyramid> {
    check_depth(f.width(), f.height(), levels, "pyramid")?;
    let m = 1 << levels;
    let padded = f.pad_symmetric(padded_size(f.width(), m), padded_size(f.height(), m));
    let (bands, coarse) = decompose_exact(&padded, levels, &spec.pyramid.filters());
    Ok(LaplacianPyramid {
        levels,
        bands,
        coarse,
        width: f.width(),
        height: f.height(),
    })
}

pub fn lp_reconstruct(pyr: &LaplacianPyramid, spec: &FilterSpec) -> Result<Image> {
    if pyr.bands.len() != pyr.levels {
        return Err(Error::invalid("pyramid", "band count differs from levels"));
    }
    for (k, band) in pyr.bands.iter().enumerate() {
        let expect = (pyr.coarse.width() << (pyr.levels - k), pyr.coarse.height() << (pyr.levels - k));
        if (band.width(), band.height()) != expect {
            return Err(Error::UnsupportedSize(format!(
                "pyramid band {k} is {}x{}, inconsistent with the coarse band",
                band.width(),
                band.height()
            )));
        }
    }
    let full = reconstruct_exact(&pyr.bands, &pyr.coarse, &spec.pyramid.filters())?;
    if (full.width(), full.height()) == (pyr.width, pyr.height) {
        Ok(full)
    } else {
        full.crop(0, 0, pyr.width, pyr.height)
    }
}
