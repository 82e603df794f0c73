use crate::error::{Error, Result};
use crate::image::Image;

use super::filters::{FilterSpec, WaveletFilters};

/// Detail bands of one level. The first letter names the filter applied
/// along columns (horizontal direction), the second along rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailBands {
    pub lh: Image,
    pub hl: Image,
    pub hh: Image,
}

impl DetailBands {
    pub fn bands(&self) -> [&Image; 3] {
        [&self.lh, &self.hl, &self.hh]
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> DetailBands {
        DetailBands {
            lh: self.lh.map(&f),
            hl: self.hl.map(&f),
            hh: self.hh.map(&f),
        }
    }
}

/// Multilevel separable wavelet coefficients.
///
/// `details[0]` is the finest level. In scale-indexed formulas the
/// coarsest detail level is `j = 0` and the finest `j = levels - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    pub levels: usize,
    pub approx: Image,
    pub details: Vec<DetailBands>,
    /// Size of the transformed image before symmetric padding.
    pub width: usize,
    pub height: usize,
}

impl WaveletPyramid {
    /// Details of scale `j` (`0` = coarsest).
    pub fn scale(&self, j: usize) -> &DetailBands {
        &self.details[self.levels - 1 - j]
    }

    /// Applies `f` to every detail coefficient, leaving `approx` unchanged.
    pub fn map_details(&self, f: impl Fn(f64) -> f64) -> WaveletPyramid {
        WaveletPyramid {
            details: self.details.iter().map(|d| d.map(&f)).collect(),
            ..self.clone()
        }
    }

    pub fn detail_coefficients(&self) -> impl Iterator<Item = f64> + '_ {
        self.details
            .iter()
            .flat_map(|d| d.bands().into_iter().flat_map(|b| b.data().iter().copied()))
    }

    pub fn energy(&self) -> f64 {
        self.approx.dot(&self.approx).unwrap() + self.detail_coefficients().map(|c| c * c).sum::<f64>()
    }
}

pub(crate) fn padded_size(n: usize, multiple: usize) -> usize {
    n.div_ceil(multiple) * multiple
}

pub(crate) fn check_depth(width: usize, height: usize, levels: usize, what: &str) -> Result<()> {
    if levels == 0 {
        return Err(Error::invalid("levels", "must be >= 1"));
    }
    if levels >= usize::BITS as usize || (1usize << levels) > width.min(height) {
        return Err(Error::UnsupportedSize(format!(
            "{levels} {what} levels need both sides >= {}, image is {width}x{height}",
            1u128 << levels.min(127)
        )));
    }
    Ok(())
}

/// One periodic analysis step along a strided line.
fn analyze_line(x: &[f64], f: &WaveletFilters, lo: &mut [f64], hi: &mut [f64]) {
    let n = x.len();
    let half = n / 2;
    for k in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for (t, (&hl, &hh)) in f.lo.iter().zip(&f.hi).enumerate() {
            let v = x[(2 * k + t) % n];
            a += hl * v;
            d += hh * v;
        }
        lo[k] = a;
        hi[k] = d;
    }
}

fn synthesize_line(lo: &[f64], hi: &[f64], f: &WaveletFilters, x: &mut [f64]) {
    let n = x.len();
    x.fill(0.0);
    for k in 0..lo.len() {
        for (t, (&hl, &hh)) in f.lo.iter().zip(&f.hi).enumerate() {
            x[(2 * k + t) % n] += hl * lo[k] + hh * hi[k];
        }
    }
}

/// Splits `img` into (LL, LH, HL, HH) of half size.
fn analyze_2d(img: &Image, f: &WaveletFilters) -> [Image; 4] {
    let (w, h) = (img.width(), img.height());
    let (hw, hh) = (w / 2, h / 2);
    // along columns: each row -> [lo | hi]
    let mut rows_lo = vec![0.0; hw * h];
    let mut rows_hi = vec![0.0; hw * h];
    for i in 0..h {
        let row = &img.data()[i * w..(i + 1) * w];
        analyze_line(
            row,
            f,
            &mut rows_lo[i * hw..(i + 1) * hw],
            &mut rows_hi[i * hw..(i + 1) * hw],
        );
    }
    let mut out: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; hw * hh]);
    let mut col = vec![0.0; h];
    let mut lo = vec![0.0; hh];
    let mut hi = vec![0.0; hh];
    for (src, (dst_lo, dst_hi)) in [(&rows_lo, (0, 2)), (&rows_hi, (1, 3))] {
        for j in 0..hw {
            for i in 0..h {
                col[i] = src[i * hw + j];
            }
            analyze_line(&col, f, &mut lo, &mut hi);
            for i in 0..hh {
                out[dst_lo][i * hw + j] = lo[i];
                out[dst_hi][i * hw + j] = hi[i];
            }
        }
    }
    let [ll, hl, lh, hh_] = out.map(|d| Image::new(hw, hh, d).unwrap());
    [ll, lh, hl, hh_]
}

fn synthesize_2d(ll: &Image, lh: &Image, hl: &Image, hh: &Image, f: &WaveletFilters) -> Image {
    let (hw, hh_) = (ll.width(), ll.height());
    let (w, h) = (2 * hw, 2 * hh_);
    let mut rows_lo = vec![0.0; hw * h];
    let mut rows_hi = vec![0.0; hw * h];
    let mut col = vec![0.0; h];
    let mut lo = vec![0.0; hh_];
    let mut hi = vec![0.0; hh_];
    for (dst, (src_lo, src_hi)) in [(&mut rows_lo, (ll, lh)), (&mut rows_hi, (hl, hh))] {
        for j in 0..hw {
            for i in 0..hh_ {
                lo[i] = src_lo.get(i, j);
                hi[i] = src_hi.get(i, j);
            }
            synthesize_line(&lo, &hi, f, &mut col);
            for i in 0..h {
                dst[i * hw + j] = col[i];
            }
        }
    }
    let mut data = vec![0.0; w * h];
    for i in 0..h {
        synthesize_line(
            &rows_lo[i * hw..(i + 1) * hw],
            &rows_hi[i * hw..(i + 1) * hw],
            f,
            &mut data[i * w..(i + 1) * w],
        );
    }
    Image::new(w, h, data).unwrap()
}

/// Periodic separable wavelet transform. Sides that are not multiples of
/// `2^levels` are symmetrically padded first; the inverse crops back.
pub fn dwt2_forward(f: &Image, levels: usize, spec: &FilterSpec) -> Result<WaveletPyramid> {
    check_depth(f.width(), f.height(), levels, "wavelet")?;
    let filters = spec.wavelet.filters();
    let m = 1 << levels;
    let mut cur = f.pad_symmetric(padded_size(f.width(), m), padded_size(f.height(), m));
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let [ll, lh, hl, hh] = analyze_2d(&cur, &filters);
        details.push(DetailBands { lh, hl, hh });
        cur = ll;
    }
    Ok(WaveletPyramid {
        levels,
        approx: cur,
        details,
        width: f.width(),
        height: f.height(),
    })
}

pub fn dwt2_inverse(pyr: &WaveletPyramid, spec: &FilterSpec) -> Result<Image> {
    if pyr.details.len() != pyr.levels {
        return Err(Error::invalid("pyramid", "detail count differs from levels"));
    }
    let filters = spec.wavelet.filters();
    let mut cur = pyr.approx.clone();
    for d in pyr.details.iter().rev() {
        for b in d.bands() {
            cur.check_same_shape(b)?;
        }
        cur = synthesize_2d(&cur, &d.lh, &d.hl, &d.hh, &filters);
    }
    if cur.width() == pyr.width && cur.height() == pyr.height {
        Ok(cur)
    } else {
        cur.crop(0, 0, pyr.width, pyr.height)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> Image {
        Image::from_fn(w, h, |i, j| ((i * 7 + j * 13) % 17) as f64 - 3.0 * (i as f64).sin())
    }

    #[test]
    fn zero_image_gives_zero_pyramid() {
        let p = dwt2_forward(&Image::zeros(16, 16), 2, &FilterSpec::default()).unwrap();
        assert_eq!(p.energy(), 0.0);
    }

    #[test]
    fn perfect_reconstruction_and_parseval() {
        let spec = FilterSpec::default();
        let f = ramp(32, 16);
        let p = dwt2_forward(&f, 3, &spec).unwrap();
        assert_eq!(p.approx.width(), 4);
        assert_eq!(p.approx.height(), 2);
        let back = dwt2_inverse(&p, &spec).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() < 1e-10);
        let e = f.dot(&f).unwrap();
        assert!((p.energy() - e).abs() < 1e-10 * e);
    }

    #[test]
    fn haar_constant_has_no_details() {
        let spec = FilterSpec {
            wavelet: crate::multiscale::WaveletFamily::Haar,
            ..FilterSpec::default()
        };
        let p = dwt2_forward(&Image::filled(8, 8, 3.0), 3, &spec).unwrap();
        assert!(p.detail_coefficients().all(|c| c.abs() < 1e-12));
        assert!((p.approx.get(0, 0) - 24.0).abs() < 1e-12);
    }

    #[test]
    fn odd_sizes_are_padded_and_cropped() {
        let spec = FilterSpec::default();
        let f = ramp(13, 10);
        let p = dwt2_forward(&f, 2, &spec).unwrap();
        assert_eq!(p.approx.width(), 4);
        assert_eq!(p.approx.height(), 3);
        let back = dwt2_inverse(&p, &spec).unwrap();
        assert_eq!((back.width(), back.height()), (13, 10));
        assert!(back.max_abs_diff(&f).unwrap() < 1e-10);
    }

    #[test]
    fn too_deep_is_an_error() {
        let spec = FilterSpec::default();
        assert!(dwt2_forward(&Image::zeros(8, 8), 4, &spec).is_err());
        assert!(dwt2_forward(&Image::zeros(8, 8), 0, &spec).is_err());
        assert!(dwt2_forward(&Image::zeros(8, 8), 3, &spec).is_ok());
    }
}
