//! Besov-type norms from multiscale coefficients, truncated to the
//! computed depth. Scale `j = 0` is the coarsest detail level, `d = 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;

use super::contourlet::{ContourletCoeffs, ContourletPlan};
use super::dwt::{dwt2_forward, WaveletPyramid};
use super::filters::FilterSpec;

const DIM: f64 = 2.0;

/// Smoothness `s` and integrability exponents `p`, `q`; `f64::INFINITY`
/// selects the supremum form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    /// Drop the coarse-coefficient term.
    pub homogeneous: bool,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, q: f64, homogeneous: bool) -> Result<Self> {
        let idx = Self { s, p, q, homogeneous };
        idx.validate()?;
        Ok(idx)
    }

    /// The noise-space index `s = -1`, `p = q = inf`, homogeneous.
    pub fn noise_space() -> Self {
        Self {
            s: -1.0,
            p: f64::INFINITY,
            q: f64::INFINITY,
            homogeneous: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::invalid("s", "must be finite"));
        }
        if !(self.p > 0.0) {
            return Err(Error::invalid("p", format!("must be in (0, inf], got {}", self.p)));
        }
        if !(self.q > 0.0) {
            return Err(Error::invalid("q", format!("must be in (0, inf], got {}", self.q)));
        }
        Ok(())
    }
}

/// `(sum |x|^p)^(1/p)`, or `max |x|` for `p = inf`.
fn lp_sum(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, |m, x| m.max(x.abs()))
    } else {
        values.map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `2^{j(d/2 - 1/p + s)} (sum_n 2^{jp/2} |beta|^p)^{1/p}`.
fn scale_term(j: usize, coeffs: impl Iterator<Item = f64>, idx: &BesovIndex) -> f64 {
    let j = j as f64;
    let inv_p = if idx.p.is_infinite() { 0.0 } else { 1.0 / idx.p };
    // the 2^{jp/2} weight inside the p-sum factors out as 2^{j/2}
    (j * (DIM / 2.0 - inv_p + idx.s)).exp2() * (j / 2.0).exp2() * lp_sum(coeffs, idx.p)
}

fn combine(terms: &[f64], q: f64) -> f64 {
    lp_sum(terms.iter().copied(), q)
}

pub fn besov_norm_of(pyr: &WaveletPyramid, idx: &BesovIndex) -> Result<f64> {
    idx.validate()?;
    let terms: Vec<f64> = (0..pyr.levels)
        .map(|j| {
            let d = pyr.scale(j);
            scale_term(j, d.bands().into_iter().flat_map(|b| b.data().iter().copied()), idx)
        })
        .collect();
    let mut norm = combine(&terms, idx.q);
    if !idx.homogeneous {
        norm += lp_sum(pyr.approx.data().iter().copied(), idx.p);
    }
    Ok(norm)
}

pub fn besov_norm(f: &Image, idx: &BesovIndex, levels: usize, spec: &FilterSpec) -> Result<f64> {
    besov_norm_of(&dwt2_forward(f, levels, spec)?, idx)
}

pub fn contourlet_norm_of(c: &ContourletCoeffs, idx: &BesovIndex) -> Result<f64> {
    idx.validate()?;
    let terms: Vec<f64> = (0..c.levels)
        .map(|j| scale_term(j, c.scale(j).iter().flat_map(|b| b.data().iter().copied()), idx))
        .collect();
    let mut norm = combine(&terms, idx.q);
    if !idx.homogeneous {
        norm += lp_sum(c.coarse.data().iter().copied(), idx.p);
    }
    Ok(norm)
}

/// `dirs` lists directions per level, coarse to fine.
pub fn contourlet_norm(f: &Image, idx: &BesovIndex, dirs: &[usize], spec: &FilterSpec) -> Result<f64> {
    let plan = ContourletPlan::new(f.width(), f.height(), dirs, spec)?;
    contourlet_norm_of(&plan.forward(f)?, idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_image_has_zero_norm() {
        let spec = FilterSpec::default();
        let idx = BesovIndex::new(1.0, 2.0, 2.0, false).unwrap();
        assert_eq!(besov_norm(&Image::zeros(16, 16), &idx, 2, &spec).unwrap(), 0.0);
        assert_eq!(
            besov_norm(&Image::zeros(16, 16), &BesovIndex::noise_space(), 2, &spec).unwrap(),
            0.0
        );
    }

    #[test]
    fn invalid_exponents() {
        assert!(BesovIndex::new(0.0, 0.0, 1.0, true).is_err());
        assert!(BesovIndex::new(0.0, 1.0, -1.0, true).is_err());
        assert!(BesovIndex::new(f64::NAN, 1.0, 1.0, true).is_err());
        assert!(BesovIndex::new(0.0, f64::INFINITY, f64::INFINITY, true).is_ok());
    }
}
