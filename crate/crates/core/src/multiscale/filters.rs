use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orthonormal Daubechies lowpass with 4 vanishing moments (8 taps).
const DB4_LO: [f64; 8] = [
    -0.010597401784997278,
    0.032883011666982945,
    0.030841381835986965,
    -0.18703481171888114,
    -0.02798376941698385,
    0.6308807679295904,
    0.7148465705525415,
    0.23037781330885523,
];

/// CDF 9/7 analysis lowpass, taps at offsets -4..=4, DC gain 1.
const CDF97_ANALYSIS: [f64; 9] = [
    0.02674875741080976,
    -0.01686411844287495,
    -0.07822326652898785,
    0.2668641184428723,
    0.6029490182363579,
    0.2668641184428723,
    -0.07822326652898785,
    -0.01686411844287495,
    0.02674875741080976,
];

/// CDF 9/7 synthesis lowpass, taps at offsets -3..=3, DC gain 2.
const CDF97_SYNTHESIS: [f64; 7] = [
    -0.09127176311424948,
    -0.05754352622849957,
    0.591271763114247,
    1.115087052456994,
    0.591271763114247,
    -0.05754352622849957,
    -0.09127176311424948,
];

/// Six-point half-sample Lagrange interpolator, taps at -5/2..=5/2.
const LAGRANGE6: [f64; 6] = [
    3.0 / 256.0,
    -25.0 / 256.0,
    150.0 / 256.0,
    150.0 / 256.0,
    -25.0 / 256.0,
    3.0 / 256.0,
];

const LAGRANGE4: [f64; 4] = [-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveletFamily {
    Db4,
    Haar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PyramidFilter {
    Cdf97,
}

/// Fan filters of the quincunx lifting steps, built as a separable product
/// of a 1D half-sample interpolator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FanFilter {
    Lagrange6,
    Lagrange4,
}

/// Named filter choices for the three transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub wavelet: WaveletFamily,
    pub pyramid: PyramidFilter,
    pub fan: FanFilter,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self {
            wavelet: WaveletFamily::Db4,
            pyramid: PyramidFilter::Cdf97,
            fan: FanFilter::Lagrange6,
        }
    }
}

/// Two-channel orthonormal filter pair.
#[derive(Debug, Clone)]
pub struct WaveletFilters {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl WaveletFamily {
    pub fn filters(self) -> WaveletFilters {
        let lo: Vec<f64> = match self {
            WaveletFamily::Db4 => DB4_LO.to_vec(),
            WaveletFamily::Haar => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
        };
        let n = lo.len();
        // quadrature mirror: g[t] = (-1)^t h[L-1-t]
        let hi = (0..n)
            .map(|t| if t % 2 == 0 { lo[n - 1 - t] } else { -lo[n - 1 - t] })
            .collect();
        WaveletFilters { lo, hi }
    }
}

/// Centered symmetric pyramid filters; `analysis[k]` sits at offset
/// `k - analysis.len()/2`.
#[derive(Debug, Clone)]
pub struct PyramidFilters {
    pub analysis: Vec<f64>,
    pub synthesis: Vec<f64>,
}

impl PyramidFilter {
    pub fn filters(self) -> PyramidFilters {
        match self {
            PyramidFilter::Cdf97 => PyramidFilters {
                analysis: CDF97_ANALYSIS.to_vec(),
                synthesis: CDF97_SYNTHESIS.to_vec(),
            },
        }
    }
}

impl FanFilter {
    /// 1D taps at half-integer positions `-(n-1)/2 ..= (n-1)/2`.
    pub fn interpolator(self) -> &'static [f64] {
        match self {
            FanFilter::Lagrange6 => &LAGRANGE6,
            FanFilter::Lagrange4 => &LAGRANGE4,
        }
    }

    /// Lifting taps `((a, b), weight)` in lattice coordinates. Tap `(a, b)`
    /// pairs 1D positions `r1 = (a+b)/2`, `r2 = (b-a)/2`; the weight carries
    /// the sign `(-1)^a` that turns the diamond response into a fan.
    pub fn lifting_taps(self) -> Vec<((i64, i64), f64)> {
        let f = self.interpolator();
        let n = f.len() as i64;
        let mut taps = Vec::with_capacity(f.len() * f.len());
        for (i1, &w1) in f.iter().enumerate() {
            for (i2, &w2) in f.iter().enumerate() {
                // doubled positions 2r = 2i - (n-1)
                let r1x2 = 2 * i1 as i64 - (n - 1);
                let r2x2 = 2 * i2 as i64 - (n - 1);
                let a = (r1x2 - r2x2) / 2;
                let b = (r1x2 + r2x2) / 2;
                let sign = if a.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
                taps.push(((a, b), sign * w1 * w2));
            }
        }
        taps
    }
}

impl FilterSpec {
    /// Verifies the declared perfect-reconstruction property of every
    /// transform on an impulse.
    pub fn verify(&self) -> Result<()> {
        use super::{dfb_decompose, dfb_reconstruct, dwt2_forward, dwt2_inverse};
        use super::{lp_decompose, lp_reconstruct};
        use crate::image::Image;

        let mut impulse = Image::zeros(32, 32);
        impulse.set(13, 6, 1.0);
        let check = |name: &str, back: Image, tol: f64| -> Result<()> {
            let err = back.max_abs_diff(&impulse)?;
            if err > tol {
                return Err(Error::invalid(
                    "filters",
                    format!("{name} fails perfect reconstruction on an impulse ({err:e})"),
                ));
            }
            Ok(())
        };
        check("wavelet", dwt2_inverse(&dwt2_forward(&impulse, 3, self)?, self)?, 1e-10)?;
        check("pyramid", lp_reconstruct(&lp_decompose(&impulse, 3, self)?, self)?, 1e-10)?;
        check("dfb", dfb_reconstruct(&dfb_decompose(&impulse, 3, self)?)?, 1e-10)?;
        Ok(())
    }
}
