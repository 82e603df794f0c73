use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::image::Image;

use super::dfb::{DfbPlan, MAX_DEPTH};
use super::dwt::{check_depth, padded_size};
use super::filters::{FilterSpec, PyramidFilters};
use super::lp::{decompose_exact, reconstruct_exact};
use super::shrink::{check_threshold, soft_shrink};

/// Default directions per pyramid level, coarse to fine.
pub const DEFAULT_DIRS: [usize; 3] = [8, 8, 4];

const GAIN_REALIZATIONS: usize = 4;
const GAIN_SEED: u64 = 0x5eed_c0de;

/// Contourlet coefficients.
///
/// `bands[k]` holds the directional subbands of pyramid level `k`, finest
/// first, ordered by passband orientation. Directional coefficients are
/// divided by their white-noise gain, so unit white noise gives unit
/// variance in every subband; the coarse band is multiplied by `2^levels`
/// so a constant image keeps its energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourletCoeffs {
    pub levels: usize,
    /// Directions per level, coarse to fine.
    pub dirs: Vec<usize>,
    pub coarse: Image,
    pub bands: Vec<Vec<Image>>,
}

impl ContourletCoeffs {
    /// Subbands of scale `j` (`0` = coarsest bandpass level).
    pub fn scale(&self, j: usize) -> &[Image] {
        &self.bands[self.levels - 1 - j]
    }

    pub fn directional_coefficients(&self) -> impl Iterator<Item = f64> + '_ {
        self.bands
            .iter()
            .flat_map(|lvl| lvl.iter().flat_map(|b| b.data().iter().copied()))
    }

    pub fn energy(&self) -> f64 {
        self.coarse.dot(&self.coarse).unwrap()
            + self.directional_coefficients().map(|c| c * c).sum::<f64>()
    }

    pub fn map_directional(&self, f: impl Fn(f64) -> f64) -> ContourletCoeffs {
        ContourletCoeffs {
            bands: self
                .bands
                .iter()
                .map(|lvl| lvl.iter().map(|b| b.map(&f)).collect())
                .collect(),
            ..self.clone()
        }
    }
}

fn depth_of(dirs: usize) -> Result<usize> {
    if dirs == 0 || !dirs.is_power_of_two() || dirs > 1 << MAX_DEPTH {
        return Err(Error::invalid(
            "dirs",
            format!("direction counts must be powers of two up to {}, got {dirs}", 1 << MAX_DEPTH),
        ));
    }
    Ok(dirs.trailing_zeros() as usize)
}

/// Reusable contourlet transform for one image size and schedule.
#[derive(Debug, Clone)]
pub struct ContourletPlan {
    width: usize,
    height: usize,
    padded_w: usize,
    padded_h: usize,
    levels: usize,
    dirs: Vec<usize>,
    pyramid: PyramidFilters,
    /// DFB per pyramid level, finest first.
    dfb: Vec<DfbPlan>,
    gains: Vec<Vec<f64>>,
}

impl ContourletPlan {
    /// `dirs` lists directions per level from coarse to fine; its length
    /// is the number of pyramid levels.
    pub fn new(width: usize, height: usize, dirs: &[usize], spec: &FilterSpec) -> Result<Self> {
        let levels = dirs.len();
        check_depth(width, height, levels, "contourlet")?;
        let depths = dirs
            .iter()
            .rev()
            .map(|&d| depth_of(d))
            .collect::<Result<Vec<_>>>()?;
        let multiple = depths
            .iter()
            .enumerate()
            .map(|(k, &d)| 1usize << (k + d))
            .chain(std::iter::once(1 << levels))
            .max()
            .unwrap();
        let (padded_w, padded_h) = (padded_size(width, multiple), padded_size(height, multiple));
        let dfb = depths
            .iter()
            .enumerate()
            .map(|(k, &d)| DfbPlan::new(padded_w >> k, padded_h >> k, d, spec.fan))
            .collect::<Result<Vec<_>>>()?;
        let mut plan = Self {
            width,
            height,
            padded_w,
            padded_h,
            levels,
            dirs: dirs.to_vec(),
            pyramid: spec.pyramid.filters(),
            gains: dfb.iter().map(|p| vec![1.0; p.subband_count()]).collect(),
            dfb,
        };
        plan.gains = plan.measure_gains();
        Ok(plan)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn dirs(&self) -> &[usize] {
        &self.dirs
    }

    /// White-noise gain of each subband, finest level first.
    pub fn gains(&self) -> &[Vec<f64>] {
        &self.gains
    }

    /// Root-mean-square subband response to unit white noise, averaged over
    /// a few seeded realizations.
    fn measure_gains(&self) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(GAIN_SEED);
        let mut acc: Vec<Vec<f64>> = self.dfb.iter().map(|p| vec![0.0; p.subband_count()]).collect();
        for _ in 0..GAIN_REALIZATIONS {
            let noise = Image::from_fn(self.padded_w, self.padded_h, |_, _| StandardNormal.sample(&mut rng));
            let raw = self.raw_forward(&noise).expect("plan-sized input");
            for (a, lvl) in acc.iter_mut().zip(&raw.1) {
                for (s, b) in a.iter_mut().zip(lvl) {
                    *s += b.dot(b).unwrap() / b.len() as f64;
                }
            }
        }
        acc.into_iter()
            .map(|lvl| {
                lvl.into_iter()
                    .map(|s| (s / GAIN_REALIZATIONS as f64).sqrt())
                    .map(|g| if g > 0.0 { g } else { 1.0 })
                    .collect()
            })
            .collect()
    }

    fn raw_forward(&self, padded: &Image) -> Result<(Image, Vec<Vec<Image>>)> {
        let (bands, coarse) = decompose_exact(padded, self.levels, &self.pyramid);
        let dir = bands
            .iter()
            .zip(&self.dfb)
            .map(|(b, p)| p.forward(b))
            .collect::<Result<Vec<_>>>()?;
        Ok((coarse, dir))
    }

    pub fn forward(&self, f: &Image) -> Result<ContourletCoeffs> {
        if (f.width(), f.height()) != (self.width, self.height) {
            return Err(Error::DimensionMismatch {
                left_w: f.width(),
                left_h: f.height(),
                right_w: self.width,
                right_h: self.height,
            });
        }
        let padded = f.pad_symmetric(self.padded_w, self.padded_h);
        let (coarse, dir) = self.raw_forward(&padded)?;
        let bands = dir
            .into_iter()
            .zip(&self.gains)
            .map(|(lvl, g)| lvl.into_iter().zip(g).map(|(b, &gk)| b.scale(1.0 / gk)).collect())
            .collect();
        Ok(ContourletCoeffs {
            levels: self.levels,
            dirs: self.dirs.clone(),
            coarse: coarse.scale((1u64 << self.levels) as f64),
            bands,
        })
    }

    pub fn inverse(&self, c: &ContourletCoeffs) -> Result<Image> {
        if c.levels != self.levels || c.bands.len() != self.levels || c.dirs != self.dirs {
            return Err(Error::invalid("coefficients", "schedule differs from the plan"));
        }
        let mut bands = Vec::with_capacity(self.levels);
        for ((lvl, p), g) in c.bands.iter().zip(&self.dfb).zip(&self.gains) {
            if lvl.len() != g.len() {
                return Err(Error::invalid("coefficients", "subband count differs from the plan"));
            }
            let raw: Vec<Image> = lvl.iter().zip(g).map(|(b, &gk)| b.scale(gk)).collect();
            bands.push(p.inverse(&raw)?);
        }
        let coarse = c.coarse.scale(1.0 / (1u64 << self.levels) as f64);
        let full = reconstruct_exact(&bands, &coarse, &self.pyramid)?;
        if (full.width(), full.height()) == (self.width, self.height) {
            Ok(full)
        } else {
            full.crop(0, 0, self.width, self.height)
        }
    }

    /// Contourlet soft thresholding: shrink directional coefficients by
    /// `threshold`, keep the coarse band. A zero threshold returns `f`.
    pub fn cst(&self, f: &Image, threshold: f64) -> Result<Image> {
        check_threshold("threshold", threshold)?;
        if threshold == 0.0 {
            return Ok(f.clone());
        }
        let c = self.forward(f)?.map_directional(|x| soft_shrink(x, threshold));
        self.inverse(&c)?.ensure_finite("contourlet shrinkage")
    }
}

fn check_schedule(levels: usize, dirs: &[usize]) -> Result<()> {
    if levels != dirs.len() {
        return Err(Error::invalid(
            "dirs",
            format!("schedule has {} entries for {levels} levels", dirs.len()),
        ));
    }
    Ok(())
}

pub fn contourlet_forward(f: &Image, levels: usize, dirs: &[usize], spec: &FilterSpec) -> Result<ContourletCoeffs> {
    check_schedule(levels, dirs)?;
    ContourletPlan::new(f.width(), f.height(), dirs, spec)?.forward(f)
}

/// Inverse for an image of size `width x height`.
pub fn contourlet_inverse(
    c: &ContourletCoeffs,
    width: usize,
    height: usize,
    spec: &FilterSpec,
) -> Result<Image> {
    ContourletPlan::new(width, height, &c.dirs, spec)?.inverse(c)
}

pub fn cst(f: &Image, threshold: f64, levels: usize, dirs: &[usize], spec: &FilterSpec) -> Result<Image> {
    check_schedule(levels, dirs)?;
    check_threshold("threshold", threshold)?;
    if threshold == 0.0 {
        return Ok(f.clone());
    }
    ContourletPlan::new(f.width(), f.height(), dirs, spec)?.cst(f, threshold)
}
