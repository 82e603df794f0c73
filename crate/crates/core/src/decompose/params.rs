use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ratio between the shrinkage threshold and `kappa_t * sigma` observed in
/// the published parameter pairs (0.2, 20) -> 9.4 and (0.5, 20) -> 23.5.
pub const DELTA_PER_KAPPA_SIGMA: f64 = 2.35;

/// Guard added to `nu` before dividing by it.
pub const DEFAULT_KAPPA: f64 = 1e-2;

/// Inner iterations of the `H^{-1}` projector, which needs a step eight
/// times smaller than the plain one.
pub const DEFAULT_H1_N_ITER: usize = 500;

/// Outer-loop termination: stop once every component moved by at most
/// `epsilon` (max-abs) or after `n_step` rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub epsilon: f64,
    pub n_step: usize,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            n_step: 50,
        }
    }
}

impl StoppingRule {
    pub fn new(epsilon: f64, n_step: usize) -> Result<Self> {
        let rule = Self { epsilon, n_step };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", format!("must be > 0, got {}", self.epsilon)));
        }
        if self.n_step == 0 {
            return Err(Error::invalid("n_step", "must be >= 1"));
        }
        Ok(())
    }
}

/// Every tunable of every model. A model reads the fields it needs and
/// ignores the rest; [`crate::decompose::Decomposer::params`] echoes back
/// the fully resolved set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
    /// Absolute noise threshold.
    pub delta: Option<f64>,
    /// Threshold as a multiple of the noise level: `delta = 2.35 kappa_t sigma`.
    pub delta_kappa: Option<f64>,
    pub noise_sigma: Option<f64>,
    /// Local-variance window (odd).
    pub window: Option<usize>,
    pub kappa: Option<f64>,
    pub tau: Option<f64>,
    pub n_iter: Option<usize>,
    pub tol: Option<f64>,
    pub epsilon: Option<f64>,
    pub n_step: Option<usize>,
    /// Wavelet levels.
    pub levels: Option<usize>,
    /// Contourlet directions per level, coarse to fine.
    pub dirs: Option<Vec<usize>>,
    pub seed: Option<u64>,
}

macro_rules! overlay_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl ModelParams {
    /// Fields set in `other` replace those in `self`.
    pub fn overlay(&self, other: &ModelParams) -> ModelParams {
        let mut out = self.clone();
        overlay_fields!(out, other; lambda, mu, mu1, mu2, delta, delta_kappa, noise_sigma,
            window, kappa, tau, n_iter, tol, epsilon, n_step, levels, dirs, seed);
        out
    }

    pub(crate) fn require(value: Option<f64>, name: &'static str) -> Result<f64> {
        let v = value.ok_or(Error::MissingParameter(name))?;
        positive(v, name)
    }

    pub fn stopping_rule(&self) -> Result<StoppingRule> {
        let d = StoppingRule::default();
        StoppingRule::new(self.epsilon.unwrap_or(d.epsilon), self.n_step.unwrap_or(d.n_step))
    }

    /// Noise threshold, either given directly or from `(kappa_t, sigma)`.
    pub fn resolve_delta(&self) -> Result<f64> {
        let delta = match (self.delta, self.delta_kappa, self.noise_sigma) {
            (Some(d), _, _) => d,
            (None, Some(k), Some(s)) => DELTA_PER_KAPPA_SIGMA * k * s,
            (None, Some(_), None) => return Err(Error::MissingParameter("noise_sigma")),
            _ => return Err(Error::MissingParameter("delta")),
        };
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::invalid("delta", format!("must be >= 0, got {delta}")));
        }
        Ok(delta)
    }
}

pub(crate) fn positive(v: f64, name: &'static str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be > 0, got {v}")))
    }
}

/// The three published parameter sets for the standard phantom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// `bv-g-g`: lambda 10, mu1 1000, mu2 100, 3x3 window.
    Jg,
    /// `bv-g-e`: lambda 1, mu 500, delta 9.4.
    Ac2,
    /// `bv-g-co`: lambda 1, mu 500, delta 23.5.
    Co,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Jg, Preset::Ac2, Preset::Co];

    pub fn label(self) -> &'static str {
        match self {
            Preset::Jg => "JG",
            Preset::Ac2 => "AC2",
            Preset::Co => "Co",
        }
    }

    pub fn model(self) -> &'static str {
        match self {
            Preset::Jg => "bv-g-g",
            Preset::Ac2 => "bv-g-e",
            Preset::Co => "bv-g-co",
        }
    }

    pub fn params(self) -> ModelParams {
        match self {
            Preset::Jg => ModelParams {
                lambda: Some(10.0),
                mu1: Some(1000.0),
                mu2: Some(100.0),
                window: Some(3),
                ..Default::default()
            },
            Preset::Ac2 => ModelParams {
                lambda: Some(1.0),
                mu: Some(500.0),
                delta: Some(9.4),
                ..Default::default()
            },
            Preset::Co => ModelParams {
                lambda: Some(1.0),
                mu: Some(500.0),
                delta: Some(23.5),
                ..Default::default()
            },
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jg" => Ok(Preset::Jg),
            "ac2" => Ok(Preset::Ac2),
            "co" => Ok(Preset::Co),
            _ => Err(Error::invalid("preset", format!("expected JG, AC2 or Co, got `{s}`"))),
        }
    }
}
