use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::decompose::{Decomposer, Decomposition, ModelParams};
use crate::error::{Error, Result};
use crate::image::{gaussian_noise, Image, NoiseSpec};

use super::autocorr::residue_metric;
use super::phantom::Phantom;

/// Leak amplitudes of the residue experiment.
pub const SWEEP_AMPLITUDES: [f64; 10] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub amplitude: f64,
    pub metric: f64,
}

/// Residue metric of `amplitude * d + b` against the noise `b`.
pub fn residue_point(d: &Image, b: &Image, amplitude: f64) -> Result<SweepRow> {
    if !amplitude.is_finite() {
        return Err(Error::invalid("amplitude", "must be finite"));
    }
    let f = d.zip_map(b, |x, n| amplitude * x + n)?;
    Ok(SweepRow {
        amplitude,
        metric: residue_metric(&f, b)?,
    })
}

/// One [`residue_point`] per amplitude, with `b` drawn from `noise`.
pub fn residue_sweep(d: &Image, noise: NoiseSpec, amplitudes: &[f64]) -> Result<Vec<SweepRow>> {
    if amplitudes.is_empty() {
        return Err(Error::invalid("amplitudes", "list is empty"));
    }
    let b = gaussian_noise(noise, d.width(), d.height())?;
    amplitudes.iter().map(|&a| residue_point(d, &b, a)).collect()
}

/// Least-squares fit `metric = c * A^2` through the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub c: f64,
    /// Coefficient of determination against the mean of the metrics.
    pub r2: f64,
}

pub fn quadratic_fit(rows: &[SweepRow]) -> Result<QuadraticFit> {
    if rows.len() < 2 {
        return Err(Error::invalid("rows", "need at least two sweep points"));
    }
    let sxx: f64 = rows.iter().map(|r| r.amplitude.powi(4)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("rows", "all amplitudes are zero"));
    }
    let sxy: f64 = rows.iter().map(|r| r.amplitude.powi(2) * r.metric).sum();
    let c = sxy / sxx;
    let mean = rows.iter().map(|r| r.metric).sum::<f64>() / rows.len() as f64;
    let ss_res: f64 = rows.iter().map(|r| (r.metric - c * r.amplitude.powi(2)).powi(2)).sum();
    let ss_tot: f64 = rows.iter().map(|r| (r.metric - mean).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(QuadraticFit { c, r2 })
}

/// Errors of a decomposition against phantom references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub model: String,
    /// `||u - u0||_2`
    pub err_u: f64,
    /// `||v - v0||_2`
    pub err_v: f64,
    /// Residue metric of `w` against `w0`; absent for two-part models.
    pub residue: Option<f64>,
    /// Decomposition wall time in seconds, when measured.
    pub runtime_s: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub params: ModelParams,
}

/// Reference components to score against.
#[derive(Debug, Clone, Copy)]
pub struct References<'a> {
    pub u0: &'a Image,
    pub v0: &'a Image,
    pub w0: &'a Image,
}

impl<'a> From<&'a Phantom> for References<'a> {
    fn from(p: &'a Phantom) -> Self {
        Self {
            u0: &p.u0,
            v0: &p.v0,
            w0: &p.w0,
        }
    }
}

/// `(||u - u0||, ||v - v0||, residue(w, w0))`; the residue is absent
/// without `w`.
pub fn evaluate_components(
    u: &Image,
    v: &Image,
    w: Option<&Image>,
    refs: References<'_>,
) -> Result<(f64, f64, Option<f64>)> {
    let err_u = u.sub(refs.u0)?.l2_norm();
    let err_v = v.sub(refs.v0)?.l2_norm();
    let residue = w.map(|w| residue_metric(w, refs.w0)).transpose()?;
    Ok((err_u, err_v, residue))
}

/// Compares `u`, [`Decomposition::texture`] and [`Decomposition::noise`]
/// with the references, so weighted models are scored on `nu1 v`, `nu2 w`.
pub fn evaluate(dec: &Decomposition, phantom: &Phantom) -> Result<MetricsReport> {
    let (err_u, err_v, residue) = evaluate_components(&dec.u, &dec.texture(), dec.noise().as_ref(), phantom.into())?;
    Ok(MetricsReport {
        model: dec.model.clone(),
        err_u,
        err_v,
        residue,
        runtime_s: None,
        iterations: dec.iterations,
        converged: dec.converged,
        params: dec.params.clone(),
    })
}

/// Decomposes `phantom.f0` and evaluates the result, recording wall time.
pub fn run_and_evaluate(model: &dyn Decomposer, phantom: &Phantom) -> Result<(Decomposition, MetricsReport)> {
    let t0 = Instant::now();
    let dec = model.decompose(&phantom.f0)?;
    let runtime = t0.elapsed().as_secs_f64();
    let mut report = evaluate(&dec, phantom)?;
    report.runtime_s = Some(runtime);
    Ok((dec, report))
}
