use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::multiscale::{project_e, ContourletPlan, FilterSpec, DEFAULT_DIRS, DEFAULT_WAVELET_LEVELS};
use crate::tv::{project_g_full, project_k_full, NegLaplacian, Projection, ProjectorConfig};

use super::nu::{compute_nu, NuPartition};
use super::params::{positive, ModelParams, StoppingRule, DEFAULT_H1_N_ITER, DEFAULT_KAPPA};

/// Aggregate diagnostics over every projector call of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ProjectorStats {
    pub calls: usize,
    pub total_iterations: usize,
    /// Calls that used all `n_iter` iterations without meeting `tol`.
    pub unconverged: usize,
    pub worst_last_delta: f64,
}

impl ProjectorStats {
    fn record(&mut self, p: &Projection) {
        self.calls += 1;
        self.total_iterations += p.report.iterations;
        if !p.report.converged {
            self.unconverged += 1;
        }
        self.worst_last_delta = self.worst_last_delta.max(p.report.last_delta);
    }
}

/// Output of a decomposition model.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub model: String,
    pub u: Image,
    pub v: Image,
    pub w: Option<Image>,
    pub nu: Option<NuPartition>,
    pub iterations: usize,
    /// Largest max-abs component change in the last outer iteration.
    pub final_delta: f64,
    /// Whether the stopping rule's `epsilon` was met before `n_step`.
    pub converged: bool,
    /// RMS of `f - u - v - w` (with `nu` weights for `bv-g-g`).
    pub residual_rms: f64,
    /// `max |p|` of the dual field certifying `v = mu div p`, for models
    /// whose `v` comes from a `G`-ball projection.
    pub v_certificate_norm: Option<f64>,
    pub projector: ProjectorStats,
    pub params: ModelParams,
}

impl Decomposition {
    /// `u + v (+ w)`, or `u + nu1 v + nu2 w` when a partition is present.
    pub fn recompose(&self) -> Image {
        let mut out = self.u.clone();
        match (&self.w, &self.nu) {
            (Some(w), Some(nu)) => {
                let d = out.data_mut();
                for (k, x) in d.iter_mut().enumerate() {
                    *x += nu.nu1.data()[k] * self.v.data()[k] + nu.nu2.data()[k] * w.data()[k];
                }
            }
            (w, _) => {
                out = out.add(&self.v).unwrap();
                if let Some(w) = w {
                    out = out.add(w).unwrap();
                }
            }
        }
        out
    }

    /// Texture as it enters the recomposition: `nu1 v` when weighted.
    pub fn texture(&self) -> Image {
        match &self.nu {
            Some(nu) => self.v.mul(&nu.nu1).unwrap(),
            None => self.v.clone(),
        }
    }

    /// Noise as it enters the recomposition: `nu2 w` when weighted.
    pub fn noise(&self) -> Option<Image> {
        let w = self.w.as_ref()?;
        Some(match &self.nu {
            Some(nu) => w.mul(&nu.nu2).unwrap(),
            None => w.clone(),
        })
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite() && self.w.as_ref().is_none_or(Image::is_finite)
    }
}

/// Outer-loop state handed to an observer after each iteration.
pub struct IterationState<'a> {
    pub iteration: usize,
    pub u: &'a Image,
    pub v: &'a Image,
    pub w: Option<&'a Image>,
    pub delta: f64,
}

/// A configured decomposition model.
pub trait Decomposer: Send + Sync {
    fn name(&self) -> &'static str;

    /// Fully resolved parameters, defaults filled in.
    fn params(&self) -> ModelParams;

    fn decompose_observed(
        &self,
        f: &Image,
        observer: &mut dyn FnMut(&IterationState<'_>),
    ) -> Result<Decomposition>;

    fn decompose(&self, f: &Image) -> Result<Decomposition> {
        self.decompose_observed(f, &mut |_| {})
    }
}

fn projector_config(p: &ModelParams, tau: f64, n_iter: usize) -> ProjectorConfig {
    let d = ProjectorConfig::default();
    ProjectorConfig {
        tau: p.tau.unwrap_or(tau),
        n_iter: p.n_iter.unwrap_or(n_iter),
        tol: p.tol.or(d.tol),
        allow_unstable_step: false,
    }
}

fn echo_projector(mut p: ModelParams, cfg: &ProjectorConfig) -> ModelParams {
    p.tau = Some(cfg.tau);
    p.n_iter = Some(cfg.n_iter);
    p.tol = cfg.tol;
    p
}

fn echo_stop(mut p: ModelParams, stop: &StoppingRule) -> ModelParams {
    p.epsilon = Some(stop.epsilon);
    p.n_step = Some(stop.n_step);
    p
}

fn max_change(a: &Image, b: &Image) -> f64 {
    a.max_abs_diff(b).unwrap()
}

struct Components {
    u: Image,
    v: Image,
    w: Option<Image>,
}

struct LoopOutcome {
    c: Components,
    iterations: usize,
    final_delta: f64,
    converged: bool,
}

/// Runs `step` from zero components until the stopping rule fires.
fn outer_loop(
    f: &Image,
    three_part: bool,
    stop: &StoppingRule,
    observer: &mut dyn FnMut(&IterationState<'_>),
    mut step: impl FnMut(&mut Components) -> Result<()>,
) -> Result<LoopOutcome> {
    stop.validate()?;
    let zeros = Image::zeros(f.width(), f.height());
    let mut c = Components {
        u: zeros.clone(),
        v: zeros.clone(),
        w: three_part.then(|| zeros.clone()),
    };
    let mut final_delta = f64::INFINITY;
    for n in 1..=stop.n_step {
        let (u0, v0, w0) = (c.u.clone(), c.v.clone(), c.w.clone());
        step(&mut c)?;
        let mut delta = max_change(&c.u, &u0).max(max_change(&c.v, &v0));
        if let (Some(w), Some(w0)) = (&c.w, &w0) {
            delta = delta.max(max_change(w, w0));
        }
        if !delta.is_finite() {
            return Err(Error::NonFinite("outer iteration"));
        }
        final_delta = delta;
        observer(&IterationState {
            iteration: n,
            u: &c.u,
            v: &c.v,
            w: c.w.as_ref(),
            delta,
        });
        if delta <= stop.epsilon {
            return Ok(LoopOutcome {
                c,
                iterations: n,
                final_delta,
                converged: true,
            });
        }
    }
    Ok(LoopOutcome {
        c,
        iterations: stop.n_step,
        final_delta,
        converged: false,
    })
}

fn check_input(f: &Image) -> Result<()> {
    if f.is_empty() {
        return Err(Error::invalid("f", "image is empty"));
    }
    if !f.is_finite() {
        return Err(Error::NonFinite("input image"));
    }
    Ok(())
}

/// `g - P_{G_lambda}(g)`, the ROF structure part of `g`.
fn rof_structure(g: &Image, lambda: f64, cfg: &ProjectorConfig, stats: &mut ProjectorStats) -> Result<Image> {
    let p = project_g_full(g, lambda, cfg, None)?;
    stats.record(&p);
    g.sub(&p.value)
}

fn finish(
    name: &str,
    f: &Image,
    out: LoopOutcome,
    nu: Option<NuPartition>,
    cert: Option<f64>,
    projector: ProjectorStats,
    params: ModelParams,
) -> Result<Decomposition> {
    let d = Decomposition {
        model: name.to_string(),
        u: out.c.u,
        v: out.c.v,
        w: out.c.w,
        nu,
        iterations: out.iterations,
        final_delta: out.final_delta,
        converged: out.converged,
        residual_rms: 0.0,
        v_certificate_norm: cert,
        projector,
        params,
    };
    if !d.is_finite() {
        return Err(Error::NonFinite(match d.w {
            Some(_) => "three-part decomposition",
            None => "two-part decomposition",
        }));
    }
    let residual_rms = f.sub(&d.recompose())?.rms();
    Ok(Decomposition { residual_rms, ..d })
}

/// `u = f - P_{G_lambda}(f)`, `v = f - u`.
#[derive(Debug, Clone)]
pub struct Rof {
    pub lambda: f64,
    pub cfg: ProjectorConfig,
}

impl Rof {
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        Ok(Self {
            lambda: ModelParams::require(p.lambda, "lambda")?,
            cfg: projector_config(p, ProjectorConfig::default().tau, ProjectorConfig::default().n_iter),
        })
    }
}

impl Decomposer for Rof {
    fn name(&self) -> &'static str {
        "rof"
    }

    fn params(&self) -> ModelParams {
        echo_projector(
            ModelParams {
                lambda: Some(self.lambda),
                ..Default::default()
            },
            &self.cfg,
        )
    }

    fn decompose_observed(&self, f: &Image, observer: &mut dyn FnMut(&IterationState<'_>)) -> Result<Decomposition> {
        check_input(f)?;
        let p = project_g_full(f, self.lambda, &self.cfg, None)?;
        let mut stats = ProjectorStats::default();
        stats.record(&p);
        let u = f.sub(&p.value)?;
        let v = f.sub(&u)?;
        let delta = u.max_abs().max(v.max_abs());
        observer(&IterationState {
            iteration: 1,
            u: &u,
            v: &v,
            w: None,
            delta,
        });
        let out = LoopOutcome {
            c: Components { u, v, w: None },
            iterations: 1,
            final_delta: delta,
            converged: true,
        };
        finish(self.name(), f, out, None, Some(p.report.max_field_norm), stats, self.params())
    }
}

/// Two-part model with texture in a `G`-ball: alternates
/// `v = P_{G_mu}(f - u)` and `u = (f - v) - P_{G_lambda}(f - v)`.
#[derive(Debug, Clone)]
pub struct BvG {
    pub lambda: f64,
    pub mu: f64,
    pub stop: StoppingRule,
    pub cfg: ProjectorConfig,
}

impl BvG {
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        let d = ProjectorConfig::default();
        Ok(Self {
            lambda: ModelParams::require(p.lambda, "lambda")?,
            mu: ModelParams::require(p.mu, "mu")?,
            stop: p.stopping_rule()?,
            cfg: projector_config(p, d.tau, d.n_iter),
        })
    }
}

impl Decomposer for BvG {
    fn name(&self) -> &'static str {
        "bv-g"
    }

    fn params(&self) -> ModelParams {
        let p = ModelParams {
            lambda: Some(self.lambda),
            mu: Some(self.mu),
            ..Default::default()
        };
        echo_stop(echo_projector(p, &self.cfg), &self.stop)
    }

    fn decompose_observed(&self, f: &Image, observer: &mut dyn FnMut(&IterationState<'_>)) -> Result<Decomposition> {
        check_input(f)?;
        let mut stats = ProjectorStats::default();
        let mut cert = 0.0;
        let out = outer_loop(f, false, &self.stop, observer, |c| {
            let pv = project_g_full(&f.sub(&c.u)?, self.mu, &self.cfg, None)?;
            stats.record(&pv);
            cert = pv.report.max_field_norm;
            c.v = pv.value;
            c.u = rof_structure(&f.sub(&c.v)?, self.lambda, &self.cfg, &mut stats)?;
            Ok(())
        })?;
        finish(self.name(), f, out, None, Some(cert), stats, self.params())
    }
}

/// Two-part model with texture in a Besov ball: `v = f - u - WST(f - u, 2 mu)`.
#[derive(Debug, Clone)]
pub struct BvE {
    pub lambda: f64,
    pub mu: f64,
    pub levels: usize,
    pub filters: FilterSpec,
    pub stop: StoppingRule,
    pub cfg: ProjectorConfig,
}

impl BvE {
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        let d = ProjectorConfig::default();
        let mu = p.mu.ok_or(Error::MissingParameter("mu"))?;
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::invalid("mu", format!("must be >= 0, got {mu}")));
        }
        Ok(Self {
            lambda: ModelParams::require(p.lambda, "lambda")?,
            mu,
            levels: levels_param(p)?,
            filters: FilterSpec::default(),
            stop: p.stopping_rule()?,
            cfg: projector_config(p, d.tau, d.n_iter),
        })
    }
}

fn levels_param(p: &ModelParams) -> Result<usize> {
    match p.levels.unwrap_or(DEFAULT_WAVELET_LEVELS) {
        0 => Err(Error::invalid("levels", "must be >= 1")),
        l => Ok(l),
    }
}

impl Decomposer for BvE {
    fn name(&self) -> &'static str {
        "bv-e"
    }

    fn params(&self) -> ModelParams {
        let p = ModelParams {
            lambda: Some(self.lambda),
            mu: Some(self.mu),
            levels: Some(self.levels),
            ..Default::default()
        };
        echo_stop(echo_projector(p, &self.cfg), &self.stop)
    }

    fn decompose_observed(&self, f: &Image, observer: &mut dyn FnMut(&IterationState<'_>)) -> Result<Decomposition> {
        check_input(f)?;
        let mut stats = ProjectorStats::default();
        let out = outer_loop(f, false, &self.stop, observer, |c| {
            c.v = project_e(&f.sub(&c.u)?, self.mu, self.levels, &self.filters)?;
            c.u = rof_structure(&f.sub(&c.v)?, self.lambda, &self.cfg, &mut stats)?;
            Ok(())
        })?;
        finish(self.name(), f, out, None, None, stats, self.params())
    }
}

/// Two-part model with an `H^{-1}` fidelity: `v = lambda (-Laplacian) div p`
/// from the generalized projector, `u = f - v`.
#[derive(Debug, Clone)]
pub struct BvH1 {
    pub lambda: f64,
    pub cfg: ProjectorConfig,
}

impl BvH1 {
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        let tau = ProjectorConfig::default().tau / 8.0;
        Ok(Self {
            lambda: ModelParams::require(p.lambda, "lambda")?,
            cfg: projector_config(p, tau, DEFAULT_H1_N_ITER),
        })
    }
}

impl Decomposer for BvH1 {
    fn name(&self) -> &'static str {
        "bv-h1"
    }

    fn params(&self) -> ModelParams {
        echo_projector(
            ModelParams {
                lambda: Some(self.lambda),
                ..Default::default()
            },
            &self.cfg,
        )
    }

    fn decompose_observed(&self, f: &Image, observer: &mut dyn FnMut(&IterationState<'_>)) -> Result<Decomposition> {
        check_input(f)?;
        let p = project_k_full(f, self.lambda, &NegLaplacian, &self.cfg, None)?;
        let mut stats = ProjectorStats::default();
        stats.record(&p);
        let v = p.value;
        let u = f.sub(&v)?;
        let delta = u.max_abs().max(v.max_abs());
        observer(&IterationState {
            iteration: 1,
            u: &u,
            v: &v,
            w: None,
            delta,
        });
        let out = LoopOutcome {
            c: Components { u, v, w: None },
            iterations: 1,
            final_delta: delta,
            converged: true,
        };
        finish(self.name(), f, out, None, None, stats, self.params())
    }
}

/// Three-part model with texture and noise in two `G`-balls of radii
/// `mu1 >> mu2`, weighted by a local-variance partition computed once from
/// a preliminary [`BvG`] texture part.
#[derive(Debug, Clone)]
pub struct BvGG {
    pub lambda: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub window: usize,
    pub kappa: f64,
    pub stop: StoppingRule,
    pub cfg: ProjectorConfig,
}

impl BvGG {
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        let d = ProjectorConfig::default();
        let window = p.window.ok_or(Error::MissingParameter("window"))?;
        if window < 3 || window.is_multiple_of(2) {
            return Err(Error::invalid("window", format!("must be odd and >= 3, got {window}")));
        }
        Ok(Self {
            lambda: ModelParams::require(p.lambda, "lambda")?,
            mu1: ModelParams::require(p.mu1, "mu1")?,
            mu2: ModelParams::require(p.mu2, "mu2")?,
            window,
            kappa: positive(p.kappa.unwrap_or(DEFAULT_KAPPA), "kappa")?,
            stop: p.stopping_rule()?,
            cfg: projector_config(p, d.tau, d.n_iter),
        })
    }
}

impl Decomposer for BvGG {
    fn name(&self) -> &'static str {
        "bv-g-g"
    }

    fn params(&self) -> ModelParams {
        let p = ModelParams {
            lambda: Some(self.lambda),
            mu1: Some(self.mu1),
            mu2: Some(self.mu2),
            window: Some(self.window),
            kappa: Some(self.kappa),
            ..Default::default()
        };
        echo_stop(echo_projector(p, &self.cfg), &self.stop)
    }

    fn decompose_observed(&self, f: &Image, observer: &mut dyn FnMut(&IterationState<'_>)) -> Result<Decomposition> {
        check_input(f)?;
        let pre = BvG {
            lambda: self.lambda,
            mu: self.mu1,
            stop: self.stop,
            cfg: self.cfg,
        }
        .decompose(f)?;
        let nu = compute_nu(&pre.v, self.window, self.kappa)?;
        let (nu1, nu2, kappa) = (nu.nu1.data(), nu.nu2.data(), self.kappa);
        let (fd, width, height) = (f.data(), f.width(), f.height());
        let mut stats = pre.projector;
        let mut cert = 0.0;
        let out = outer_loop(f, true, &self.stop, observer, |c| {
            let (u, v) = (c.u.data(), c.v.data());
            let gw = (0..fd.len())
                .map(|k| (fd[k] - u[k] - nu1[k] * v[k]) / (nu2[k] + kappa))
                .collect();
            let pw = project_g_full(&Image::new(width, height, gw)?, self.mu2, &self.cfg, None)?;
            stats.record(&pw);
            let w = pw.value;
            let gv = (0..fd.len())
                .map(|k| (fd[k] - u[k] - nu2[k] * w.data()[k]) / (nu1[k] + kappa))
                .collect();
            let pv = project_g_full(&Image::new(width, height, gv)?, self.mu1, &self.cfg, None)?;
            stats.record(&pv);
            cert = pv.report.max_field_norm;
            let v = pv.value;
            let gu = (0..fd.len())
                .map(|k| fd[k] - nu1[k] * v.data()[k] - nu2[k] * w.data()[k])
                .collect();
            c.u = rof_structure(&Image::new(width, height, gu)?, self.lambda, &self.cfg, &mut stats)?;
            c.v = v;
            c.w = Some(w);
            Ok(())
        })?;
        finish(self.name(), f, out, Some(nu), Some(cert), stats, self.params())
    }
}

/// Noise step of the shrinkage-based three-part models:
/// `w = g - shrink(g, 2 delta)`.
trait NoiseProjector: Send + Sync {
    fn project(&self, g: &Image, delta: f64) -> Result<Image>;
}

struct WaveletNoise {
    levels: usize,
    filters: FilterSpec,
}

impl NoiseProjector for WaveletNoise {
    fn project(&self, g: &Image, delta: f64) -> Result<Image> {
        project_e(g, delta, self.levels, &self.filters)
    }
}

impl NoiseProjector for ContourletPlan {
    fn project(&self, g: &Image, delta: f64) -> Result<Image> {
        g.sub(&self.cst(g, 2.0 * delta)?)
    }
}

/// Shared loop of the wavelet and contourlet three-part models.
#[allow(clippy::too_many_arguments)]
fn shrinkage_three_part(
    name: &str,
    f: &Image,
    lambda: f64,
    mu: f64,
    delta: f64,
    noise: &dyn NoiseProjector,
    stop: &StoppingRule,
    cfg: &ProjectorConfig,
    params: ModelParams,
    observer: &mut dyn FnMut(&IterationState<'_>),
) -> Result<Decomposition> {
    let mut stats = ProjectorStats::default();
    let mut cert = 0.0;
    let out = outer_loop(f, true, stop, observer, |c| {
        let w = noise.project(&f.sub(&c.u)?.sub(&c.v)?, delta)?;
        let pv = project_g_full(&f.sub(&c.u)?.sub(&w)?, mu, cfg, None)?;
        stats.record(&pv);
        cert = pv.report.max_field_norm;
        let v = pv.value;
        c.u = rof_structure(&f.sub(&v)?.sub(&w)?, lambda, cfg, &mut stats)?;
        c.v = v;
        c.w = Some(w);
        Ok(())
    })?;
    finish(name, f, out, None, Some(cert), stats, params)
}

fn three_part_common(p: &ModelParams) -> Result<(f64, f64, f64, StoppingRule, ProjectorConfig)> {
    let d = ProjectorConfig::default();
    Ok((
        ModelParams::require(p.lambda, "lambda")?,
        ModelParams::require(p.mu, "mu")?,
        p.resolve_delta()?,
        p.stopping_rule()?,
        projector_config(p, d.tau, d.n_iter),
    ))
}

/// Three-part model with noise in a Besov ball, via wavelet shrinkage.
#[derive(Debug, Clone)]
pub struct BvGE {
    pub lambda: f64,
    pub mu: f64,
    pub delta: f64,
    pub levels: usize,
    pub filters: FilterSpec,
    pub stop: StoppingRule,
    pub cfg: ProjectorConfig,
}

impl BvGE {
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        let (lambda, mu, delta, stop, cfg) = three_part_common(p)?;
        Ok(Self {
            lambda,
            mu,
            delta,
            levels: levels_param(p)?,
            filters: FilterSpec::default(),
            stop,
            cfg,
        })
    }
}

impl Decomposer for BvGE {
    fn name(&self) -> &'static str {
        "bv-g-e"
    }

    fn params(&self) -> ModelParams {
        let p = ModelParams {
            lambda: Some(self.lambda),
            mu: Some(self.mu),
            delta: Some(self.delta),
            levels: Some(self.levels),
            ..Default::default()
        };
        echo_stop(echo_projector(p, &self.cfg), &self.stop)
    }

    fn decompose_observed(&self, f: &Image, observer: &mut dyn FnMut(&IterationState<'_>)) -> Result<Decomposition> {
        check_input(f)?;
        let noise = WaveletNoise {
            levels: self.levels,
            filters: self.filters,
        };
        shrinkage_three_part(
            self.name(),
            f,
            self.lambda,
            self.mu,
            self.delta,
            &noise,
            &self.stop,
            &self.cfg,
            self.params(),
            observer,
        )
    }
}

/// Three-part model with noise in a contourlet ball, via contourlet
/// shrinkage. Keeps the transform plan of the last image size it saw.
#[derive(Debug)]
pub struct BvGCo {
    pub lambda: f64,
    pub mu: f64,
    pub delta: f64,
    pub dirs: Vec<usize>,
    pub filters: FilterSpec,
    pub stop: StoppingRule,
    pub cfg: ProjectorConfig,
    plan: Mutex<Option<Arc<ContourletPlan>>>,
}

impl BvGCo {
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        let (lambda, mu, delta, stop, cfg) = three_part_common(p)?;
        let dirs = p.dirs.clone().unwrap_or_else(|| DEFAULT_DIRS.to_vec());
        if dirs.is_empty() {
            return Err(Error::invalid("dirs", "need at least one pyramid level"));
        }
        if let Some(l) = p.levels {
            if l != dirs.len() {
                return Err(Error::invalid(
                    "levels",
                    format!("{l} levels but {} direction entries", dirs.len()),
                ));
            }
        }
        Ok(Self {
            lambda,
            mu,
            delta,
            dirs,
            filters: FilterSpec::default(),
            stop,
            cfg,
            plan: Mutex::new(None),
        })
    }

    fn plan_for(&self, f: &Image) -> Result<Arc<ContourletPlan>> {
        let mut slot = self.plan.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(p) = slot.as_ref() {
            if (p.width(), p.height()) == (f.width(), f.height()) {
                return Ok(Arc::clone(p));
            }
        }
        let plan = Arc::new(ContourletPlan::new(f.width(), f.height(), &self.dirs, &self.filters)?);
        *slot = Some(Arc::clone(&plan));
        Ok(plan)
    }
}

impl Decomposer for BvGCo {
    fn name(&self) -> &'static str {
        "bv-g-co"
    }

    fn params(&self) -> ModelParams {
        let p = ModelParams {
            lambda: Some(self.lambda),
            mu: Some(self.mu),
            delta: Some(self.delta),
            levels: Some(self.dirs.len()),
            dirs: Some(self.dirs.clone()),
            ..Default::default()
        };
        echo_stop(echo_projector(p, &self.cfg), &self.stop)
    }

    fn decompose_observed(&self, f: &Image, observer: &mut dyn FnMut(&IterationState<'_>)) -> Result<Decomposition> {
        check_input(f)?;
        let plan = self.plan_for(f)?;
        shrinkage_three_part(
            self.name(),
            f,
            self.lambda,
            self.mu,
            self.delta,
            plan.as_ref(),
            &self.stop,
            &self.cfg,
            self.params(),
            observer,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64, mu: f64) -> ModelParams {
        ModelParams {
            lambda: Some(lambda),
            mu: Some(mu),
            ..Default::default()
        }
    }

    #[test]
    fn zero_input_stops_after_one_round() {
        let f = Image::zeros(16, 16);
        let d = BvG::from_params(&params(1.0, 10.0)).unwrap().decompose(&f).unwrap();
        assert_eq!(d.iterations, 1);
        assert!(d.converged);
        assert_eq!(d.u, f);
        assert_eq!(d.v, f);
    }

    #[test]
    fn missing_parameters_are_reported() {
        assert!(matches!(
            BvG::from_params(&ModelParams {
                lambda: Some(1.0),
                ..Default::default()
            }),
            Err(Error::MissingParameter("mu"))
        ));
        assert!(matches!(
            BvGG::from_params(&ModelParams {
                lambda: Some(1.0),
                mu1: Some(1.0),
                window: Some(3),
                ..Default::default()
            }),
            Err(Error::MissingParameter("mu2"))
        ));
        assert!(BvGCo::from_params(&ModelParams {
            delta: Some(1.0),
            levels: Some(2),
            ..params(1.0, 1.0)
        })
        .is_err());
    }

    #[test]
    fn rof_of_constant_is_constant() {
        let f = Image::filled(8, 8, 42.0);
        let d = Rof::from_params(&params(5.0, 1.0)).unwrap().decompose(&f).unwrap();
        assert_eq!(d.u, f);
        assert_eq!(d.v, Image::zeros(8, 8));
        assert_eq!(d.residual_rms, 0.0);
    }

    #[test]
    fn echo_fills_defaults() {
        let m = BvGE::from_params(&ModelParams {
            delta_kappa: Some(0.5),
            noise_sigma: Some(20.0),
            ..params(1.0, 500.0)
        })
        .unwrap();
        let e = m.params();
        assert_eq!(e.n_step, Some(50));
        assert_eq!(e.levels, Some(DEFAULT_WAVELET_LEVELS));
        assert!((e.delta.unwrap() - 23.5).abs() < 1e-12);
    }

    #[test]
    fn observer_sees_every_round() {
        let f = Image::from_fn(16, 16, |i, j| ((i * 7 + j * 3) % 11) as f64 * 10.0);
        let mut seen = Vec::new();
        let m = BvG::from_params(&ModelParams {
            n_step: Some(4),
            epsilon: Some(1e-9),
            ..params(1.0, 10.0)
        })
        .unwrap();
        let d = m.decompose_observed(&f, &mut |s| seen.push((s.iteration, s.delta))).unwrap();
        assert_eq!(seen.len(), d.iterations);
        assert_eq!(seen.last().unwrap().1, d.final_delta);
        assert!(d.iterations <= 4);
    }
}
