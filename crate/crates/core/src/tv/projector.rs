use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;

use super::operator::LinearOperator;
use super::ops::{div_into, grad_into, VectorField};

/// Settings of the dual fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorConfig {
    /// Step size; must satisfy `tau < 1/8` (divided by `||K^{-1}||` for the
    /// generalized projector).
    pub tau: f64,
    pub n_iter: usize,
    /// Early exit once the max-abs change of `div p` drops below this.
    pub tol: Option<f64>,
    /// Accept steps beyond the convergence bound. The iteration then still
    /// runs and stays bounded but carries no convergence guarantee.
    #[serde(default)]
    pub allow_unstable_step: bool,
}

impl Default for ProjectorConfig {
    fn default() -> Self {
        Self {
            tau: 0.124,
            n_iter: 20,
            tol: Some(1e-4),
            allow_unstable_step: false,
        }
    }
}

impl ProjectorConfig {
    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_n_iter(mut self, n_iter: usize) -> Self {
        self.n_iter = n_iter;
        self
    }

    pub fn with_tol(mut self, tol: Option<f64>) -> Self {
        self.tol = tol;
        self
    }

    /// Checks the step against `1 / (8 * op_norm)`.
    pub fn validate(&self, op_norm: f64) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid("tau", format!("must be > 0, got {}", self.tau)));
        }
        let bound = 1.0 / (8.0 * op_norm);
        if self.tau >= bound && !self.allow_unstable_step {
            return Err(Error::invalid(
                "tau",
                format!("must be < {bound:.6} for convergence, got {}", self.tau),
            ));
        }
        if self.n_iter == 0 {
            return Err(Error::invalid("n_iter", "must be >= 1"));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorReport {
    pub iterations: usize,
    /// Max-abs change of `div p` (or `K^{-1} div p`) in the last iteration.
    pub last_delta: f64,
    /// Whether the tolerance stopped the iteration before `n_iter`.
    pub converged: bool,
    /// `max |p|` of the returned certificate field.
    pub max_field_norm: f64,
}

/// Result of a projection: the projected image, the dual field that
/// certifies it, and diagnostics.
#[derive(Debug, Clone)]
pub struct Projection {
    pub value: Image,
    pub field: VectorField,
    pub report: ProjectorReport,
}

/// State handed to an observer after each iteration.
pub struct IterationView<'a> {
    pub iteration: usize,
    pub field: &'a VectorField,
    /// Current estimate of the projection (already scaled by `lambda`).
    pub value: Image,
    pub delta: f64,
}

pub type Observer<'a> = &'a mut dyn FnMut(&IterationView<'_>);

/// `P_{G_lambda}(g) = lambda * div(p)`, where `p` is the fixed point of the
/// iteration driven by `g / lambda`. The ROF structure part is
/// `g - project_g(g, lambda)`.
pub fn project_g(g: &Image, lambda: f64, cfg: &ProjectorConfig) -> Result<Image> {
    Ok(project_g_full(g, lambda, cfg, None)?.value)
}

/// Projection onto the ball `G_mu`; the same iteration as [`project_g`]
/// with `mu` as radius.
pub fn project_g_mu(g: &Image, mu: f64, cfg: &ProjectorConfig) -> Result<Image> {
    project_g(g, mu, cfg)
}

pub fn project_g_full(
    g: &Image,
    lambda: f64,
    cfg: &ProjectorConfig,
    observer: Option<Observer<'_>>,
) -> Result<Projection> {
    cfg.validate(1.0)?;
    iterate(g, lambda, None, cfg, observer)
}

/// Generalized projector returning `v = lambda * K^{-1} div(p)`, the
/// texture part of `min_u J(u) + (2 lambda)^{-1} ||g - u||_K^2`.
pub fn project_k(
    g: &Image,
    lambda: f64,
    k_inv: &dyn LinearOperator,
    cfg: &ProjectorConfig,
) -> Result<Image> {
    Ok(project_k_full(g, lambda, k_inv, cfg, None)?.value)
}

pub fn project_k_full(
    g: &Image,
    lambda: f64,
    k_inv: &dyn LinearOperator,
    cfg: &ProjectorConfig,
    observer: Option<Observer<'_>>,
) -> Result<Projection> {
    cfg.validate(k_inv.norm_estimate(g.width(), g.height()))?;
    iterate(g, lambda, Some(k_inv), cfg, observer)
}

fn iterate(
    g: &Image,
    lambda: f64,
    k_inv: Option<&dyn LinearOperator>,
    cfg: &ProjectorConfig,
    mut observer: Option<Observer<'_>>,
) -> Result<Projection> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", format!("must be > 0, got {lambda}")));
    }
    if !g.is_finite() {
        return Err(Error::NonFinite("projector input"));
    }
    let (w, h) = (g.width(), g.height());
    let n = w * h;
    let tau = cfg.tau;
    let inv_lambda = 1.0 / lambda;

    let mut field = VectorField::zeros(w, h);
    // s = K^{-1} div p, the quantity whose lambda-multiple is returned
    let mut s = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut a1 = vec![0.0; n];
    let mut a2 = vec![0.0; n];
    let mut arg = vec![0.0; n];
    let mut iterations = 0;
    let mut last_delta = f64::INFINITY;
    let mut converged = false;

    for it in 1..=cfg.n_iter {
        for ((a, &sv), &gv) in arg.iter_mut().zip(&s).zip(g.data()) {
            *a = sv - gv * inv_lambda;
        }
        grad_into(&arg, w, h, &mut a1, &mut a2);
        {
            let p1 = field.p1.data_mut();
            for (p, (&x, &y)) in p1.iter_mut().zip(a1.iter().zip(&a2)) {
                *p = (*p + tau * x) / (1.0 + tau * x.hypot(y));
            }
            let p2 = field.p2.data_mut();
            for (p, (&x, &y)) in p2.iter_mut().zip(a1.iter().zip(&a2)) {
                *p = (*p + tau * y) / (1.0 + tau * x.hypot(y));
            }
        }
        div_into(field.p1.data(), field.p2.data(), w, h, &mut dp);
        let s_new = match k_inv {
            None => dp.clone(),
            Some(op) => op.apply(&Image::new(w, h, dp.clone())?).into_data(),
        };
        last_delta = s_new
            .iter()
            .zip(&s)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()));
        s = s_new;
        iterations = it;
        if !last_delta.is_finite() {
            return Err(Error::NonFinite("projector iteration"));
        }
        if let Some(obs) = observer.as_deref_mut() {
            obs(&IterationView {
                iteration: it,
                field: &field,
                value: Image::new(w, h, s.iter().map(|v| lambda * v).collect())?,
                delta: last_delta,
            });
        }
        if cfg.tol.is_some_and(|tol| last_delta < tol) {
            converged = true;
            break;
        }
    }

    let value = Image::new(w, h, s.into_iter().map(|v| lambda * v).collect())?
        .ensure_finite("projector output")?;
    let max_field_norm = field.max_norm();
    Ok(Projection {
        value,
        field,
        report: ProjectorReport {
            iterations,
            last_delta,
            converged,
            max_field_norm,
        },
    })
}
