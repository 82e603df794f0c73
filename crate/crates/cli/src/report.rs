//! JSON report documents. Field order and names are part of the contract;
//! bump [`SCHEMA_VERSION`] on incompatible changes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use vardecomp::decompose::{ModelParams, NuPartition, ProjectorStats};
use vardecomp::eval::{PhantomSpec, QuadraticFit, SweepRow};

use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

/// Offset added to `v` and `w` in their PGM previews.
pub const DISPLAY_OFFSET: f64 = 128.0;

#[derive(Debug, Serialize)]
pub struct SynthReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub files: BTreeMap<String, String>,
    pub spec: PhantomSpec,
}

#[derive(Debug, Serialize)]
pub struct DecomposeReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub model: String,
    pub preset: Option<String>,
    pub input: String,
    pub width: usize,
    pub height: usize,
    pub params: ModelParams,
    pub iterations: usize,
    pub final_delta: f64,
    pub converged: bool,
    pub residual_rms: f64,
    pub v_certificate_norm: Option<f64>,
    pub projector: ProjectorStats,
    /// Present for the locally weighted model; `v` and `w` files then hold
    /// `nu1 v` and `nu2 w`.
    pub nu: Option<NuPartition>,
    pub display_offset: f64,
    pub runtime_s: f64,
    pub files: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub model: Option<String>,
    pub err_u: f64,
    pub err_v: f64,
    pub residue: Option<f64>,
    pub runtime_s: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub params: Option<ModelParams>,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub sigma: f64,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
    /// Least-squares `metric = c A^2`; absent with fewer than two nonzero amplitudes.
    pub fit: Option<QuadraticFit>,
}

pub fn emit<T: Serialize>(report: &T, path: Option<&Path>, stdout: bool) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Failure::Io(e.to_string()))?;
    if let Some(p) = path {
        std::fs::write(p, format!("{text}\n"))?;
    }
    if stdout {
        println!("{text}");
    }
    Ok(())
}

pub fn sweep_table(r: &SweepReport) -> String {
    let mut out = format!("{:>8}  {:>20}\n", "A", "metric");
    for row in &r.rows {
        out += &format!("{:>8.3}  {:>20.6}\n", row.amplitude, row.metric);
    }
    if let Some(f) = r.fit {
        out += &format!("fit: metric = {:.6} A^2, R^2 = {:.6}\n", f.c, f.r2);
    }
    out
}

pub fn eval_table(r: &EvalReport) -> String {
    let residue = r.residue.map_or("-".to_string(), |x| format!("{x:.6}"));
    format!(
        "{:<10} {:>14} {:>14} {:>20}\n{:<10} {:>14.6} {:>14.6} {:>20}\n",
        "model",
        "err_u",
        "err_v",
        "residue",
        r.model.as_deref().unwrap_or("-"),
        r.err_u,
        r.err_v,
        residue
    )
}
