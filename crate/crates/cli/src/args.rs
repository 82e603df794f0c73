use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use vardecomp::decompose::{ModelParams, Preset};

#[derive(Debug, Parser)]
#[command(name = "vardecomp", version, about = "Structures / textures / noise image decomposition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic phantom with known u0, v0, w0.
    Synth(SynthArgs),
    /// Decompose an image into u, v (and w).
    Decompose(DecomposeArgs),
    /// Score components against references, or run the residue sweep.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Phantom spec as JSON; defaults to the standard phantom.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Noise standard deviation (overrides the spec).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Noise seed (overrides the spec).
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Model parameters, named after the symbols of the models.
#[derive(Debug, Args, Clone, Default)]
pub struct ParamArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub mu1: Option<f64>,
    #[arg(long)]
    pub mu2: Option<f64>,
    /// Absolute noise threshold.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Noise threshold as a multiple of sigma (`delta = 2.35 kappa_t sigma`).
    #[arg(long)]
    pub delta_kappa: Option<f64>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Local-variance window size L (odd).
    #[arg(long)]
    pub window: Option<usize>,
    /// Division guard for the weighted model.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Projector step.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Projector iterations.
    #[arg(long)]
    pub n_iter: Option<usize>,
    /// Projector early-exit tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Outer stopping threshold (max-abs change).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Outer iteration cap.
    #[arg(long)]
    pub n_step: Option<usize>,
    /// Wavelet levels.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Contourlet directions per level, coarse to fine, e.g. `8,8,4`.
    #[arg(long, value_delimiter = ',')]
    pub dirs: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ParamArgs {
    pub fn to_params(&self) -> ModelParams {
        ModelParams {
            lambda: self.lambda,
            mu: self.mu,
            mu1: self.mu1,
            mu2: self.mu2,
            delta: self.delta,
            delta_kappa: self.delta_kappa,
            noise_sigma: self.noise_sigma,
            window: self.window,
            kappa: self.kappa,
            tau: self.tau,
            n_iter: self.n_iter,
            tol: self.tol,
            epsilon: self.epsilon,
            n_step: self.n_step,
            levels: self.levels,
            dirs: self.dirs.clone(),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// One of rof, bv-g, bv-e, bv-h1, bv-g-g, bv-g-e, bv-g-co.
    #[arg(long, short)]
    pub model: Option<String>,
    /// Published parameter set: JG, AC2 or Co (implies the model).
    #[arg(long = "paper-preset", value_parser = parse_preset)]
    pub preset: Option<Preset>,
    #[command(flatten)]
    pub params: ParamArgs,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    Preset::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Input image (PGM or raw float).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Output directory for components and the report.
    #[arg(long, short)]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory holding u0/v0/w0/f0 as written by `synth`.
    #[arg(long, short)]
    pub reference: PathBuf,
    /// Directory holding u/v/w as written by `decompose`.
    #[arg(long, conflicts_with_all = ["u", "sweep"])]
    pub components: Option<PathBuf>,
    #[arg(long, requires = "v")]
    pub u: Option<PathBuf>,
    #[arg(long, requires = "u")]
    pub v: Option<PathBuf>,
    #[arg(long, requires = "u")]
    pub w: Option<PathBuf>,
    /// Residue sweep of `A (u0 + v0) + noise` instead of a scoring run.
    #[arg(long)]
    pub sweep: bool,
    /// Leak amplitudes for the sweep (default 0.05, 0.1, 0.2, ..., 0.9).
    #[arg(long, value_delimiter = ',', requires = "sweep")]
    pub amplitudes: Option<Vec<f64>>,
    /// Worker threads for the sweep.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Also write the sweep table as CSV.
    #[arg(long, requires = "sweep")]
    pub csv: Option<PathBuf>,
    /// Print an aligned text table instead of JSON on stdout.
    #[arg(long)]
    pub table: bool,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Decompose the reference `f0` with this model, then score it. In sweep
    /// mode `--noise-sigma` (default 20) and `--seed` (default 0) set the noise.
    #[command(flatten)]
    pub model: ModelArgs,
}
