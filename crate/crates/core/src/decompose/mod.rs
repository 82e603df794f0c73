//! Decomposition models `f = u + v (+ w)`, built from the projectors and
//! shrinkage operators and looked up by name through [`ModelRegistry`].
//!
//! | name | components | texture | noise |
//! |------|------------|---------|-------|
//! | `rof` | u, v | `v = f - u` | |
//! | `bv-g` | u, v | `G`-ball | |
//! | `bv-e` | u, v | Besov ball | |
//! | `bv-h1` | u, v | `H^{-1}` fidelity | |
//! | `bv-g-g` | u, v, w | `G`-ball | `G`-ball, weighted by [`NuPartition`] |
//! | `bv-g-e` | u, v, w | `G`-ball | wavelet shrinkage |
//! | `bv-g-co` | u, v, w | `G`-ball | contourlet shrinkage |
//!
//! Iterative models start from zero components and stop per
//! [`StoppingRule`]. The structure step is `u = g - P_{G_lambda}(g)`, so
//! `f - u - v (- w)` keeps a small residual that is reported, not removed.

mod models;
mod nu;
mod params;
mod registry;

pub use models::{
    BvE, BvG, BvGCo, BvGE, BvGG, BvH1, Decomposer, Decomposition, IterationState, ProjectorStats, Rof,
};
pub use nu::{compute_nu, NuPartition, NU_MIN};
pub use params::{
    ModelParams, Preset, StoppingRule, DEFAULT_H1_N_ITER, DEFAULT_KAPPA, DELTA_PER_KAPPA_SIGMA,
};
pub use registry::{BuildFn, ModelEntry, ModelRegistry};
