//! Discrete differential operators, total variation, and the dual
//! fixed-point projectors onto `G`-balls and their `K`-weighted variant.
//!
//! For `grad`/`div` the first component runs along rows (`i`) and the
//! second along columns (`j`); `div = -grad^*` holds exactly.

mod operator;
mod ops;
mod projector;

pub use operator::{h_minus1_norm_sq, power_iteration, solve_neg_laplacian, Identity, LinearOperator, NegLaplacian};
pub use ops::{div, grad, laplacian, total_variation, VectorField};
pub use projector::{
    project_g, project_g_full, project_g_mu, project_k, project_k_full, IterationView, Observer,
    Projection, ProjectorConfig, ProjectorReport,
};
