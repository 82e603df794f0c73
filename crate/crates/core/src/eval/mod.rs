//! Synthetic phantoms with known components, L2 error metrics and the
//! autocorrelation residue metric.

mod autocorr;
mod metrics;
mod phantom;

pub use autocorr::{autocorrelation, residue_metric};
pub use metrics::{
    evaluate, evaluate_components, quadratic_fit, residue_point, residue_sweep, run_and_evaluate, MetricsReport,
    QuadraticFit, References, SweepRow, SWEEP_AMPLITUDES,
};
pub use phantom::{synth_phantom, Phantom, PhantomSpec, Region, Shape, SinePatch, STANDARD_SEED};
