//! Library surface of the reebmap CLI: file formats, synthetic shapes, and
//! the end-to-end pipeline. The binary in `main.rs` is a thin argument
//! parser over these functions.

pub mod io;
pub mod pipeline;
pub mod synth;

pub use io::{load_points, DenoiseSpec};
pub use pipeline::{
    convergence_study, ground_truth_diagram, run_on_cloud, run_pipeline, ConvergenceRow,
    PipelineOutput, RunConfig,
};
pub use synth::{synth_shape, Shape};
