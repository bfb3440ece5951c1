//! Pipeline orchestration and Monte-Carlo evaluation for the vitalwave
//! radar vital-sign chain.

pub mod eval;
pub mod pipeline;

pub use eval::{evaluate, AccuracyReport, DistSpec, TrialResult};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutput};
