//! RF chain model, experiment runner, studies and result files.

mod chain;
mod experiment;
mod output;
mod presets;
mod study;

pub use chain::{run_chain, BandpassConfig, ChainOutput, RfChainConfig};
pub use experiment::{
    run_experiment, CheckSpec, Distribution, ExemplarTrace, ExperimentConfig, ExperimentResult,
    ExperimentSummary, SnrSpec,
};
pub use output::{emit_plots, write_results, HISTOGRAM_BINS};
pub use presets::{preset, PRESET_NAMES, REFERENCE_NGD_DELTA_T};
pub use study::{
    crlb_study, envelope_overlap, mask_null_study, metric_overlap, run_metric_study, CrlbRow,
    MetricComparison, MetricOverlap, MetricStudy,
};
