//! Experiment registry, configuration, deterministic execution, and report
//! emission.
//!
//! Every experiment is a sweep over questions `j < j_max` crossed with a
//! precision axis. Cells run independently (in parallel when enabled) and
//! reduce in fixed cell order, reports are CSV (one row per cell) plus a
//! JSON summary, and reruns of the same config are byte-identical. Wall
//! time is reported to the caller but never written into the artifacts.

mod claim;
mod config;
mod experiments;
mod report;

pub use claim::{verify_claim, ClaimCell, ClaimError, ClaimVerdict, QuestionThreshold};
pub use config::{
    BlipParams, CutoffChoice, ExperimentConfig, GrowthParams, RhoChoice, RichardsonParams,
    SourceKind, SourceSpec, SpectraParams, TreeChoice,
};
pub use experiments::ExperimentOutput;
pub use report::ReportPaths;

use std::path::Path;
use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Claim(#[from] ClaimError),
    #[error("computation failed: {0}")]
    Computation(String),
}

/// Stable registry of experiment names and one-line descriptions.
pub const EXPERIMENTS: &[(&str, &str)] = &[
    (
        "blip-differentiator",
        "time-precision sweep of the blip-signal differentiator",
    ),
    (
        "richardson-K",
        "cutoff detection integral over the barrier device across upper limits",
    ),
    (
        "spectra-T",
        "line-vs-band spectral classification across measurement resolutions",
    ),
    (
        "spectra-S",
        "compact-operator line detection across measurement resolutions",
    ),
    (
        "growth-trial",
        "trial-and-error explorer trace on a growth tree",
    ),
];

/// Experiment names with descriptions, in stable order.
pub fn list_experiments() -> &'static [(&'static str, &'static str)] {
    EXPERIMENTS
}

pub fn is_known_experiment(name: &str) -> bool {
    EXPERIMENTS.iter().any(|(n, _)| *n == name)
}

/// A completed run: the effective config echo, per-cell output, the claim
/// analysis when the experiment sweeps a precision axis, and wall time
/// (in memory only).
#[derive(Debug)]
pub struct RunReport {
    pub experiment: String,
    pub config_echo: String,
    pub output: ExperimentOutput,
    pub claim: Option<ClaimVerdict>,
    pub wall_time: Duration,
}

/// Execute the configured experiment and persist its reports under
/// `out_dir`. Relative schedule-file paths resolve against `base_dir`.
/// Identical configs produce byte-identical artifacts.
pub fn run(
    config: &ExperimentConfig,
    base_dir: &Path,
    out_dir: &Path,
) -> Result<RunReport, HarnessError> {
    if !is_known_experiment(&config.experiment) {
        return Err(HarnessError::UnknownExperiment(config.experiment.clone()));
    }
    config.validate()?;
    let started = Instant::now();
    let output = experiments::run_experiment(config, base_dir)?;
    let claim = if output.claim_cells.is_empty() {
        None
    } else {
        Some(verify_claim(&output.claim_cells)?)
    };
    let config_echo = toml::to_string(config)
        .map_err(|e| HarnessError::ConfigInvalid(format!("cannot echo config: {e}")))?;
    let report = RunReport {
        experiment: config.experiment.clone(),
        config_echo,
        output,
        claim,
        wall_time: started.elapsed(),
    };
    report::write_report(out_dir, &report)?;
    Ok(report)
}

/// Write paths for a report that `run` would produce, for callers that want
/// to inspect artifacts.
pub fn report_paths(out_dir: &Path, experiment: &str) -> ReportPaths {
    report::paths(out_dir, experiment)
}
