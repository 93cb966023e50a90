//! Experiment configuration: a single TOML file with a documented key set.
//!
//! ```toml
//! experiment = "blip-differentiator"
//! j_max = 8
//! budget = 64
//! seed = 42
//!
//! [source]
//! kind = "entries"            # entries | file | machine-demo | random-bands
//! entries = [[1, 0], [3, 2]]  # (member, waiting-time) pairs
//!
//! [blip]
//! octaves = 10
//! ```
//!
//! Sections `blip`, `richardson`, `spectra`, `growth` parameterize their
//! experiment; only the section matching `experiment` is required (all its
//! keys have defaults). The CLI may override `experiment`, `seed`, and
//! `budget` after parsing; the report echoes the effective config.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::resets::{Enumerator, MachineFamily, Schedule};

fn default_budget() -> u64 {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub j_max: u32,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    pub source: SourceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blip: Option<BlipParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub richardson: Option<RichardsonParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectra: Option<SpectraParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    /// Inline `(member, waiting-time)` pairs.
    Entries,
    /// A schedule text file (`j nu` lines, `#` comments).
    File,
    /// The built-in machine family, dovetailed.
    MachineDemo,
    /// A seeded random schedule with band-friendly waiting times.
    RandomBands,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub kind: SourceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<(u64, u64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demo_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<usize>,
}

fn default_octaves() -> u32 {
    10
}
fn default_amp_eps_factor() -> f64 {
    0.125
}
fn default_threshold_factor() -> f64 {
    0.5
}

/// Blip-differentiator sweep: for each question `j` the time resolution
/// runs over `octaves` octaves `2^-(j+1) .. 2^-(j+octaves)` at time bound 1,
/// keeping the finite-difference window inside a single blip support. The
/// amplitude resolution is `amp_eps_factor * 4^-j` at bound 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlipParams {
    #[serde(default = "default_octaves")]
    pub octaves: u32,
    #[serde(default = "default_amp_eps_factor")]
    pub amp_eps_factor: f64,
    #[serde(default = "default_threshold_factor")]
    pub threshold_factor: f64,
}

impl Default for BlipParams {
    fn default() -> Self {
        BlipParams {
            octaves: default_octaves(),
            amp_eps_factor: default_amp_eps_factor(),
            threshold_factor: default_threshold_factor(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoChoice {
    Piecewise,
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffChoice {
    Exp,
    InverseSquare,
}

fn default_arity() -> usize {
    1
}
fn default_rho() -> RhoChoice {
    RhoChoice::Piecewise
}
fn default_cutoff() -> CutoffChoice {
    CutoffChoice::Exp
}
fn default_upper_limits() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}
fn default_tol() -> f64 {
    1e-9
}
fn default_detection_factor() -> f64 {
    10.0
}
fn default_z_threshold() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RichardsonParams {
    #[serde(default = "default_arity")]
    pub arity: usize,
    #[serde(default = "default_rho")]
    pub rho: RhoChoice,
    #[serde(default = "default_cutoff")]
    pub cutoff: CutoffChoice,
    #[serde(default = "default_upper_limits")]
    pub upper_limits: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// A member counts as detected when `K > detection_factor * tol`.
    #[serde(default = "default_detection_factor")]
    pub detection_factor: f64,
    /// Recorded response peak threshold; no value is fixed by theory.
    #[serde(default = "default_z_threshold")]
    pub z_threshold: f64,
}

impl Default for RichardsonParams {
    fn default() -> Self {
        RichardsonParams {
            arity: default_arity(),
            rho: default_rho(),
            cutoff: default_cutoff(),
            upper_limits: default_upper_limits(),
            tol: default_tol(),
            detection_factor: default_detection_factor(),
            z_threshold: default_z_threshold(),
        }
    }
}

fn default_band_points() -> usize {
    8
}
fn default_spectra_octaves() -> u32 {
    12
}

/// Spectral sweeps: question `j` is measured at resolutions
/// `2^-j .. 2^-(j+octaves-1)`. `band_points` discretizes each band; keep it
/// large enough that the finest swept resolution stays above
/// `width / (band_points - 1)`, or bands dissolve into their sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectraParams {
    #[serde(default = "default_band_points")]
    pub band_points: usize,
    #[serde(default = "default_spectra_octaves")]
    pub octaves: u32,
}

impl Default for SpectraParams {
    fn default() -> Self {
        SpectraParams {
            band_points: default_band_points(),
            octaves: default_spectra_octaves(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeChoice {
    /// Separating tree over the built-in machine family.
    Kleene,
    /// The full binary tree.
    Full,
    /// Left branch pruned at depth 3.
    PrunedLeft,
}

fn default_tree() -> TreeChoice {
    TreeChoice::Kleene
}
fn default_max_steps() -> usize {
    10_000
}
fn default_depth_budget() -> usize {
    20
}
fn default_kleene_budget() -> u64 {
    256
}
fn default_demo_count() -> usize {
    24
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthParams {
    #[serde(default = "default_tree")]
    pub tree: TreeChoice,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default = "default_depth_budget")]
    pub depth_budget: usize,
    #[serde(default = "default_kleene_budget")]
    pub kleene_budget: u64,
    #[serde(default = "default_demo_count")]
    pub demo_count: usize,
}

impl Default for GrowthParams {
    fn default() -> Self {
        GrowthParams {
            tree: default_tree(),
            max_steps: default_max_steps(),
            depth_budget: default_depth_budget(),
            kleene_budget: default_kleene_budget(),
            demo_count: default_demo_count(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::ConfigInvalid(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::ConfigInvalid(msg));
        if self.j_max < 1 {
            return bad("j_max must be at least 1".into());
        }
        if self.budget < 1 {
            return bad("budget must be at least 1".into());
        }
        match self.source.kind {
            SourceKind::Entries => {
                if self.source.entries.is_none() {
                    return bad("source.kind = entries requires source.entries".into());
                }
            }
            SourceKind::File => {
                if self.source.file.is_none() {
                    return bad("source.kind = file requires source.file".into());
                }
            }
            SourceKind::MachineDemo | SourceKind::RandomBands => {}
        }
        if let Some(b) = &self.blip {
            if b.octaves < 1 {
                return bad("blip.octaves must be at least 1".into());
            }
            if !(b.threshold_factor > 0.0 && b.threshold_factor < 1.0) {
                return bad("blip.threshold_factor must lie in (0, 1)".into());
            }
            if !(b.amp_eps_factor > 0.0 && b.amp_eps_factor <= 1.0) {
                return bad("blip.amp_eps_factor must lie in (0, 1]".into());
            }
        }
        if let Some(r) = &self.richardson {
            if r.arity < 1 {
                return bad("richardson.arity must be at least 1".into());
            }
            if r.upper_limits.is_empty() {
                return bad("richardson.upper_limits must be non-empty".into());
            }
            if r.upper_limits.iter().any(|&b| !b.is_finite() || b < 1.0) {
                return bad("richardson.upper_limits must all be finite and >= 1".into());
            }
            if r.tol <= 0.0 || !r.tol.is_finite() {
                return bad("richardson.tol must be positive".into());
            }
        }
        if let Some(s) = &self.spectra {
            if s.octaves < 1 {
                return bad("spectra.octaves must be at least 1".into());
            }
            if s.band_points < 2 {
                return bad("spectra.band_points must be at least 2".into());
            }
        }
        if let Some(g) = &self.growth {
            if g.max_steps < 1 {
                return bad("growth.max_steps must be at least 1".into());
            }
            if g.depth_budget < 1 {
                return bad("growth.depth_budget must be at least 1".into());
            }
        }
        Ok(())
    }

    /// Build the enumeration source. `base_dir` anchors relative schedule
    /// file paths (usually the config file's directory).
    pub fn enumerator(&self, base_dir: &Path) -> Result<Enumerator, HarnessError> {
        let invalid = |msg: String| HarnessError::ConfigInvalid(msg);
        match self.source.kind {
            SourceKind::Entries => {
                let pairs = self
                    .source
                    .entries
                    .clone()
                    .ok_or_else(|| invalid("missing source.entries".into()))?;
                let schedule =
                    Schedule::new(pairs).map_err(|e| invalid(format!("bad schedule: {e}")))?;
                Ok(Enumerator::synthetic(schedule))
            }
            SourceKind::File => {
                let rel = self
                    .source
                    .file
                    .as_ref()
                    .ok_or_else(|| invalid("missing source.file".into()))?;
                let path = base_dir.join(rel);
                let text = std::fs::read_to_string(&path)?;
                let schedule = Schedule::parse(&text)
                    .map_err(|e| invalid(format!("bad schedule file {}: {e}", path.display())))?;
                Ok(Enumerator::synthetic(schedule))
            }
            SourceKind::MachineDemo => {
                let count = self.source.demo_count.unwrap_or(24);
                Ok(Enumerator::machine(MachineFamily::demo(count)))
            }
            SourceKind::RandomBands => {
                let members = self.source.members.unwrap_or(4);
                Ok(Enumerator::synthetic(Schedule::random_for_bands(
                    self.seed, self.j_max, members,
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
experiment = "blip-differentiator"
j_max = 4
budget = 32
seed = 7

[source]
kind = "entries"
entries = [[1, 0], [3, 2]]

[blip]
octaves = 6
"#;

    #[test]
    fn parses_and_validates_sample() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        c.validate().unwrap();
        assert_eq!(c.experiment, "blip-differentiator");
        assert_eq!(c.j_max, 4);
        assert_eq!(c.blip.as_ref().unwrap().octaves, 6);
        assert_eq!(c.blip.as_ref().unwrap().threshold_factor, 0.5);
        let e = c.enumerator(Path::new(".")).unwrap();
        assert_eq!(e.value_at(0).unwrap(), 1);
    }

    #[test]
    fn round_trips_through_toml() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        let echoed = toml::to_string(&c).unwrap();
        let again = ExperimentConfig::from_toml(&echoed).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ExperimentConfig::from_toml("experiment = \"x\"\nj_max = 1\nbanana = 2\n[source]\nkind = \"machine-demo\"").is_err());
        let c = ExperimentConfig::from_toml(
            "experiment = \"x\"\nj_max = 0\n[source]\nkind = \"machine-demo\"",
        )
        .unwrap();
        assert!(matches!(c.validate(), Err(HarnessError::ConfigInvalid(_))));
        let c = ExperimentConfig::from_toml(
            "experiment = \"x\"\nj_max = 2\n[source]\nkind = \"entries\"",
        )
        .unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn file_source_reads_schedules() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("sched.txt"), "3 0\n7 1\n").unwrap();
        let c = ExperimentConfig::from_toml(
            "experiment = \"spectra-S\"\nj_max = 8\n[source]\nkind = \"file\"\nfile = \"sched.txt\"",
        )
        .unwrap();
        let e = c.enumerator(dir.path()).unwrap();
        assert_eq!(e.value_at(1).unwrap(), 7);
    }

    #[test]
    fn random_bands_source_is_seed_deterministic() {
        let c = ExperimentConfig::from_toml(
            "experiment = \"spectra-T\"\nj_max = 10\nseed = 3\n[source]\nkind = \"random-bands\"\nmembers = 4",
        )
        .unwrap();
        let a = c.enumerator(Path::new(".")).unwrap();
        let b = c.enumerator(Path::new(".")).unwrap();
        assert_eq!(a.prefix(64), b.prefix(64));
    }
}
