//! Spectral membership devices: lines versus bands at finite resolution.
//!
//! Two diagonal operator models. The line-band operator places an eigenvalue
//! at `lambda_j = 5 - 4 * 2^-j` for every question `j`; when the waiting
//! time of `j` is known within the truncation budget, the line is replaced
//! by a discretized band of width `2 * 2^-nu(j)`. The compact operator has
//! one eigenvalue `2^-a(n)` per enumeration index. Measurement sorts the
//! eigenvalues, merges anything closer than the resolution, and classifies
//! each merged cluster as a line or a band by its extent. Operators are
//! plain eigenvalue lists: the membership story lives entirely in the
//! spectrum, so matrix mechanics would add nothing testable.

use thiserror::Error;

use crate::resets::{Enumerator, WaitingTime, WaitingTimeTable};
use crate::Answer;

#[derive(Debug, Error, PartialEq)]
pub enum SpectraError {
    #[error("band discretization needs at least 2 points, got {0}")]
    BadBandPoints(usize),
    #[error("rows_needed requires a synthetic schedule as ground truth")]
    RequiresSyntheticGroundTruth,
    #[error("no truncation depth up to {cap} classifies every question correctly")]
    NoDepthWithinCap { cap: u64 },
    #[error(transparent)]
    Enumerate(#[from] crate::resets::EnumerateError),
}

/// Which spectral device a reading belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// Line-or-band operator (`T`): membership widens a line into a band.
    LineBand,
    /// Compact operator (`S`): membership adds a line at `2^-j`.
    CompactLines,
}

impl OperatorKind {
    pub fn csv_tag(self) -> &'static str {
        match self {
            OperatorKind::LineBand => "T",
            OperatorKind::CompactLines => "S",
        }
    }
}

/// A detected spectral feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralFeature {
    Line { position: f64 },
    Band { center: f64, width: f64 },
}

impl SpectralFeature {
    fn interval(&self) -> (f64, f64) {
        match *self {
            SpectralFeature::Line { position } => (position, position),
            SpectralFeature::Band { center, width } => (center - width / 2.0, center + width / 2.0),
        }
    }

    pub fn csv_tag(&self) -> &'static str {
        match self {
            SpectralFeature::Line { .. } => "line",
            SpectralFeature::Band { .. } => "band",
        }
    }
}

/// Diagonal operator model: the eigenvalue list plus how many rows of
/// enumeration data went into it.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorApprox {
    eigenvalues: Vec<f64>,
    rows_used: u64,
}

/// The line position for question `j`.
pub fn line_position(j: u32) -> f64 {
    5.0 - 4.0 * (-f64::from(j)).exp2()
}

/// Build the line-band operator for questions `j < j_max` from a
/// budget-bounded waiting-time table. Bands are discretized as
/// `band_points` equally spaced eigenvalues spanning the band.
pub fn line_band_operator(
    table: &WaitingTimeTable,
    j_max: u32,
    band_points: usize,
) -> Result<OperatorApprox, SpectraError> {
    if band_points < 2 {
        return Err(SpectraError::BadBandPoints(band_points));
    }
    let mut eigenvalues = Vec::new();
    for j in 0..j_max {
        let center = line_position(j);
        match table.waiting_time(u64::from(j)) {
            WaitingTime::Found(nu) => {
                let width = 2.0 * (-(nu as f64)).exp2();
                let lo = center - width / 2.0;
                let step = width / (band_points - 1) as f64;
                for i in 0..band_points {
                    eigenvalues.push(lo + step * i as f64);
                }
            }
            WaitingTime::ExhaustedAtBudget => eigenvalues.push(center),
        }
    }
    Ok(OperatorApprox {
        eigenvalues,
        rows_used: table.budget(),
    })
}

/// Build the compact operator from the first `n` enumeration values:
/// eigenvalues `2^-a(0) .. 2^-a(n-1)`, distinct by injectivity.
pub fn compact_operator(enumerator: &Enumerator, n: u64) -> Result<OperatorApprox, SpectraError> {
    let mut eigenvalues = Vec::new();
    for i in 0..n {
        let a = enumerator.value_at(i)?;
        eigenvalues.push((-(a as f64)).exp2());
    }
    Ok(OperatorApprox {
        eigenvalues,
        rows_used: n,
    })
}

/// Compact-operator eigenvalues from whatever prefix exists, for truncation
/// sweeps where running past the script is expected.
pub fn compact_operator_truncated(enumerator: &Enumerator, n: u64) -> OperatorApprox {
    let eigenvalues = enumerator
        .prefix(n)
        .into_iter()
        .map(|a| (-(a as f64)).exp2())
        .collect();
    OperatorApprox {
        eigenvalues,
        rows_used: n,
    }
}

/// A finite-resolution spectrum measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReading {
    resolution: f64,
    detected: Vec<SpectralFeature>,
}

impl OperatorApprox {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn rows_used(&self) -> u64 {
        self.rows_used
    }

    /// Measure at resolution `epsilon`: sort the eigenvalues, merge
    /// neighbours closer than `epsilon` into clusters, and call a cluster a
    /// band when its extent reaches `2 * epsilon`.
    pub fn measure(&self, epsilon: f64) -> SpectrumReading {
        assert!(epsilon > 0.0, "resolution must be positive");
        let mut sorted = self.eigenvalues.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        let mut detected = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let first = sorted[i];
            let mut last = first;
            let mut k = i + 1;
            while k < sorted.len() && sorted[k] - last < epsilon {
                last = sorted[k];
                k += 1;
            }
            let extent = last - first;
            if extent >= 2.0 * epsilon {
                detected.push(SpectralFeature::Band {
                    center: 0.5 * (first + last),
                    width: extent,
                });
            } else {
                detected.push(SpectralFeature::Line {
                    position: 0.5 * (first + last),
                });
            }
            i = k;
        }
        SpectrumReading {
            resolution: epsilon,
            detected,
        }
    }
}

impl SpectrumReading {
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn features(&self) -> &[SpectralFeature] {
        &self.detected
    }

    /// The feature within the resolution of `target`, nearest first.
    pub fn feature_near(&self, target: f64) -> Option<&SpectralFeature> {
        self.detected
            .iter()
            .map(|f| {
                let (lo, hi) = f.interval();
                let d = if target < lo {
                    lo - target
                } else if target > hi {
                    target - hi
                } else {
                    0.0
                };
                (f, d)
            })
            .filter(|(_, d)| *d < self.resolution)
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("distances are finite"))
            .map(|(f, _)| f)
    }
}

/// Answer `j in A?` from a spectrum reading. Line-band mode: yes iff the
/// feature at `lambda_j` is a band. Compact mode: yes iff a line sits
/// within the resolution of `2^-j`.
pub fn classify(reading: &SpectrumReading, j: u32, kind: OperatorKind) -> Answer {
    match kind {
        OperatorKind::LineBand => match reading.feature_near(line_position(j)) {
            Some(SpectralFeature::Band { .. }) => Answer::Yes,
            _ => Answer::No,
        },
        OperatorKind::CompactLines => {
            let target = (-f64::from(j)).exp2();
            match reading.feature_near(target) {
                Some(SpectralFeature::Line { position }) => {
                    if (position - target).abs() < reading.resolution {
                        Answer::Yes
                    } else {
                        Answer::No
                    }
                }
                _ => Answer::No,
            }
        }
    }
}

/// Smallest truncation depth that classifies every question `j < j_max`
/// correctly against the scripted ground truth, for both operator models.
/// On synthetic schedules this equals `beta(j_max) + 1` whenever any member
/// exists below `j_max`, and 0 otherwise.
pub fn rows_needed(
    enumerator: &Enumerator,
    j_max: u32,
    cap: u64,
    band_points: usize,
) -> Result<u64, SpectraError> {
    let schedule = enumerator
        .schedule()
        .ok_or(SpectraError::RequiresSyntheticGroundTruth)?;
    'depth: for n in 0..=cap {
        let table = WaitingTimeTable::build(enumerator, n);
        let line_band = line_band_operator(&table, j_max, band_points)?;
        let compact = compact_operator_truncated(enumerator, n);
        for j in 0..j_max {
            let truth = schedule.contains_member(u64::from(j));
            let eps_t = match table.waiting_time(u64::from(j)) {
                WaitingTime::Found(nu) => (-(nu as f64)).exp2(),
                // A fine default: band absent, any resolution says line.
                WaitingTime::ExhaustedAtBudget => (-(f64::from(j_max) + 8.0)).exp2(),
            };
            let t_answer = classify(&line_band.measure(eps_t), j, OperatorKind::LineBand);
            let eps_s = (-f64::from(j + 1)).exp2();
            let s_answer = classify(&compact.measure(eps_s), j, OperatorKind::CompactLines);
            if !(t_answer.correct_for(truth) && s_answer.correct_for(truth)) {
                continue 'depth;
            }
        }
        return Ok(n);
    }
    Err(SpectraError::NoDepthWithinCap { cap })
}
