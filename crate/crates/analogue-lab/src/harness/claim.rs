//! Per-question threshold analysis over a completed precision sweep.
//!
//! For every question the sweep must show a precision threshold: answers
//! are correct at every tested precision at or above it. Members carry
//! their waiting time next to the threshold so the dependence is visible
//! in the summary; a question that is still wrong at the top of the sweep
//! marks the whole verdict inconsistent.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClaimError {
    #[error("incomplete sweep: {0}")]
    IncompleteSweep(String),
}

/// One sweep cell as seen by the claim analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaimCell {
    pub j: u32,
    pub in_set: bool,
    pub waiting_time: Option<u64>,
    /// Position on the precision axis, increasing with precision.
    pub log2_precision: f64,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionThreshold {
    pub j: u32,
    pub in_set: bool,
    pub waiting_time: Option<u64>,
    /// Least tested precision from which on every answer is correct.
    pub threshold_log2: Option<f64>,
    /// Whether some tested precision below the threshold answered wrongly.
    pub flip: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimVerdict {
    pub questions: Vec<QuestionThreshold>,
    /// True when non-members were answered correctly at every tested
    /// precision (some devices also need precision to keep saying no).
    pub non_members_all_correct: bool,
    /// Every question ends correct at the top of its sweep.
    pub consistent: bool,
}

impl ClaimVerdict {
    pub fn members(&self) -> impl Iterator<Item = &QuestionThreshold> {
        self.questions.iter().filter(|q| q.in_set)
    }

    pub fn member_threshold(&self, j: u32) -> Option<f64> {
        self.questions
            .iter()
            .find(|q| q.j == j && q.in_set)
            .and_then(|q| q.threshold_log2)
    }
}

/// Analyze a full sweep. Errors when the grid is empty, has duplicate
/// cells, or is not a full product grid (same cell count per question).
pub fn verify_claim(cells: &[ClaimCell]) -> Result<ClaimVerdict, ClaimError> {
    if cells.is_empty() {
        return Err(ClaimError::IncompleteSweep("no cells".into()));
    }
    let mut by_j: std::collections::BTreeMap<u32, Vec<&ClaimCell>> = Default::default();
    for c in cells {
        by_j.entry(c.j).or_default().push(c);
    }
    let mut reference_len: Option<usize> = None;
    let mut questions = Vec::new();
    let mut non_members_all_correct = true;
    let mut consistent = true;

    for (j, mut row) in by_j {
        row.sort_by(|a, b| {
            a.log2_precision
                .partial_cmp(&b.log2_precision)
                .expect("precision axis is finite")
        });
        let grid: Vec<f64> = row.iter().map(|c| c.log2_precision).collect();
        if grid.windows(2).any(|w| w[0] == w[1]) {
            return Err(ClaimError::IncompleteSweep(format!(
                "duplicate precision cell for j = {j}"
            )));
        }
        // Grids may sit at different absolute precisions per question (the
        // sweeps are often relative octaves) but the sweep must be a full
        // product grid.
        match reference_len {
            None => reference_len = Some(grid.len()),
            Some(len) => {
                if len != grid.len() {
                    return Err(ClaimError::IncompleteSweep(format!(
                        "j = {j} has {} precision cells, expected {len}",
                        grid.len()
                    )));
                }
            }
        }

        // Longest run of correct answers at the top of the sweep.
        let mut threshold = None;
        for c in row.iter().rev() {
            if c.correct {
                threshold = Some(c.log2_precision);
            } else {
                break;
            }
        }
        let flip = row.iter().any(|c| !c.correct);
        if threshold.is_none() {
            consistent = false;
        }
        if !row[0].in_set && flip {
            non_members_all_correct = false;
        }
        questions.push(QuestionThreshold {
            j,
            in_set: row[0].in_set,
            waiting_time: row[0].waiting_time,
            threshold_log2: threshold,
            flip,
        });
    }

    Ok(ClaimVerdict {
        questions,
        non_members_all_correct,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(j: u32, in_set: bool, nu: Option<u64>, p: f64, correct: bool) -> ClaimCell {
        ClaimCell {
            j,
            in_set,
            waiting_time: nu,
            log2_precision: p,
            correct,
        }
    }

    #[test]
    fn finds_thresholds_and_flips() {
        let cells = vec![
            cell(1, true, Some(0), 2.0, false),
            cell(1, true, Some(0), 3.0, true),
            cell(1, true, Some(0), 4.0, true),
            cell(2, false, None, 2.0, true),
            cell(2, false, None, 3.0, true),
            cell(2, false, None, 4.0, true),
        ];
        let v = verify_claim(&cells).unwrap();
        assert!(v.consistent);
        assert!(v.non_members_all_correct);
        assert_eq!(v.members().count(), 1);
        assert_eq!(v.member_threshold(1), Some(3.0));
        assert!(v.questions[0].flip);
        assert_eq!(v.questions[1].threshold_log2, Some(2.0));
        assert!(!v.questions[1].flip);
    }

    #[test]
    fn member_wrong_at_top_is_inconsistent() {
        let cells = vec![
            cell(1, true, Some(9), 2.0, false),
            cell(1, true, Some(9), 3.0, false),
        ];
        let v = verify_claim(&cells).unwrap();
        assert!(!v.consistent);
        assert_eq!(v.member_threshold(1), None);
    }

    #[test]
    fn non_member_errors_below_a_threshold_stay_consistent() {
        let cells = vec![
            cell(4, false, None, 2.0, false),
            cell(4, false, None, 3.0, true),
        ];
        let v = verify_claim(&cells).unwrap();
        assert!(!v.non_members_all_correct);
        assert!(v.consistent, "correct from the top is still a threshold");
        assert_eq!(v.questions[0].threshold_log2, Some(3.0));
    }

    #[test]
    fn rejects_empty_and_ragged_sweeps() {
        assert!(verify_claim(&[]).is_err());
        let cells = vec![
            cell(1, true, Some(0), 2.0, true),
            cell(1, true, Some(0), 3.0, true),
            cell(2, false, None, 3.0, true),
        ];
        assert!(matches!(
            verify_claim(&cells),
            Err(ClaimError::IncompleteSweep(_))
        ));
        let cells = vec![
            cell(1, true, Some(0), 2.0, true),
            cell(1, true, Some(0), 2.0, true),
        ];
        assert!(verify_claim(&cells).is_err());
    }

    #[test]
    fn accepts_relative_grids_of_equal_dimension() {
        let cells = vec![
            cell(1, true, Some(0), 2.0, false),
            cell(1, true, Some(0), 3.0, true),
            cell(2, false, None, 3.0, true),
            cell(2, false, None, 4.0, true),
        ];
        let v = verify_claim(&cells).unwrap();
        assert!(v.consistent);
    }
}
