//! A finite-precision simulation laboratory for analogue computation.
//!
//! Every physical quantity a machine manipulates has an upper bound `x` on
//! its magnitude and a lower bound `eps` on the accuracy with which it can be
//! set or read; the dimensionless quotient `x / eps` is the quantity's
//! *precision ratio*. This crate builds several model "analogue devices" that
//! try to answer membership questions `j in A?` for a recursively enumerable
//! set `A`, and instruments them so that experiments expose the precision
//! ratio each device needs before its answers become correct:
//!
//! * [`resets`] — the ground truth: register machines, repetition-free
//!   enumerations of `A`, waiting times, and a Diophantine-style witness
//!   verifier.
//! * [`precision`] — bounded, quantized continuously-variable quantities and
//!   their precision ratios.
//! * [`blip`] — a smooth signal whose derivative encodes membership in
//!   narrow bumps, plus a simulated differentiator whose verdicts depend on
//!   time and amplitude resolution.
//! * [`richardson`] — an elementary-function barrier built over the witness
//!   verifier, a one-parameter curve decoder, and the cutoff detection
//!   integral whose truncation limit leaks a waiting-time bound.
//! * [`spectra`] — diagonal operator models whose spectra carry membership
//!   as line-versus-band features, measured at finite resolution.
//! * [`growth`] — budget-decidable binary trees, a trial-and-error explorer
//!   converging to the leftmost infinite path, and a separating tree with no
//!   computable path.
//! * [`harness`] — the experiment registry, config loading, deterministic
//!   sweep execution, and CSV/JSON reporting behind the `analogue-lab` CLI.
//!
//! Heavy inner loops run through [`exec`], which parallelises with rayon when
//! the `parallel` feature (default) is enabled and falls back to plain
//! sequential iteration otherwise. Reductions always happen in index order,
//! so outputs are byte-identical across thread counts and feature choices.

pub mod blip;
pub mod exec;
pub mod growth;
pub mod harness;
pub mod precision;
pub mod quad;
pub mod resets;
pub mod richardson;
pub mod spectra;

/// Verdict a device gives to a membership question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
}

impl Answer {
    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
        }
    }

    /// Whether this answer is the right one given ground-truth membership.
    pub fn correct_for(self, in_set: bool) -> bool {
        matches!(self, Answer::Yes) == in_set
    }
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
