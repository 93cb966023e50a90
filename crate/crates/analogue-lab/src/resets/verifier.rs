//! A total stand-in for a Diophantine membership polynomial.
//!
//! `evaluate(j, m)` is zero exactly at witness tuples for `j`, and the zeros
//! depend only on the first coordinate: it must equal the member's witness
//! code, which we fix to be the member's waiting time. Off-witness values
//! are `1 + |m1 - code|`, so tuples whose first coordinate differs by one
//! from a witness are never zeros, and no tuple with every coordinate below
//! the witness code can be a zero. A real membership polynomial would be
//! astronomically large; the devices only ever use this interface.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use super::schedule::Schedule;
use super::{WaitingTime, WaitingTimeTable};

#[derive(Debug, Error, PartialEq)]
pub enum VerifierError {
    #[error("arity mismatch: verifier takes {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("arity must be at least 1")]
    ZeroArity,
}

/// Evaluation counter striped across cache lines: the verifier sits in the
/// innermost loop of every sweep, and a single shared atomic would bounce
/// between cores.
#[derive(Debug, Default)]
struct CallCounter {
    shards: [CounterShard; 8],
}

#[derive(Debug, Default)]
#[repr(align(64))]
struct CounterShard(AtomicU64);

impl CallCounter {
    fn bump(&self) {
        #[cfg(feature = "parallel")]
        let idx = rayon::current_thread_index().unwrap_or(0) & 7;
        #[cfg(not(feature = "parallel"))]
        let idx = 0;
        self.shards[idx].0.fetch_add(1, Ordering::Relaxed);
    }

    fn total(&self) -> u64 {
        self.shards
            .iter()
            .map(|s| s.0.load(Ordering::Relaxed))
            .sum()
    }
}

#[derive(Debug)]
pub struct DiophantineVerifier {
    arity: usize,
    witness_code: BTreeMap<u64, u64>,
    calls: CallCounter,
}

impl DiophantineVerifier {
    pub fn new(arity: usize, witness_code: BTreeMap<u64, u64>) -> Result<Self, VerifierError> {
        if arity == 0 {
            return Err(VerifierError::ZeroArity);
        }
        Ok(DiophantineVerifier {
            arity,
            witness_code,
            calls: CallCounter::default(),
        })
    }

    /// Witness codes straight from a scripted enumeration: member `j` has
    /// the single witness first-coordinate `nu(j)`.
    pub fn from_schedule(schedule: &Schedule, arity: usize) -> Result<Self, VerifierError> {
        let codes = schedule
            .entries()
            .map(|e| (e.member, e.waiting_time))
            .collect();
        DiophantineVerifier::new(arity, codes)
    }

    /// Witness codes from a budget-bounded waiting-time table.
    pub fn from_table(table: &WaitingTimeTable, arity: usize) -> Result<Self, VerifierError> {
        DiophantineVerifier::new(arity, table.entries().collect())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of evaluations performed so far (shared across threads).
    pub fn calls(&self) -> u64 {
        self.calls.total()
    }

    /// Total evaluation: zero iff `m` is a witness tuple for `j`.
    pub fn evaluate(&self, j: u64, m: &[u64]) -> Result<u64, VerifierError> {
        if m.len() != self.arity {
            return Err(VerifierError::ArityMismatch {
                expected: self.arity,
                got: m.len(),
            });
        }
        self.calls.bump();
        Ok(match self.witness_code.get(&j) {
            Some(&code) if m[0] == code => 0,
            Some(&code) => 1 + code.abs_diff(m[0]),
            None => 1,
        })
    }

    /// Least `n <= budget` such that some witness tuple for `j` has every
    /// coordinate strictly below `n`. Scans max-norm shells in increasing
    /// order, so the returned bound is minimal.
    pub fn witness_bound(&self, j: u64, budget: u64) -> WaitingTime {
        for shell in 0..budget {
            if self.shell_has_zero(j, shell) {
                return WaitingTime::Found(shell + 1);
            }
        }
        WaitingTime::ExhaustedAtBudget
    }

    /// Any zero among tuples whose maximum coordinate equals `shell`.
    fn shell_has_zero(&self, j: u64, shell: u64) -> bool {
        let mut tuple = vec![0u64; self.arity];
        self.shell_scan(j, shell, 0, false, &mut tuple)
    }

    fn shell_scan(&self, j: u64, shell: u64, pos: usize, pinned: bool, tuple: &mut Vec<u64>) -> bool {
        if pos == self.arity {
            if !pinned {
                return false;
            }
            return self.evaluate(j, tuple).expect("arity fixed internally") == 0;
        }
        let remaining_can_pin = pos + 1 < self.arity;
        for v in 0..=shell {
            tuple[pos] = v;
            let now_pinned = pinned || v == shell;
            if !now_pinned && !remaining_can_pin {
                continue;
            }
            if self.shell_scan(j, shell, pos + 1, now_pinned, tuple) {
                return true;
            }
        }
        false
    }
}
