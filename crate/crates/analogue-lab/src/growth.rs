//! Budget-decidable growth trees and the trial-and-error explorer.
//!
//! Nodes are binary strings; a tree is a total, downward-closed membership
//! predicate on them. The explorer walks the tree by the three rules: start
//! at the root; from a node with any descendant, append 0; from a terminal
//! node of the form `v0` or `v011...1`, move to `v1`; a terminal all-ones
//! node exhausts the right edge. Note the second rule appends 0 even when
//! only the right child exists — such a left child is terminal by downward
//! closure and the very next move backtracks to the right sibling, so the
//! walk never strays right of the leftmost infinite path. The explorer
//! converges to that path on every tree that has one, but with no computable
//! bound on how long convergence takes or how deep the excursions grow.
//!
//! The separating tree built from the machine family is the classic source
//! of trees with infinite paths but no computable ones, truncated here by a
//! dovetailing budget so membership stays total and cheap.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::resets::{HaltClass, MachineFamily};

#[derive(Debug, Error, PartialEq)]
pub enum GrowthError {
    #[error("node {0} is not in the tree")]
    NotInTree(BitString),
    #[error("explicit trees must contain the root")]
    MissingRoot,
    #[error("explicit tree is not downward closed at {0}")]
    NotDownwardClosed(BitString),
    #[error("no path to the requested depth exists within the budget")]
    NoPathWithinBudget,
    #[error("string contains a character other than 0 or 1")]
    BadBit,
}

/// A node label: a finite binary string. Lexicographic order with the
/// prefix-below convention (`Ord` on the underlying bits).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn root() -> Self {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        BitString(bits.to_vec())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn child(&self, bit: bool) -> BitString {
        let mut v = self.0.clone();
        v.push(bit);
        BitString(v)
    }

    pub fn parent(&self) -> Option<BitString> {
        if self.0.is_empty() {
            None
        } else {
            Some(BitString(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn prefix(&self, len: usize) -> BitString {
        BitString(self.0[..len.min(self.0.len())].to_vec())
    }

    pub fn starts_with(&self, other: &BitString) -> bool {
        self.0.len() >= other.0.len() && self.0[..other.0.len()] == other.0[..]
    }

    /// Whether this node lies strictly right of the given path prefix:
    /// at the first differing position within the common length, this node
    /// goes right where the path goes left.
    pub fn lies_right_of(&self, path_prefix: &BitString) -> bool {
        for (a, b) in self.0.iter().zip(path_prefix.0.iter()) {
            if a != b {
                return *a;
            }
        }
        false
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = GrowthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(GrowthError::BadBit),
            })
            .collect::<Result<Vec<bool>, _>>()
            .map(BitString)
    }
}

/// One logged separation fact: the dovetailer, at the given stage, pinned
/// the bit at `position`. Strings longer than `max(position, stage)` must
/// honour it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constraint {
    pub position: usize,
    pub stage: u64,
    pub bit: bool,
}

/// Budget-truncated separating tree over the machine family's two halting
/// classes.
#[derive(Debug, Clone)]
pub struct KleeneTree {
    constraints: Vec<Constraint>,
}

impl KleeneTree {
    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    fn contains(&self, u: &BitString) -> bool {
        self.constraints.iter().all(|c| {
            if u.len() > c.position.max(c.stage as usize) {
                u.bit(c.position) == Some(c.bit)
            } else {
                true
            }
        })
    }
}

/// An arbitrary total predicate promised by the caller to be downward
/// closed; the test suites check closure exhaustively to their depth.
#[derive(Clone)]
pub struct PredTree {
    pred: Arc<dyn Fn(&BitString) -> bool + Send + Sync>,
}

impl fmt::Debug for PredTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PredTree")
    }
}

/// An immutable growth tree: a total membership predicate on binary
/// strings, downward closed, containing the root.
#[derive(Debug, Clone)]
pub enum GrowthTree {
    /// Every string is a node.
    Full,
    /// A finite, explicitly listed node set.
    Explicit(BTreeSet<BitString>),
    /// A caller-supplied predicate.
    Pred(PredTree),
    /// The separating tree.
    Kleene(KleeneTree),
}

/// Outcome of one explorer move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Next(BitString),
    ExhaustedRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStatus {
    Running,
    ExhaustedRight,
}

/// The explorer's visit sequence, with cumulative backtrack counts.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTrace {
    steps: Vec<BitString>,
    backtracks: Vec<u64>,
    status: TraceStatus,
}

impl PathTrace {
    pub fn steps(&self) -> &[BitString] {
        &self.steps
    }

    pub fn status(&self) -> TraceStatus {
        self.status
    }

    /// Backtracks performed up to and including step `n`.
    pub fn backtracks_at(&self, n: usize) -> u64 {
        self.backtracks[n]
    }

    /// Least step index whose node equals the given path prefix.
    pub fn first_index_of(&self, prefix: &BitString) -> Option<usize> {
        self.steps.iter().position(|u| u == prefix)
    }

    /// Longest node visited.
    pub fn max_explored_len(&self) -> usize {
        self.steps.iter().map(BitString::len).max().unwrap_or(0)
    }
}

/// The step map recovered from a trace; replaying it from the root must
/// reproduce the trace exactly.
#[derive(Debug, Clone)]
pub struct GrowthFunction {
    map: std::collections::HashMap<BitString, BitString>,
}

impl GrowthFunction {
    pub fn from_trace(trace: &PathTrace) -> Self {
        let mut map = std::collections::HashMap::new();
        for w in trace.steps.windows(2) {
            map.insert(w[0].clone(), w[1].clone());
        }
        GrowthFunction { map }
    }

    pub fn apply(&self, u: &BitString) -> Option<&BitString> {
        self.map.get(u)
    }
}

/// Result of a bounded extension search below a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialSize {
    /// The longest extension found, with the search exhausted below budget.
    Exact(usize),
    /// The frontier was still alive at the depth budget.
    AtLeast(usize),
}

/// Budget-relative fertility verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FertilityVerdict {
    /// An extension reached the probe depth.
    Fertile { witness_depth: usize },
    /// Exhaustive search died out; the longest extension found.
    Sterile { max_extension: usize },
    /// The node budget ran out before either resolution.
    Unknown { budget: usize },
}

/// Agreement threshold under a depth budget: every node longer than `k`
/// agrees with the leftmost path on the first `j` symbols. `capped` is set
/// when disagreeing nodes still exist at the budget depth, so no finite
/// threshold below the budget can be certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgreementThreshold {
    pub k: usize,
    pub capped: bool,
}

impl GrowthTree {
    pub fn full() -> Self {
        GrowthTree::Full
    }

    /// A finite tree from an explicit node set; validates the root and
    /// downward closure.
    pub fn explicit<I: IntoIterator<Item = BitString>>(nodes: I) -> Result<Self, GrowthError> {
        let set: BTreeSet<BitString> = nodes.into_iter().collect();
        if !set.contains(&BitString::root()) {
            return Err(GrowthError::MissingRoot);
        }
        for node in &set {
            if let Some(p) = node.parent() {
                if !set.contains(&p) {
                    return Err(GrowthError::NotDownwardClosed(node.clone()));
                }
            }
        }
        Ok(GrowthTree::Explicit(set))
    }

    pub fn from_fn(pred: impl Fn(&BitString) -> bool + Send + Sync + 'static) -> Self {
        GrowthTree::Pred(PredTree {
            pred: Arc::new(pred),
        })
    }

    /// The separating tree over the family's accepting/rejecting halting
    /// classes, truncated at the dovetailing stage budget: a string of
    /// length `n` is in the tree iff it honours every constraint discovered
    /// by stage `min(n, budget)`.
    pub fn kleene(family: &MachineFamily, budget: u64) -> Self {
        let constraints = family
            .discoveries()
            .into_iter()
            .filter(|d| d.stage <= budget)
            .map(|d| Constraint {
                position: d.index as usize,
                stage: d.stage,
                bit: d.class == HaltClass::Accepting,
            })
            .collect();
        GrowthTree::Kleene(KleeneTree { constraints })
    }

    pub fn kleene_constraints(&self) -> Option<&[Constraint]> {
        match self {
            GrowthTree::Kleene(k) => Some(k.constraints()),
            _ => None,
        }
    }

    /// Total membership predicate.
    pub fn contains(&self, u: &BitString) -> bool {
        match self {
            GrowthTree::Full => true,
            GrowthTree::Explicit(set) => set.contains(u),
            GrowthTree::Pred(p) => (p.pred)(u),
            GrowthTree::Kleene(k) => k.contains(u),
        }
    }

    /// Terminal means no child is in the tree; by downward closure that is
    /// two membership calls.
    pub fn is_terminal(&self, u: &BitString) -> bool {
        !self.contains(&u.child(false)) && !self.contains(&u.child(true))
    }

    /// One raw explorer move, total on all strings. Returns the move and
    /// whether it was a backtrack.
    fn raw_step(&self, u: &BitString) -> (StepOutcome, bool) {
        if !self.is_terminal(u) {
            return (StepOutcome::Next(u.child(false)), false);
        }
        let mut bits = u.bits().to_vec();
        while bits.last() == Some(&true) {
            bits.pop();
        }
        if bits.pop().is_none() {
            return (StepOutcome::ExhaustedRight, true);
        }
        bits.push(true);
        (StepOutcome::Next(BitString(bits)), true)
    }

    /// One explorer move from a node of the tree.
    pub fn trial_step(&self, u: &BitString) -> Result<StepOutcome, GrowthError> {
        if !self.contains(u) {
            return Err(GrowthError::NotInTree(u.clone()));
        }
        Ok(self.raw_step(u).0)
    }

    /// Run the explorer from the root, recording at most `max_steps` nodes
    /// (the root included) or stopping when the right edge is exhausted.
    pub fn run_trial(&self, max_steps: usize) -> PathTrace {
        assert!(max_steps >= 1);
        let mut steps = vec![BitString::root()];
        let mut backtracks = vec![0u64];
        let mut status = TraceStatus::Running;
        while steps.len() < max_steps {
            let (outcome, backtracked) = self.raw_step(steps.last().expect("nonempty"));
            match outcome {
                StepOutcome::Next(next) => {
                    let count = backtracks.last().copied().unwrap_or(0) + u64::from(backtracked);
                    steps.push(next);
                    backtracks.push(count);
                }
                StepOutcome::ExhaustedRight => {
                    status = TraceStatus::ExhaustedRight;
                    break;
                }
            }
        }
        PathTrace {
            steps,
            backtracks,
            status,
        }
    }

    /// Does some extension of `u` (or `u` itself) reach `depth`, with every
    /// prefix in the tree?
    fn alive(&self, u: &BitString, depth: usize) -> bool {
        if !self.contains(u) {
            return false;
        }
        if u.len() >= depth {
            return true;
        }
        self.alive(&u.child(false), depth) || self.alive(&u.child(true), depth)
    }

    /// The lexicographically least string of length `prefix_len` all of
    /// whose prefixes are in the tree and which extends to `depth_budget`.
    /// Independent ground truth for the explorer tests.
    pub fn leftmost_path(&self, prefix_len: usize, depth_budget: usize) -> Option<BitString> {
        let depth = depth_budget.max(prefix_len);
        let mut cur = BitString::root();
        if !self.alive(&cur, depth) {
            return None;
        }
        for _ in 0..prefix_len {
            let left = cur.child(false);
            if self.alive(&left, depth) {
                cur = left;
                continue;
            }
            let right = cur.child(true);
            if self.alive(&right, depth) {
                cur = right;
                continue;
            }
            return None;
        }
        Some(cur)
    }

    /// Maximum length of nodes extending `v`, searched exhaustively to
    /// `depth_budget`; `AtLeast` when the frontier is still alive there.
    pub fn potential_size(
        &self,
        v: &BitString,
        depth_budget: usize,
    ) -> Result<PotentialSize, GrowthError> {
        if !self.contains(v) {
            return Err(GrowthError::NotInTree(v.clone()));
        }
        let mut max_len = v.len();
        let mut stack = vec![v.clone()];
        while let Some(u) = stack.pop() {
            if u.len() >= depth_budget {
                return Ok(PotentialSize::AtLeast(depth_budget));
            }
            for bit in [false, true] {
                let c = u.child(bit);
                if self.contains(&c) {
                    max_len = max_len.max(c.len());
                    stack.push(c);
                }
            }
        }
        Ok(PotentialSize::Exact(max_len))
    }

    /// Budget-relative fertility probe: fertile when some extension reaches
    /// `probe_depth`, sterile when the exhaustive search dies out first,
    /// unknown when `node_budget` expires.
    pub fn fertility(
        &self,
        v: &BitString,
        probe_depth: usize,
        node_budget: usize,
    ) -> Result<FertilityVerdict, GrowthError> {
        if !self.contains(v) {
            return Err(GrowthError::NotInTree(v.clone()));
        }
        let mut visited = 0usize;
        let mut max_len = v.len();
        let mut stack = vec![v.clone()];
        while let Some(u) = stack.pop() {
            visited += 1;
            if visited > node_budget {
                return Ok(FertilityVerdict::Unknown {
                    budget: node_budget,
                });
            }
            if u.len() >= probe_depth {
                return Ok(FertilityVerdict::Fertile {
                    witness_depth: probe_depth,
                });
            }
            for bit in [false, true] {
                let c = u.child(bit);
                if self.contains(&c) {
                    max_len = max_len.max(c.len());
                    stack.push(c);
                }
            }
        }
        Ok(FertilityVerdict::Sterile {
            max_extension: max_len,
        })
    }

    /// Least `k` such that, up to the depth budget, every tree node longer
    /// than `k` agrees with the leftmost path on its first `j` symbols.
    pub fn agreement_threshold(
        &self,
        j: usize,
        depth_budget: usize,
    ) -> Result<AgreementThreshold, GrowthError> {
        let lambda = self
            .leftmost_path(j, depth_budget)
            .ok_or(GrowthError::NoPathWithinBudget)?;
        let mut k = 0usize;
        let mut capped = false;
        // Once a node disagrees on the first j symbols, so does every
        // extension, so only the depth of disagreeing subtrees matters.
        let mut stack = vec![BitString::root()];
        while let Some(u) = stack.pop() {
            let disagrees = u
                .bits()
                .iter()
                .zip(lambda.bits())
                .any(|(a, b)| a != b);
            if disagrees {
                k = k.max(u.len());
                if u.len() >= depth_budget {
                    capped = true;
                    continue;
                }
            }
            if u.len() >= depth_budget {
                continue;
            }
            for bit in [false, true] {
                let c = u.child(bit);
                if self.contains(&c) {
                    stack.push(c);
                }
            }
        }
        Ok(AgreementThreshold { k, capped })
    }
}
