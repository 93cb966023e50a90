//! Scripted enumerations: the synthetic form of the r.e. set.
//!
//! A schedule is a list of `(j, nu)` pairs promising that member `j` appears
//! at enumeration index `nu`. Positions not named by the script are padded
//! with distinct filler values well above every scheduled member, so the
//! enumeration stays repetition-free and total up to the scripted length
//! while never colliding with the small naturals the experiments ask about.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Fillers start at least this high, keeping `2^-filler` and `4^-filler`
/// representable while staying clear of every membership question at desk
/// scale.
const MIN_FILLER_BASE: u64 = 64;

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("member {0} is scheduled twice")]
    DuplicateMember(u64),
    #[error("enumeration index {0} is scheduled twice")]
    DuplicateIndex(u64),
}

/// One scripted appearance: member `member` is enumerated at index
/// `waiting_time`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub member: u64,
    pub waiting_time: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    by_index: BTreeMap<u64, u64>,
    by_member: BTreeMap<u64, u64>,
    filler_base: u64,
    length: u64,
}

impl Schedule {
    pub fn new(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self, ScheduleError> {
        let mut by_index = BTreeMap::new();
        let mut by_member = BTreeMap::new();
        for (member, waiting_time) in pairs {
            if by_member.insert(member, waiting_time).is_some() {
                return Err(ScheduleError::DuplicateMember(member));
            }
            if by_index.insert(waiting_time, member).is_some() {
                return Err(ScheduleError::DuplicateIndex(waiting_time));
            }
        }
        let length = by_index.keys().next_back().map_or(0, |n| n + 1);
        let max_member = by_member.keys().next_back().copied().unwrap_or(0);
        let filler_base = MIN_FILLER_BASE.max(max_member + 1);
        Ok(Schedule {
            by_index,
            by_member,
            filler_base,
            length,
        })
    }

    /// Parse the text form: one `j nu` pair per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self, ScheduleError> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut it = body.split_whitespace();
            let err = |message: String| ScheduleError::Parse {
                line: lineno + 1,
                message,
            };
            let j = it
                .next()
                .and_then(|t| t.parse::<u64>().ok())
                .ok_or_else(|| err("expected a natural number member".into()))?;
            let nu = it
                .next()
                .and_then(|t| t.parse::<u64>().ok())
                .ok_or_else(|| err("expected a natural number waiting time".into()))?;
            if it.next().is_some() {
                return Err(err("trailing tokens after `j nu`".into()));
            }
            pairs.push((j, nu));
        }
        Schedule::new(pairs)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (member, nu) in &self.by_member {
            out.push_str(&format!("{member} {nu}\n"));
        }
        out
    }

    /// Scripted length: one past the largest scheduled index.
    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn entries(&self) -> impl Iterator<Item = ScheduleEntry> + '_ {
        self.by_member.iter().map(|(&member, &waiting_time)| ScheduleEntry {
            member,
            waiting_time,
        })
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.by_member.keys().copied()
    }

    pub fn contains_member(&self, j: u64) -> bool {
        self.by_member.contains_key(&j)
    }

    pub fn waiting_time_of(&self, j: u64) -> Option<u64> {
        self.by_member.get(&j).copied()
    }

    /// The enumeration value at index `n`: the scheduled member, or a filler
    /// above every scheduled member. `None` past the scripted length.
    pub fn value_at(&self, n: u64) -> Option<u64> {
        if n >= self.length {
            return None;
        }
        Some(
            self.by_index
                .get(&n)
                .copied()
                .unwrap_or(self.filler_base + n),
        )
    }

    /// Largest scheduled waiting time among members below `j_upper`, zero
    /// when there are none.
    pub fn max_waiting_below(&self, j_upper: u64) -> u64 {
        self.by_member
            .range(..j_upper)
            .map(|(_, &nu)| nu)
            .max()
            .unwrap_or(0)
    }

    /// Deterministic random schedule for spectral-band experiments:
    /// `member_count` distinct members below `j_max`, each with waiting time
    /// at least `j + 2` so a band of width `2^{1-nu(j)}` stays inside the
    /// spectral gap around its line.
    pub fn random_for_bands(seed: u64, j_max: u32, member_count: usize) -> Schedule {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut members: Vec<u64> = (0..j_max as u64).collect();
        members.shuffle(&mut rng);
        members.truncate(member_count.min(j_max as usize));
        members.sort_unstable();
        let mut used = std::collections::BTreeSet::new();
        let mut pairs = Vec::new();
        for j in members {
            let mut nu = j + 2 + rng.gen_range(0..6);
            while !used.insert(nu) {
                nu += 1;
            }
            pairs.push((j, nu));
        }
        Schedule::new(pairs).expect("members and indices are distinct by construction")
    }
}
