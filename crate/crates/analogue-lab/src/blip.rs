//! A computable signal whose derivative encodes membership.
//!
//! For each enumeration index `n` emitting member `a`, the signal carries a
//! smooth blip of height `4^-a` centred on `2^-a` with half-width
//! `2^-(n+a+2)`; distinct blips never overlap. The signal itself is the sum
//! of the blips' running integrals — a staircase of smoothed steps with
//! uniform norm below 2 — so reading the *derivative* at `2^-j` answers
//! `j in A?`: it is `4^-j` for members and `0` otherwise. The simulated
//! differentiator samples the signal at quantized times and quantizes its
//! output amplitude, which is exactly where finite precision ratios bite.

use thiserror::Error;

use crate::precision::Cvq;
use crate::quad::{adaptive_simpson, kahan_sum, QuadError};
use crate::resets::Enumerator;
use crate::Answer;

/// The unit bump: `exp(-x^2 / (1 - x^2))` inside `(-1, 1)`, zero outside.
/// Infinitely smooth, even, with maximum 1 at the origin.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    let x2 = x * x;
    (-x2 / (1.0 - x2)).exp()
}

/// `\int_{-1}^{1} bump`, computed once at first use.
pub fn bump_integral() -> f64 {
    use std::sync::OnceLock;
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        2.0 * adaptive_simpson(&bump, 0.0, 1.0, 5e-14).expect("bump is smooth on [0, 1]")
    })
}

#[derive(Debug, Error, PartialEq)]
pub enum BlipError {
    #[error("member {0} was not enumerated within the signal's budget")]
    NotInSetWithinBudget(u64),
    #[error("finite-difference step {fd_step} must be at least the time resolution {resolution}")]
    StepBelowResolution { fd_step: f64, resolution: f64 },
    #[error("detection threshold factor {0} must lie in (0, 1)")]
    BadThreshold(f64),
}

/// Geometry of one blip: enumeration index `n`, emitted member `a`, and the
/// derived centre `2^-a`, height `4^-a`, half-width `2^-(n+a+2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlipSpec {
    index: usize,
    member: u64,
    center: f64,
    height: f64,
    half_width: f64,
}

impl BlipSpec {
    pub fn new(index: usize, member: u64) -> Self {
        let a = member as f64;
        let n = index as f64;
        BlipSpec {
            index,
            member,
            center: (-a).exp2(),
            height: (-2.0 * a).exp2(),
            half_width: (-(n + a + 2.0)).exp2(),
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn member(&self) -> u64 {
        self.member
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    /// The blip value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        if self.half_width == 0.0 {
            return 0.0;
        }
        self.height * bump((x - self.center) / self.half_width)
    }

    /// Final value of the smoothed step: `height * half_width * I_bump`,
    /// strictly between 0 and `2^-index`.
    pub fn full_integral(&self) -> f64 {
        self.height * self.half_width * bump_integral()
    }

    /// The smoothed step `\int_0^x` of the blip, certified to absolute
    /// tolerance `tol`. Exact (no quadrature) outside the support.
    pub fn integral_to(&self, x: f64, tol: f64) -> Result<f64, QuadError> {
        let (lo, hi) = self.support();
        if x <= lo || self.half_width == 0.0 {
            return Ok(0.0);
        }
        if x >= hi {
            return Ok(self.full_integral());
        }
        let scale = self.height * self.half_width;
        if scale == 0.0 {
            return Ok(0.0);
        }
        let u = (x - self.center) / self.half_width;
        Ok(scale * adaptive_simpson(&bump, -1.0, u, tol / scale)?)
    }

    /// `\int psi` over `[lo, hi] ∩ support`. Full coverage short-circuits to
    /// the cached exact value, so windows that straddle a whole blip cost
    /// nothing and windows that miss it entirely are exactly zero.
    pub fn mass_between(&self, lo: f64, hi: f64, tol: f64) -> Result<f64, QuadError> {
        let (s_lo, s_hi) = self.support();
        if hi <= s_lo || lo >= s_hi || lo >= hi || self.half_width == 0.0 {
            return Ok(0.0);
        }
        if lo <= s_lo && hi >= s_hi {
            return Ok(self.full_integral());
        }
        let scale = self.height * self.half_width;
        if scale == 0.0 {
            return Ok(0.0);
        }
        let a = ((lo - self.center) / self.half_width).max(-1.0);
        let b = ((hi - self.center) / self.half_width).min(1.0);
        Ok(scale * adaptive_simpson(&bump, a, b, tol / scale)?)
    }
}

/// A signal value together with the certified bound on everything the
/// truncated sum leaves out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// Partial-sum signal over an enumeration prefix. Plain data; evaluation is
/// pure, so signals may be shared across parallel sweeps freely.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    blips: Vec<BlipSpec>,
    skip: Option<usize>,
}

impl Signal {
    /// Build from the first `terms` enumeration values, truncating early if
    /// the enumeration is exhausted.
    pub fn from_enumerator(enumerator: &Enumerator, terms: u64) -> Self {
        let mut blips = Vec::new();
        for n in 0..terms {
            match enumerator.value_at(n) {
                Ok(a) => blips.push(BlipSpec::new(n as usize, a)),
                Err(_) => break,
            }
        }
        Signal { blips, skip: None }
    }

    pub fn blips(&self) -> &[BlipSpec] {
        &self.blips
    }

    pub fn terms(&self) -> usize {
        self.blips.len()
    }

    fn live(&self) -> impl Iterator<Item = &BlipSpec> {
        let skip = self.skip;
        self.blips
            .iter()
            .enumerate()
            .filter(move |(i, _)| Some(*i) != skip)
            .map(|(_, b)| b)
    }

    /// Tail bound `2^(1-N)` for the truncation at `N` terms.
    pub fn tail_bound(&self) -> f64 {
        (1.0 - self.blips.len() as f64).exp2()
    }

    /// The signal value at `x`: the sum of all live smoothed steps, each
    /// certified to `tol / N` so the total quadrature error stays below
    /// `tol`.
    pub fn value_at(&self, x: f64, tol: f64) -> Result<SignalValue, QuadError> {
        let n = self.blips.len().max(1);
        let per_term = tol / n as f64;
        let mut terms = Vec::with_capacity(n);
        for b in self.live() {
            terms.push(b.integral_to(x, per_term)?);
        }
        Ok(SignalValue {
            value: kahan_sum(terms),
            tail_bound: self.tail_bound(),
        })
    }

    /// The exact derivative at `x`. Supports are pairwise disjoint, so at
    /// most one blip contributes.
    pub fn derivative_exact(&self, x: f64) -> f64 {
        self.live().map(|b| b.eval(x)).sum()
    }

    /// `f(hi) - f(lo)` computed as a single mass integral, avoiding the
    /// cancellation of differencing two large partial sums. Blips fully
    /// inside the window contribute their exact step value; blips outside
    /// contribute exactly zero.
    pub fn mass_between(&self, lo: f64, hi: f64, tol: f64) -> Result<f64, QuadError> {
        let n = self.blips.len().max(1);
        let per_term = tol / n as f64;
        let mut terms = Vec::with_capacity(n);
        for b in self.live() {
            terms.push(b.mass_between(lo, hi, per_term)?);
        }
        Ok(kahan_sum(terms))
    }

    /// The perturbed signal: the step belonging to member `j` is deleted, so
    /// the derivative at `2^-j` becomes exactly zero while the signal moves
    /// by at most that step's final value.
    pub fn without_member(&self, j: u64) -> Result<Signal, BlipError> {
        let idx = self
            .blips
            .iter()
            .position(|b| b.member == j && Some(b.index) != self.skip)
            .ok_or(BlipError::NotInSetWithinBudget(j))?;
        Ok(Signal {
            blips: self.blips.clone(),
            skip: Some(idx),
        })
    }

    /// Index of the deleted term, if any.
    pub fn skipped_term(&self) -> Option<usize> {
        self.skip
    }
}

/// A simulated analogue differentiator. Observation instants and the
/// finite-difference stencil are quantized by the time quantity; the slope
/// reading is quantized by the amplitude quantity. The verdict compares the
/// reading against `threshold_factor` times the nominal blip height `4^-j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Differentiator {
    time: Cvq,
    amplitude: Cvq,
    fd_step: f64,
    threshold_factor: f64,
}

impl Differentiator {
    pub fn new(
        time: Cvq,
        amplitude: Cvq,
        fd_step: f64,
        threshold_factor: f64,
    ) -> Result<Self, BlipError> {
        if fd_step < time.resolution() {
            return Err(BlipError::StepBelowResolution {
                fd_step,
                resolution: time.resolution(),
            });
        }
        if !(threshold_factor > 0.0 && threshold_factor < 1.0) {
            return Err(BlipError::BadThreshold(threshold_factor));
        }
        Ok(Differentiator {
            time,
            amplitude,
            fd_step,
            threshold_factor,
        })
    }

    pub fn time(&self) -> &Cvq {
        &self.time
    }

    pub fn amplitude(&self) -> &Cvq {
        &self.amplitude
    }

    /// The quantized slope reading at observation time `2^-j`.
    pub fn slope_reading(&self, signal: &Signal, j: u32) -> f64 {
        let x = (-f64::from(j)).exp2();
        let t0 = self.time.quantize(x).value;
        let tp = self.time.quantize(t0 + self.fd_step).value;
        let tm = self.time.quantize(t0 - self.fd_step).value;
        let spacing = tp - tm;
        if spacing <= 0.0 {
            return self.amplitude.quantize(0.0).value;
        }
        let height = (-2.0 * f64::from(j)).exp2();
        // Quadrature budget three orders below the decision threshold; it
        // scales with the window so deep blips stay resolvable.
        let tol = (self.threshold_factor * height * spacing * 1e-3).max(f64::MIN_POSITIVE);
        let raw = signal
            .mass_between(tm, tp, tol)
            .expect("tolerance scales with blip mass")
            / spacing;
        self.amplitude.quantize(raw).value
    }

    /// Observe whether the derivative at `2^-j` reads as nonzero.
    pub fn decide(&self, signal: &Signal, j: u32) -> Answer {
        let height = (-2.0 * f64::from(j)).exp2();
        if self.slope_reading(signal, j).abs() > self.threshold_factor * height {
            Answer::Yes
        } else {
            Answer::No
        }
    }
}
