//! The barrier-function device: membership through function evaluation.
//!
//! Over the witness verifier we build a surrogate barrier
//!
//! ```text
//! F(j, x) = 2 V(j, <x1^2>, ..., <xk^2>) prod_i cos^2(pi xi^2)
//!           + 4 k sum_i sin^2(pi xi^2)
//! ```
//!
//! where `<y>` is the nearest natural number and `V` is the verifier. `F` is
//! nonnegative, even in every coordinate, exceeds 1 everywhere when `j` is
//! not a member (indeed it never drops below 2 there), and can only dip to 1
//! or below when the rounded squares form a witness tuple — at which point
//! the value at the exact integer point is 0. Every evaluation calls the
//! verifier, so computing `F` is never cheaper than the membership search it
//! is supposed to replace.
//!
//! Composing with the switch `rho` (1 at 0, identically 0 from 1 on) gives a
//! response `H` that is identically zero for non-members and reaches 1 at
//! witnesses. A one-parameter decoder `(t)_i = t sin(t^(2i-1))` folds the
//! whole argument tuple into a single dial `t`, and since `|(t)_i| <= t`,
//! the response along the dial is *exactly* zero until `t^2` reaches one
//! less than the member's waiting time. The cutoff-weighted integral of that
//! response is the detection signal: any finite upper integration limit that
//! still detects a member thereby reveals a bound on its waiting time.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use thiserror::Error;

use crate::blip::bump;
use crate::exec::map_indexed;
use crate::quad::kahan_sum;
use crate::resets::{DiophantineVerifier, VerifierError};

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("variable index {index} out of range for arity {arity}")]
    ArityMismatch { index: usize, arity: usize },
    #[error("rational constant has zero denominator")]
    ZeroDenominator,
}

/// Expression trees over the closure of addition, multiplication, sine,
/// projections, rational and pi constants, and the two switch variants.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Var(usize),
    Rational(i64, i64),
    Pi,
    RhoPiecewise(Box<Expr>),
    RhoSmooth(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, xs: &[f64]) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Add(l, r) => l.eval(xs)? + r.eval(xs)?,
            Expr::Mul(l, r) => l.eval(xs)? * r.eval(xs)?,
            Expr::Sin(a) => a.eval(xs)?.sin(),
            Expr::Var(i) => {
                if *i >= xs.len() {
                    return Err(ExprError::ArityMismatch {
                        index: *i,
                        arity: xs.len(),
                    });
                }
                xs[*i]
            }
            Expr::Rational(_, 0) => return Err(ExprError::ZeroDenominator),
            Expr::Rational(p, q) => *p as f64 / *q as f64,
            Expr::Pi => PI,
            Expr::RhoPiecewise(a) => Rho::Piecewise.eval(a.eval(xs)?),
            Expr::RhoSmooth(a) => Rho::Smooth.eval(a.eval(xs)?),
        })
    }
}

/// The switch: 1 at the origin, exactly 0 from 1 onward. The piecewise
/// variant is `(|x-1| - (x-1)) / 2`, linear on `[0, 1]`; the smooth variant
/// reuses the unit bump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rho {
    Piecewise,
    Smooth,
}

impl Rho {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Rho::Piecewise => 0.5 * ((x - 1.0).abs() - (x - 1.0)),
            Rho::Smooth => bump(x),
        }
    }
}

fn nearest_nat(y: f64) -> u64 {
    if y <= 0.0 {
        return 0;
    }
    // Half-up ties; the cosine mask vanishes at the seams anyway.
    (y + 0.5).floor() as u64
}

#[derive(Debug, Error)]
pub enum RichardsonError {
    #[error("decoder arity {decoder} does not match device arity {device}")]
    DecoderArityMismatch { device: usize, decoder: usize },
    #[error(
        "cutoff integral stalled: successive refinements still differ by more than tol {tol:e}"
    )]
    NonConvergentQuadrature { tol: f64 },
    #[error(transparent)]
    Verifier(#[from] VerifierError),
}

/// The barrier device: a verifier handle plus a switch choice.
#[derive(Debug, Clone)]
pub struct FDevice {
    verifier: Arc<DiophantineVerifier>,
    rho: Rho,
}

impl FDevice {
    pub fn new(verifier: Arc<DiophantineVerifier>, rho: Rho) -> Self {
        FDevice { verifier, rho }
    }

    pub fn arity(&self) -> usize {
        self.verifier.arity()
    }

    pub fn verifier(&self) -> &DiophantineVerifier {
        &self.verifier
    }

    pub fn rho(&self) -> Rho {
        self.rho
    }

    /// The barrier value `F(j, xs)`.
    pub fn barrier(&self, j: u64, xs: &[f64]) -> Result<f64, VerifierError> {
        let mut prod = 1.0;
        let mut sum = 0.0;
        let mut rounded = Vec::with_capacity(xs.len());
        for &x in xs {
            let x2 = x * x;
            rounded.push(nearest_nat(x2));
            let (s, c) = (PI * x2).sin_cos();
            prod *= c * c;
            sum += s * s;
        }
        let v = self.verifier.evaluate(j, &rounded)? as f64;
        Ok(2.0 * v * prod + 4.0 * xs.len() as f64 * sum)
    }

    /// The switched response `H(j, xs) = rho(F(j, xs))`.
    pub fn response(&self, j: u64, xs: &[f64]) -> Result<f64, VerifierError> {
        Ok(self.rho.eval(self.barrier(j, xs)?))
    }

    /// The response along the decoder dial: `B_j(t) = H(j, (t)_1..(t)_k)`.
    /// Small arities stay on the stack; this runs once per quadrature
    /// sample.
    pub fn response_along(
        &self,
        decoder: &Decoder,
        j: u64,
        t: f64,
    ) -> Result<f64, RichardsonError> {
        if decoder.arity() != self.arity() {
            return Err(RichardsonError::DecoderArityMismatch {
                device: self.arity(),
                decoder: decoder.arity(),
            });
        }
        let k = self.arity();
        if k <= 8 {
            let mut buf = [0.0f64; 8];
            decoder.write_point(t, &mut buf[..k]);
            Ok(self.response(j, &buf[..k])?)
        } else {
            Ok(self.response(j, &decoder.point(t))?)
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("coordinate index {index} out of range 1..={arity}")]
    IndexOutOfRange { index: usize, arity: usize },
}

/// One-parameter decoding curves `(t)_i = t sin(t^(2i-1))`, `1 <= i <= k`.
/// Each coordinate is bounded by `t` in magnitude, and jointly they pass
/// within tolerance of target tuples as the dial grows — the tests only
/// ever assert budgeted approximate reachability, never full density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decoder {
    arity: usize,
}

impl Decoder {
    pub fn new(arity: usize) -> Self {
        assert!(arity >= 1, "decoder needs at least one coordinate");
        Decoder { arity }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn coordinate(&self, t: f64, i: usize) -> Result<f64, DecodeError> {
        if i == 0 || i > self.arity {
            return Err(DecodeError::IndexOutOfRange {
                index: i,
                arity: self.arity,
            });
        }
        // Same incremental power chain as `write_point`, so the two agree
        // bit for bit.
        let t2 = t * t;
        let mut power = t;
        for _ in 1..i {
            power *= t2;
        }
        Ok(t * power.sin())
    }

    /// All coordinates at dial position `t`.
    pub fn point(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.arity];
        self.write_point(t, &mut out);
        out
    }

    /// Fill `out` (length = arity) with the coordinates at `t`. The odd
    /// powers are built incrementally: `t^(2i+1) = t^(2i-1) * t^2`.
    pub fn write_point(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.arity);
        let t2 = t * t;
        let mut power = t;
        for slot in out.iter_mut() {
            *slot = t * power.sin();
            power *= t2;
        }
    }

    /// The same curve as an explicit expression tree, for cross-checking
    /// the evaluator against the closed formula.
    pub fn as_expr(&self, i: usize) -> Result<Expr, DecodeError> {
        if i == 0 || i > self.arity {
            return Err(DecodeError::IndexOutOfRange {
                index: i,
                arity: self.arity,
            });
        }
        let mut power = Expr::Var(0);
        for _ in 1..(2 * i - 1) {
            power = Expr::Mul(Box::new(power), Box::new(Expr::Var(0)));
        }
        Ok(Expr::Mul(
            Box::new(Expr::Var(0)),
            Box::new(Expr::Sin(Box::new(power))),
        ))
    }
}

/// Cutoff factor making the detection integral converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cutoff {
    /// `exp(-t)` — the default; fast decay keeps useful upper limits small.
    ExpDecay,
    /// `1 / (1 + t^2)`.
    InverseSquare,
}

impl Cutoff {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            Cutoff::ExpDecay => (-t).exp(),
            Cutoff::InverseSquare => 1.0 / (1.0 + t * t),
        }
    }
}

/// The truncated detection integral `K(j) = \int_0^B B_j(t) gamma(t) dt`.
///
/// The response is highly oscillatory: the innermost sine at the end of the
/// dial turns at `(2k-1) B^(2k-2)`, and passing through `sin^2(pi x^2)`
/// multiplies the rate by another `2 pi B` or so. The initial uniform step
/// resolves that estimate with margin, and refinement halves it until two
/// successive trapezoid estimates agree within `tol`. Samples are evaluated
/// in parallel but summed in fixed index order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffIntegral {
    pub cutoff: Cutoff,
    pub upper_limit: f64,
    pub tol: f64,
    pub max_refinements: u32,
}

impl CutoffIntegral {
    pub fn new(cutoff: Cutoff, upper_limit: f64) -> Self {
        CutoffIntegral {
            cutoff,
            upper_limit,
            tol: 1e-9,
            max_refinements: 16,
        }
    }

    /// `K(j)`: nonnegative, exactly zero for non-members, and zero whenever
    /// the upper limit stops short of `sqrt(nu(j) - 1)`.
    pub fn detection_value(
        &self,
        device: &FDevice,
        decoder: &Decoder,
        j: u64,
    ) -> Result<f64, RichardsonError> {
        if decoder.arity() != device.arity() {
            return Err(RichardsonError::DecoderArityMismatch {
                device: device.arity(),
                decoder: decoder.arity(),
            });
        }
        let b = self.upper_limit;
        let k = device.arity() as i32;
        let cutoff = self.cutoff;
        let integrand = |t: f64| {
            let r = device
                .response(j, &decoder.point(t))
                .expect("arity checked above");
            r * cutoff.eval(t)
        };

        let omega = TAU * b * ((2 * k - 1) as f64 * b.powi(2 * k - 1) + 1.0);
        let step0 = (TAU / omega / 4.0).min(b / 16.0);
        let panels0 = (b / step0).ceil().max(8.0) as usize;

        // Trapezoid total kept as h * weight; each refinement adds the
        // midpoint samples of the current panels.
        let mut panels = panels0;
        let mut h = b / panels as f64;
        let ends = 0.5 * (integrand(0.0) + integrand(b));
        let interior = map_indexed(panels - 1, |i| integrand((i + 1) as f64 * h));
        let mut weight = kahan_sum(interior.into_iter().chain([ends]));
        let mut estimate = h * weight;

        for level in 0..self.max_refinements {
            let mids = map_indexed(panels, |i| integrand((i as f64 + 0.5) * h));
            weight += kahan_sum(mids);
            panels *= 2;
            h *= 0.5;
            let refined = h * weight;
            let delta = (refined - estimate).abs();
            estimate = refined;
            // The first couple of levels may agree by accident while the
            // narrow response windows are still unsampled; insist on three.
            if level >= 2 && delta < self.tol {
                return Ok(estimate);
            }
        }
        Err(RichardsonError::NonConvergentQuadrature { tol: self.tol })
    }
}

/// A waiting-time bound extractable from any finite integration limit:
/// a member detected with limit `B` has its response supported where
/// `t^2 >= nu - 1`, so `nu <= ceil(B^2) + 1`.
pub fn beta_bound_from_limit(b: f64) -> u64 {
    debug_assert!(b >= 1.0);
    b.powi(2).ceil() as u64 + 1
}
