//! Bounded, quantized continuously-variable quantities.
//!
//! A [`Cvq`] models a physical quantity with a magnitude bound and a
//! resolution; its [`PrecisionRatio`] is the dimensionless quotient of the
//! two and is invariant under a change of units. Readings are deterministic:
//! values round to the nearest resolution step (ties to even) and saturate at
//! the bound instead of erroring, with the clipping reported on the
//! [`Reading`].

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PrecisionError {
    #[error("invalid quantity `{label}`: bound {bound} must satisfy bound >= resolution > 0")]
    InvalidCvq {
        label: String,
        bound: f64,
        resolution: f64,
    },
    #[error("gain {0} must be >= 1")]
    InvalidGain(f64),
    #[error("scale factor {0} must be > 0")]
    InvalidScale(f64),
}

/// A continuously variable quantity: magnitude bound, resolution, and a
/// label naming what it measures. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Cvq {
    label: String,
    bound: f64,
    resolution: f64,
}

/// Dimensionless precision ratio `bound / resolution`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PrecisionRatio(pub f64);

impl PrecisionRatio {
    pub fn log2(self) -> f64 {
        self.0.log2()
    }
}

/// A measured value: an integer multiple of the resolution with magnitude at
/// most the bound. `clipped` reports saturation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reading {
    pub value: f64,
    pub clipped: bool,
}

impl Cvq {
    pub fn new(label: impl Into<String>, bound: f64, resolution: f64) -> Result<Self, PrecisionError> {
        let label = label.into();
        if !(resolution > 0.0 && bound >= resolution && bound.is_finite()) {
            return Err(PrecisionError::InvalidCvq {
                label,
                bound,
                resolution,
            });
        }
        Ok(Cvq {
            label,
            bound,
            resolution,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn precision_ratio(&self) -> PrecisionRatio {
        PrecisionRatio(self.bound / self.resolution)
    }

    /// Round to the nearest resolution multiple (ties to the even multiple)
    /// and saturate at the largest representable multiple within the bound.
    pub fn quantize(&self, value: f64) -> Reading {
        debug_assert!(value.is_finite());
        let steps = (value / self.resolution).round_ties_even();
        let max_steps = (self.bound / self.resolution).floor();
        if steps.abs() > max_steps {
            Reading {
                value: (max_steps * self.resolution).copysign(steps),
                clipped: true,
            }
        } else {
            Reading {
                value: steps * self.resolution,
                clipped: false,
            }
        }
    }

    /// Amplification scales the bound by `gain >= 1` at unchanged
    /// resolution, so the precision ratio scales by `gain`.
    pub fn amplified(&self, gain: f64) -> Result<Self, PrecisionError> {
        if !(gain >= 1.0 && gain.is_finite()) {
            return Err(PrecisionError::InvalidGain(gain));
        }
        Cvq::new(self.label.clone(), self.bound * gain, self.resolution)
    }

    /// Change of units: both bound and resolution scale by `factor`, leaving
    /// the precision ratio unchanged.
    pub fn rescaled(&self, factor: f64) -> Result<Self, PrecisionError> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(PrecisionError::InvalidScale(factor));
        }
        Cvq::new(self.label.clone(), self.bound * factor, self.resolution * factor)
    }
}
