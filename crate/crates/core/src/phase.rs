//! Real magnitudes tagged with a fourth-root-of-unity phase.
//!
//! Several matching constants and boundary-condition results are real
//! numbers times one of {1, i, -1, -i}. They are carried as a nonnegative
//! magnitude plus a phase so that no complex arithmetic is needed.

use serde::Serialize;
use std::fmt;
use std::ops::{Div, Mul};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    fn index(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    fn from_index(k: u8) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    /// Product of two phases.
    pub fn times(self, other: Phase) -> Phase {
        Phase::from_index(self.index() + other.index())
    }

    pub fn conj(self) -> Phase {
        Phase::from_index(4 - self.index())
    }

    pub fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }

    /// Phase of `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Phase {
        Phase::from_index(k.rem_euclid(4) as u8)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::PlusOne => "+1",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-1",
            Phase::MinusI => "-i",
        };
        f.write_str(s)
    }
}

/// `magnitude * phase` with `magnitude >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Phased {
    pub magnitude: f64,
    pub phase: Phase,
}

impl Phased {
    /// Wraps a signed real value.
    pub fn real(value: f64) -> Self {
        Self::with_phase(value, Phase::PlusOne)
    }

    /// Wraps `value * i` for a signed real `value`.
    pub fn imaginary(value: f64) -> Self {
        Self::with_phase(value, Phase::PlusI)
    }

    /// `value * phase`, folding a negative `value` into the phase.
    pub fn with_phase(value: f64, phase: Phase) -> Self {
        if value < 0.0 {
            Self { magnitude: -value, phase: phase.times(Phase::MinusOne) }
        } else {
            Self { magnitude: value, phase }
        }
    }

    /// Signed real value; `None` when the phase is imaginary.
    pub fn as_real(self) -> Option<f64> {
        match self.phase {
            Phase::PlusOne => Some(self.magnitude),
            Phase::MinusOne => Some(-self.magnitude),
            _ => None,
        }
    }

    /// Coefficient of `i`; `None` when the phase is real.
    pub fn as_imaginary(self) -> Option<f64> {
        match self.phase {
            Phase::PlusI => Some(self.magnitude),
            Phase::MinusI => Some(-self.magnitude),
            _ => None,
        }
    }
}

impl Mul for Phased {
    type Output = Phased;

    fn mul(self, other: Phased) -> Phased {
        Phased { magnitude: self.magnitude * other.magnitude, phase: self.phase.times(other.phase) }
    }
}

impl Div for Phased {
    type Output = Phased;

    fn div(self, other: Phased) -> Phased {
        Phased {
            magnitude: self.magnitude / other.magnitude,
            phase: self.phase.times(other.phase.conj()),
        }
    }
}
