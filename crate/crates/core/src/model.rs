//! Potential cases, parameter conventions and geometric landmarks.
//!
//! All three potentials are written in terms of two positive strengths,
//! `h4` (harmonic) and `c2` (quartic); the signs live in [`Case`]:
//!
//! | case                 | V(z)                      |
//! |----------------------|---------------------------|
//! | `BoundedQuartic`     | `+h4 z²/4 + c2 z⁴/2`      |
//! | `DoubleWell`         | `-h4 z²/4 + c2 z⁴/2`      |
//! | `InvertedDoubleWell` | `+h4 z²/4 - c2 z⁴/2`      |
//!
//! With [`Convention::Half`] (mass 1/2) the Schrödinger equation reads
//! `y'' + (E - V) y = 0`. With [`Convention::One`] (mass 1) it reads
//! `y''/2 + (E - V) y = 0`; see [`PotentialSpec::map_convention`].

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    BoundedQuartic,
    DoubleWell,
    InvertedDoubleWell,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::BoundedQuartic => "bounded",
            Case::DoubleWell => "double",
            Case::InvertedDoubleWell => "inverted",
        };
        f.write_str(s)
    }
}

/// Particle mass convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// mass 1/2, `H = -d²/dz² + V`
    #[default]
    Half,
    /// mass 1, `H = -(1/2) d²/dz² + V`
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSpec {
    pub case: Case,
    pub h4: f64,
    pub c2: f64,
    pub convention: Convention,
}

impl PotentialSpec {
    pub fn new(case: Case, h4: f64, c2: f64, convention: Convention) -> Result<Self> {
        if !(h4.is_finite() && h4 > 0.0) {
            return Err(Error::InvalidParameter(format!("h4 must be positive and finite, got {h4}")));
        }
        if !(c2.is_finite() && c2 > 0.0) {
            return Err(Error::InvalidParameter(format!("c2 must be positive and finite, got {c2}")));
        }
        Ok(Self { case, h4, c2, convention })
    }

    /// Half-convention spec; the common case in tests and examples.
    pub fn half(case: Case, h4: f64, c2: f64) -> Result<Self> {
        Self::new(case, h4, c2, Convention::Half)
    }

    /// Positive square root of `h4`.
    pub fn h2(&self) -> f64 {
        self.h4.sqrt()
    }

    pub fn h(&self) -> f64 {
        self.h4.sqrt().sqrt()
    }

    pub fn h6(&self) -> f64 {
        self.h4 * self.h2()
    }

    pub fn c(&self) -> f64 {
        self.c2.sqrt()
    }

    /// `h⁶/c²`, the natural large parameter.
    pub fn h6_over_c2(&self) -> f64 {
        self.h6() / self.c2
    }

    pub fn potential_value(&self, z: f64) -> f64 {
        let z2 = z * z;
        let quadratic = 0.25 * self.h4 * z2;
        let quartic = 0.5 * self.c2 * z2 * z2;
        match self.case {
            Case::BoundedQuartic => quadratic + quartic,
            Case::DoubleWell => -quadratic + quartic,
            Case::InvertedDoubleWell => quadratic - quartic,
        }
    }

    /// Fails unless the spec has the given case.
    pub fn require(&self, case: Case) -> Result<()> {
        if self.case == case {
            Ok(())
        } else {
            let expected = match case {
                Case::BoundedQuartic => "bounded quartic",
                Case::DoubleWell => "double well",
                Case::InvertedDoubleWell => "inverted double well",
            };
            Err(Error::WrongCase { expected, got: self.case })
        }
    }

    /// Stationary points away from the origin. Not defined for the bounded quartic.
    pub fn landmarks(&self) -> Result<Landmarks> {
        let h2 = self.h2();
        let z_plus = h2 / (2.0 * self.c());
        let depth = self.h4 * self.h4 / (32.0 * self.c2);
        let (v_at_extremum, curvature) = match self.case {
            Case::DoubleWell => (-depth, self.h4),
            Case::InvertedDoubleWell => (depth, -self.h4),
            Case::BoundedQuartic => {
                return Err(Error::WrongCase { expected: "double or inverted double well", got: self.case })
            }
        };
        Ok(Landmarks {
            z_plus,
            z_minus: -z_plus,
            v_at_extremum,
            curvature,
            h_plus_sq: std::f64::consts::SQRT_2 * h2,
            barrier_or_hump: depth,
        })
    }

    /// `U(z) = (4/h₊⁴)[V(z) - V(z₊)]`, the double-well profile normalised so
    /// that `U ≈ (z - z₊)²` near the minimum.
    pub fn shifted_barrier_profile(&self, z: f64) -> Result<f64> {
        self.require(Case::DoubleWell)?;
        let lm = self.landmarks()?;
        let hp4 = lm.h_plus_sq * lm.h_plus_sq;
        Ok(4.0 / hp4 * (self.potential_value(z) - lm.v_at_extremum))
    }

    /// Re-expresses the spec in the `target` convention.
    ///
    /// Returns the mapped spec and the factor `f` with `E_target = f * E_self`:
    /// `E_half = 2 E_one`, `h4_half = 2 h4_one`, `c2_half = 2 c2_one`.
    pub fn map_convention(&self, target: Convention) -> (PotentialSpec, f64) {
        let factor = match (self.convention, target) {
            (Convention::One, Convention::Half) => 2.0,
            (Convention::Half, Convention::One) => 0.5,
            _ => 1.0,
        };
        let mapped = PotentialSpec {
            case: self.case,
            h4: self.h4 * factor,
            c2: self.c2 * factor,
            convention: target,
        };
        (mapped, factor)
    }

    /// The equivalent Half-convention spec and the factor converting
    /// Half-convention energies back into this spec's convention.
    pub fn to_half(&self) -> (PotentialSpec, f64) {
        let (half, factor) = self.map_convention(Convention::Half);
        (half, 1.0 / factor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Landmarks {
    pub z_plus: f64,
    pub z_minus: f64,
    /// `V(z±)`
    pub v_at_extremum: f64,
    /// `V''(z±)`
    pub curvature: f64,
    /// `h₊² = √2 h²`
    pub h_plus_sq: f64,
    /// Barrier height (double well) or hump height (inverted well), positive.
    pub barrier_or_hump: f64,
}

/// Level label `q0 = 2n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LevelIndex {
    pub n: u32,
}

impl LevelIndex {
    pub fn new(n: u32) -> Self {
        Self { n }
    }

    pub fn from_q0(q0: u32) -> Result<Self> {
        if q0 % 2 == 1 {
            Ok(Self { n: (q0 - 1) / 2 })
        } else {
            Err(Error::InvalidParameter(format!("q0 must be odd and positive, got {q0}")))
        }
    }

    pub fn q0(&self) -> u32 {
        2 * self.n + 1
    }

    /// True for `q0 ≡ 1 (mod 4)`, the even-parity members.
    pub fn is_even_branch(&self) -> bool {
        self.q0() % 4 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dw() -> PotentialSpec {
        PotentialSpec::half(Case::DoubleWell, 16.0, 2.0).unwrap()
    }

    #[test]
    fn potential_examples() {
        let s = dw();
        assert_eq!(s.potential_value(0.0), 0.0);
        let zp = s.landmarks().unwrap().z_plus;
        assert!((zp - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.potential_value(zp) + 4.0).abs() < 1e-13);
        let inv = PotentialSpec { case: Case::InvertedDoubleWell, ..s };
        assert!((inv.potential_value(zp) - 4.0).abs() < 1e-13);
    }

    #[test]
    fn landmarks_double_well() {
        let lm = dw().landmarks().unwrap();
        assert!((lm.v_at_extremum + 256.0 / 64.0).abs() < 1e-13);
        assert!((lm.h_plus_sq.powi(2) - 2.0 * 16.0).abs() < 1e-12);
        assert_eq!(lm.curvature, 16.0);
        assert!(PotentialSpec::half(Case::BoundedQuartic, 1.0, 1.0).unwrap().landmarks().is_err());
    }

    #[test]
    fn barrier_profile() {
        let s = dw();
        let lm = s.landmarks().unwrap();
        assert!(s.shifted_barrier_profile(lm.z_plus).unwrap().abs() < 1e-13);
        let u0 = s.shifted_barrier_profile(0.0).unwrap();
        // (4/h₊⁴)(h⁸/32c²) = h⁴/(16c²)
        assert!((u0 - 16.0 / 32.0).abs() < 1e-13);
        let eps = 1e-3;
        let u = s.shifted_barrier_profile(lm.z_plus + eps).unwrap();
        assert!((u - eps * eps).abs() <= 10.0 * eps.powi(3));
        let inv = PotentialSpec { case: Case::InvertedDoubleWell, ..s };
        assert!(matches!(inv.shifted_barrier_profile(0.0), Err(Error::WrongCase { .. })));
    }

    #[test]
    fn convention_map() {
        let one = PotentialSpec::new(Case::DoubleWell, 2.0, 2.0, Convention::One).unwrap();
        let (half, f) = one.map_convention(Convention::Half);
        assert_eq!((half.h4, half.c2, f), (4.0, 4.0, 2.0));
        let (back, g) = half.map_convention(Convention::One);
        assert_eq!(back, one);
        assert_eq!(f * g, 1.0);
        let (same, k) = half.map_convention(Convention::Half);
        assert_eq!((same, k), (half, 1.0));
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(PotentialSpec::half(Case::DoubleWell, 0.0, 1.0).is_err());
        assert!(PotentialSpec::half(Case::DoubleWell, 1.0, -1.0).is_err());
        assert!(PotentialSpec::half(Case::DoubleWell, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn level_index() {
        assert_eq!(LevelIndex::from_q0(5).unwrap().n, 2);
        assert!(LevelIndex::from_q0(4).is_err());
        assert!(LevelIndex::new(0).is_even_branch());
        assert!(!LevelIndex::new(1).is_even_branch());
    }
}
