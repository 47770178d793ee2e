//! Matching constants, boundary conditions and the exponentially small
//! tunneling quantities: the deviation `q - q₀`, the decay width of the
//! inverted well and the level splitting of the double well.
//!
//! All matching constants are leading order; the `[1 + O(1/h²)]` factors
//! are dropped. Products of large exponentials are formed in log space.

use crate::error::{Error, Result};
use crate::model::{Case, Convention, PotentialSpec};
use crate::phase::{Phase, Phased};
use crate::quad;
use crate::series::energy_series;
use crate::specfun::{self, EllipticData};
use serde::Serialize;
use std::f64::consts::{PI, SQRT_2};

/// Energy-series order used when a caller does not choose one.
pub const DEFAULT_ORDER: usize = 3;

pub const TRUNCATION_NOTE: &str = "leading order; [1 + O(1/h^2)] factors dropped";

/// `ln [x]!`, failing at the poles.
fn ln_fact(x: f64) -> Result<f64> {
    specfun::log_gamma(x + 1.0)
}

/// Nearest odd integer to `q`, used to fix phase conventions.
fn nearest_odd(q: f64) -> i64 {
    let k = ((q - 1.0) / 2.0).round() as i64;
    2 * k + 1
}

fn require_q0(q0: u32) -> Result<f64> {
    if q0 % 2 == 1 {
        Ok(q0 as f64)
    } else {
        Err(Error::InvalidParameter(format!("q0 must be odd and positive, got {q0}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurningPoints {
    /// inner turning point
    pub z0: f64,
    /// outer turning point
    pub z1: f64,
}

/// Closed-form turning points at level `q` on the positive axis.
///
/// Double well: `z₀ = z₊ - (2q²)^(1/4)/h - √2 c q/h⁴`, `z₁ = z₊ + (2q²)^(1/4)/h`.
/// Inverted well: `z₀ = √(2q)/h`, `z₁ = (h²/√(2c²))(1 - 2qc²/h⁶)`.
pub fn turning_points(spec: &PotentialSpec, q: f64) -> Result<TurningPoints> {
    let (half, _) = spec.to_half();
    let h = half.h();
    let c = half.c();
    match half.case {
        Case::DoubleWell => {
            EllipticData::new(&half, q)?;
            let z_plus = half.landmarks()?.z_plus;
            let shift = (2.0 * q * q).powf(0.25) / h;
            Ok(TurningPoints { z0: z_plus - shift - SQRT_2 * c * q / half.h4, z1: z_plus + shift })
        }
        Case::InvertedDoubleWell => {
            if half.h6_over_c2() <= 16.0 * q {
                return Err(Error::OutOfRegime(format!(
                    "level q = {q} is not below the hump (h^6/c^2 = {})",
                    half.h6_over_c2()
                )));
            }
            let z1 = half.h2() / (2.0 * half.c2).sqrt() * (1.0 - 2.0 * q / half.h6_over_c2());
            Ok(TurningPoints { z0: (2.0 * q).sqrt() / h, z1 })
        }
        Case::BoundedQuartic => Err(Error::WrongCase { expected: "double or inverted double well", got: half.case }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchingRatios {
    /// `β/β̄ = [2h²/(2c²)^(1/2)]^q i^(q-1)`
    pub beta_over_beta_bar: Option<Phased>,
    /// `γ/γ̄` in the closed form obtained at the minima.
    pub gamma_ratio_minimum: Option<f64>,
    /// `γ/γ̄` from the WKB origin values, with the full barrier action.
    pub gamma_ratio_origin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingConstants {
    /// `y_A = y_B / α`
    pub alpha: f64,
    /// `ȳ_A = ȳ_C / ᾱ`
    pub alpha_bar: Phased,
    /// `y_A = β y_WKB` (inverted well)
    pub beta: Option<f64>,
    pub beta_bar: Option<Phased>,
    /// `y_WKB = γ y_A` (double well)
    pub gamma: Option<f64>,
    pub gamma_bar: Option<f64>,
    pub ratios: MatchingRatios,
    pub truncation_note: &'static str,
}

/// Matching constants of the inverted double well at level `q`.
pub fn matching_constants_inverted(spec: &PotentialSpec, q: f64) -> Result<MatchingConstants> {
    let (half, _) = spec.to_half();
    half.require(Case::InvertedDoubleWell)?;
    let h2 = half.h2();
    let action = half.h6_over_c2() / 12.0;
    let q0 = nearest_odd(q);

    let ln_alpha = 0.25 * (q - 1.0) * h2.ln() - action - ln_fact(0.25 * (q - 1.0))? - 0.25 * (q - 1.0) * 2f64.ln();
    // (-h²)^(-(q+1)/4) contributes i^(-(q+1)/2)
    let alpha_bar_value = (-0.25 * (q + 1.0) * h2.ln() + action + 0.25 * (q + 1.0) * 2f64.ln()).exp()
        * specfun::reciprocal_factorial(-0.25 * (q + 1.0));
    let alpha_bar = Phased::with_phase(alpha_bar_value, Phase::i_pow(-(q0 + 1) / 2));

    let base = 2.0 * h2 / (2.0 * half.c2).sqrt();
    let beta = (0.5 * h2).sqrt() * base.powf(0.5 * q);
    let beta_bar = Phased::with_phase((0.5 * h2).sqrt() * base.powf(-0.5 * q), Phase::i_pow(1 - q0));
    let ratio = Phased::with_phase(base.powf(q), Phase::i_pow(q0 - 1));

    Ok(MatchingConstants {
        alpha: ln_alpha.exp(),
        alpha_bar,
        beta: Some(beta),
        beta_bar: Some(beta_bar),
        gamma: None,
        gamma_bar: None,
        ratios: MatchingRatios { beta_over_beta_bar: Some(ratio), gamma_ratio_minimum: None, gamma_ratio_origin: None },
        truncation_note: TRUNCATION_NOTE,
    })
}

/// Double-well quantities shared by several formulas.
struct WellScales {
    h_plus: f64,
    h_plus_sq: f64,
    z_plus: f64,
    /// `h⁶/c²`
    ratio: f64,
}

impl WellScales {
    fn new(half: &PotentialSpec) -> Result<Self> {
        half.require(Case::DoubleWell)?;
        let lm = half.landmarks()?;
        Ok(Self {
            h_plus: lm.h_plus_sq.sqrt(),
            h_plus_sq: lm.h_plus_sq,
            z_plus: lm.z_plus,
            ratio: half.h6_over_c2(),
        })
    }

    /// `½ h₊² z₊²`, the harmonic estimate of the barrier exponent.
    fn harmonic_exponent(&self) -> f64 {
        0.5 * self.h_plus_sq * self.z_plus * self.z_plus
    }

    /// `h⁶/(6√2 c²)`, the full barrier action.
    fn full_action(&self) -> f64 {
        self.ratio / (6.0 * SQRT_2)
    }
}

/// `ln γ` from the WKB solution to the left of `z₀`.
fn ln_gamma_const(s: &WellScales, q: f64) -> Result<f64> {
    Ok((2.0 * PI.sqrt()).ln() - 0.5 * s.h_plus_sq.ln() - ln_fact(0.25 * (q - 1.0))?
        + 0.25 * q * (0.5 * s.h_plus_sq).ln()
        + 0.5 * (q + 1.0) * (2.0 * s.z_plus).ln()
        - 0.5 * s.harmonic_exponent())
}

/// `ln γ̄`.
fn ln_gamma_bar_const(s: &WellScales, q: f64) -> Result<f64> {
    Ok(ln_fact(0.25 * (q - 3.0))? - 0.5 * PI.ln() - 0.5 * s.h_plus_sq.ln() - 0.25 * q * (0.5 * s.h_plus_sq).ln()
        - 0.5 * (q - 1.0) * (2.0 * s.z_plus).ln()
        + 0.5 * s.harmonic_exponent())
}

/// `ln` of the common prefactor `(h₊²)^(q/2) (2z₊)^q / [(q-1)/2]!`.
fn ln_minimum_prefactor(s: &WellScales, q: f64) -> Result<f64> {
    Ok(0.5 * q * s.h_plus_sq.ln() + q * (2.0 * s.z_plus).ln() - ln_fact(0.5 * (q - 1.0))?)
}

/// `ln α` of the double well: `y_A = y_B / α` near `z₊`.
pub fn ln_alpha_double(spec: &PotentialSpec, q: f64) -> Result<f64> {
    let (half, _) = spec.to_half();
    let s = WellScales::new(&half)?;
    Ok(0.5 * (q - 1.0) * s.h_plus.ln() + 0.5 * (q + 1.0) * (2.0 * s.z_plus).ln()
        - 0.25 * (q - 1.0) * 2f64.ln()
        - ln_fact(0.25 * (q - 1.0))?
        - 0.5 * s.harmonic_exponent())
}

/// Matching constants of the double well at level `q`.
pub fn matching_constants_double(spec: &PotentialSpec, q: f64) -> Result<MatchingConstants> {
    let (half, _) = spec.to_half();
    let s = WellScales::new(&half)?;
    let q0 = nearest_odd(q);
    let ln_alpha = ln_alpha_double(&half, q)?;
    let alpha_bar_value = (0.25 * (q + 1.0) * 2f64.ln() + 0.5 * s.harmonic_exponent()
        - 0.5 * (q - 1.0) * (2.0 * s.z_plus).ln()
        - 0.25 * (q + 1.0) * s.h_plus_sq.ln())
    .exp()
        * specfun::reciprocal_factorial(-0.25 * (q + 1.0));
    // (-h₊²)^(-(q+1)/4) contributes i^(-(q+1)/2)
    let alpha_bar = Phased::with_phase(alpha_bar_value, Phase::i_pow(-(q0 + 1) / 2));

    let gamma = ln_gamma_const(&s, q)?.exp();
    let gamma_bar = ln_gamma_bar_const(&s, q)?.exp();
    let minimum = ((2.0 * PI).sqrt().ln() + ln_minimum_prefactor(&s, q)? - s.harmonic_exponent()).exp();
    let origin = gamma_ratio_origin(&s, q)?;

    Ok(MatchingConstants {
        alpha: ln_alpha.exp(),
        alpha_bar,
        beta: None,
        beta_bar: None,
        gamma: Some(gamma),
        gamma_bar: Some(gamma_bar),
        ratios: MatchingRatios {
            beta_over_beta_bar: None,
            gamma_ratio_minimum: Some(minimum),
            gamma_ratio_origin: Some(origin),
        },
        truncation_note: TRUNCATION_NOTE,
    })
}

/// `γ/γ̄ = √(2π) 2^q (h⁶/(2^(3/2) c²))^(q/2) e^(-h⁶/6√2c²) / [(q-1)/2]!`.
fn gamma_ratio_origin(s: &WellScales, q: f64) -> Result<f64> {
    Ok(((2.0 * PI).sqrt().ln() + q * 2f64.ln() + 0.5 * q * (s.ratio / 2f64.powf(1.5)).ln()
        - ln_fact(0.5 * (q - 1.0))?
        - s.full_action())
    .exp())
}

/// Both sides of the replacement that carries the minimum boundary
/// condition over to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OriginReplacement {
    /// `(h₊²)^(q/2) (2z₊)^q`
    pub minimum_prefactor: f64,
    /// `2^q (h⁶/(2^(3/2) c²))^(q/2)`
    pub origin_prefactor: f64,
    /// `½ h₊² z₊² = h⁶/(4√2 c²)`
    pub minimum_exponent: f64,
    /// `h⁶/(6√2 c²)`
    pub origin_exponent: f64,
}

impl OriginReplacement {
    /// Exponent ratio; exactly 3/2.
    pub fn exponent_ratio(&self) -> f64 {
        self.minimum_exponent / self.origin_exponent
    }
}

pub fn origin_replacement(spec: &PotentialSpec, q: f64) -> Result<OriginReplacement> {
    let (half, _) = spec.to_half();
    let s = WellScales::new(&half)?;
    Ok(OriginReplacement {
        minimum_prefactor: s.h_plus_sq.powf(0.5 * q) * (2.0 * s.z_plus).powf(q),
        origin_prefactor: 2f64.powf(q) * (s.ratio / 2f64.powf(1.5)).powf(0.5 * q),
        minimum_exponent: s.harmonic_exponent(),
        origin_exponent: s.full_action(),
    })
}

/// Where the boundary condition fixing `q - q₀` is imposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationRoute {
    /// at the minima, with the harmonic barrier exponent
    Minimum,
    /// at the origin, with the full barrier action
    Origin,
    /// through linearly matched WKB solutions, `(2/π) γ/γ̄`
    Wkb,
}

/// `|q - q₀|` of a double well. The sign is `∓` for the even/odd member.
pub fn q_deviation_double(spec: &PotentialSpec, q0: u32, route: DeviationRoute) -> Result<f64> {
    Ok(ln_q_deviation_double(spec, q0, route)?.exp())
}

/// `ln |q - q₀|`; stays finite where the deviation itself underflows.
pub fn ln_q_deviation_double(spec: &PotentialSpec, q0: u32, route: DeviationRoute) -> Result<f64> {
    let q = require_q0(q0)?;
    let (half, _) = spec.to_half();
    let s = WellScales::new(&half)?;
    let ln_four_over_root = (4.0 / (2.0 * PI).sqrt()).ln();
    match route {
        DeviationRoute::Minimum => Ok(ln_four_over_root + ln_minimum_prefactor(&s, q)? - s.harmonic_exponent()),
        DeviationRoute::Origin => {
            let r = origin_replacement(&half, q)?;
            Ok(ln_four_over_root + r.origin_prefactor.ln() - ln_fact(0.5 * (q - 1.0))? - r.origin_exponent)
        }
        DeviationRoute::Wkb => Ok((2.0 / PI).ln() + ln_gamma_const(&s, q)? - ln_gamma_bar_const(&s, q)?),
    }
}

/// `q - q₀` of the inverted well from the origin condition alone:
/// `(2√2/√π)(h²)^(q₀/2) e^(-h⁶/6c²)/[(q₀-1)/2]!`, sign `±`.
pub fn q_deviation_origin_inverted(spec: &PotentialSpec, q0: u32) -> Result<f64> {
    let q = require_q0(q0)?;
    let (half, _) = spec.to_half();
    half.require(Case::InvertedDoubleWell)?;
    Ok(((2.0 * SQRT_2 / PI.sqrt()).ln() + 0.5 * q * half.h2().ln() - half.h6_over_c2() / 6.0
        - ln_fact(0.5 * (q - 1.0))?)
    .exp())
}

/// The condition at infinity replaces `(-h²)^(q₀/2)` by
/// `∓ 2^(q₀-1) (h⁶/2c²)^(q₀/2)`; the minus sign supplies a factor `i`.
pub fn infinity_replacement(spec: &PotentialSpec, q0: u32) -> Result<Phased> {
    let q = require_q0(q0)?;
    let (half, _) = spec.to_half();
    half.require(Case::InvertedDoubleWell)?;
    Ok(Phased::imaginary(2f64.powf(q - 1.0) * (0.5 * half.h6_over_c2()).powf(0.5 * q)))
}

/// `q - q₀` of the inverted well, `± i √(2/π) 2^q₀ (h⁶/2c²)^(q₀/2) e^(-h⁶/6c²)/[(q₀-1)/2]!`,
/// obtained by applying [`infinity_replacement`] to [`q_deviation_origin_inverted`].
pub fn q_deviation_inverted(spec: &PotentialSpec, q0: u32) -> Result<Phased> {
    let q = require_q0(q0)?;
    let (half, _) = spec.to_half();
    let origin = q_deviation_origin_inverted(&half, q0)?;
    let replacement = infinity_replacement(&half, q0)?;
    let magnitude = (origin.ln() - 0.5 * q * half.h2().ln() + replacement.magnitude.ln()).exp();
    Ok(Phased { magnitude, phase: replacement.phase })
}

/// Bender–Wu labels: `q₀ = 2K + 1`, `ε = h⁶/2c²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenderWuParameters {
    pub k: u32,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub case: Case,
    pub q0: u32,
    /// truncated series value at `q₀`
    pub e0: f64,
    /// `|q - q₀|`
    pub q_deviation: f64,
    /// `|Im E|` (inverted well); the sign is `±`.
    pub imaginary_part: Option<f64>,
    /// `E₋ - E₊` (double well)
    pub splitting: Option<f64>,
    /// the exponent of the tunneling factor
    pub exponent: f64,
    pub convention: Convention,
    pub truncation_order: usize,
    pub bender_wu: Option<BenderWuParameters>,
    pub notes: Vec<String>,
}

/// `dE/dq` at `q₀` from the truncated series (Half convention).
fn energy_slope(half: &PotentialSpec, q0: f64, order: usize) -> Result<f64> {
    let series = energy_series(half.case, order)?;
    Ok(series.derivative_q().value(q0, half.h2(), half.c2))
}

/// Complex eigenvalue of the inverted well: `E₀(q₀) ± i |q - q₀| dE/dq`.
pub fn complex_eigenvalue(spec: &PotentialSpec, q0: u32, order: usize) -> Result<SpectralResult> {
    let q = require_q0(q0)?;
    let (half, back) = spec.to_half();
    half.require(Case::InvertedDoubleWell)?;
    let e0 = energy_series(Case::InvertedDoubleWell, order)?.value(q, half.h2(), half.c2);
    let deviation = q_deviation_inverted(&half, q0)?;
    let slope = energy_slope(&half, q, order)?;
    Ok(SpectralResult {
        case: Case::InvertedDoubleWell,
        q0,
        e0: e0 * back,
        q_deviation: deviation.magnitude,
        imaginary_part: Some(deviation.magnitude * slope * back),
        splitting: None,
        exponent: half.h6_over_c2() / 6.0,
        convention: spec.convention,
        truncation_order: order,
        bender_wu: Some(BenderWuParameters { k: (q0 - 1) / 2, epsilon: 0.5 * half.h6_over_c2() }),
        notes: vec![TRUNCATION_NOTE.to_string(), "sign of Im E is ±".to_string()],
    })
}

/// `ΔE = 2^(q₀+2) h² (h⁶/2c²)^(q₀/2) e^(-h⁶/6√2c²) / (√π 2^(q₀/4) [(q₀-1)/2]!)`
/// for mass 1/2 and Half-convention parameters.
fn splitting_half(half: &PotentialSpec, q: f64) -> Result<f64> {
    Ok(((q + 2.0 - 0.25 * q) * 2f64.ln() + half.h2().ln() + 0.5 * q * (0.5 * half.h6_over_c2()).ln()
        - 0.5 * PI.ln()
        - ln_fact(0.5 * (q - 1.0))?
        - half.h6_over_c2() / (6.0 * SQRT_2))
    .exp())
}

/// Mass-1 splitting in the spec's own `(h⁴, c²)`:
/// `2^q₀ √(2/π) 2h² (h⁶/√2c²)^(q₀/2) e^(-h⁶/6c²) / (2^(q₀/4) [(q₀-1)/2]!)`.
pub fn splitting_mass_one(spec: &PotentialSpec, q0: u32) -> Result<f64> {
    let q = require_q0(q0)?;
    spec.require(Case::DoubleWell)?;
    let r = spec.h6_over_c2();
    Ok(((q - 0.25 * q) * 2f64.ln() + (2.0 / PI).sqrt().ln() + (2.0 * spec.h2()).ln()
        + 0.5 * q * (r / SQRT_2).ln()
        - ln_fact(0.5 * (q - 1.0))?
        - r / 6.0)
    .exp())
}

/// Mass-1 splitting for `V = (λ/4)(z² - μ²/λ)²`:
/// `2^(q₀+2) μ (4μ³/λ)^(q₀/2) e^(-√8 μ³/3λ) / (√π 2^(q₀/4) [(q₀-1)/2]!)`.
pub fn splitting_mu_lambda(mu: f64, lambda: f64, q0: u32) -> Result<f64> {
    let q = require_q0(q0)?;
    if !(mu > 0.0 && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("mu and lambda must be positive, got {mu}, {lambda}")));
    }
    let r = mu.powi(3) / lambda;
    Ok(((q + 2.0 - 0.25 * q) * 2f64.ln() + mu.ln() + 0.5 * q * (4.0 * r).ln()
        - 0.5 * PI.ln()
        - ln_fact(0.5 * (q - 1.0))?
        - 8f64.sqrt() * r / 3.0)
    .exp())
}

/// The mass-1 spec `(h⁴, c²) = (2μ², λ/2)` of `V = (λ/4)(z² - μ²/λ)²`.
pub fn mu_lambda_spec(mu: f64, lambda: f64) -> Result<PotentialSpec> {
    PotentialSpec::new(Case::DoubleWell, 2.0 * mu * mu, 0.5 * lambda, Convention::One)
}

/// Level splitting of the double well at `q₀`, in the spec's convention.
pub fn level_splitting(spec: &PotentialSpec, q0: u32) -> Result<SpectralResult> {
    level_splitting_with_order(spec, q0, DEFAULT_ORDER)
}

/// [`level_splitting`] with `E₀` from an order-`order` series.
pub fn level_splitting_with_order(spec: &PotentialSpec, q0: u32, order: usize) -> Result<SpectralResult> {
    let q = require_q0(q0)?;
    let (half, back) = spec.to_half();
    half.require(Case::DoubleWell)?;
    let e0 = energy_series(Case::DoubleWell, order)?.value(q, half.h2(), half.c2);
    let splitting = splitting_half(&half, q)? * back;
    Ok(SpectralResult {
        case: Case::DoubleWell,
        q0,
        e0: e0 * back,
        q_deviation: q_deviation_double(&half, q0, DeviationRoute::Origin)?,
        imaginary_part: None,
        splitting: Some(splitting),
        exponent: half.h6_over_c2() / (6.0 * SQRT_2),
        convention: spec.convention,
        truncation_order: order,
        bender_wu: None,
        notes: vec![TRUNCATION_NOTE.to_string()],
    })
}

/// `f_n = [(1/2π)(e/(n+½))^(n+½) n!]^(-1)`.
///
/// With the `1/2π` normalisation written here Stirling's formula sends
/// `f_n` to `√(2π)`; dividing by `√(2π)` gives the variant that tends to 1.
pub fn furry_factor(n: u32) -> f64 {
    let m = n as f64 + 0.5;
    let ln = -(2.0 * PI).ln() + m * (1.0 - m.ln()) + ln_fact(n as f64).expect("n! is finite");
    (-ln).exp()
}

/// `∫_{z₀}^{z₊} [½qh₊² - ¼h₊⁴U(z)]^(1/2) dz - qπ/4`, with `z₀` the exact
/// inner root of the integrand.
pub fn wkb_quantization_residual(spec: &PotentialSpec, q: f64) -> Result<f64> {
    let (half, _) = spec.to_half();
    let s = WellScales::new(&half)?;
    let d = EllipticData::new(&half, q)?;
    let z0 = d.b;
    let level = 0.5 * q * s.h_plus_sq;
    let (c2, zp2) = (half.c2, s.z_plus * s.z_plus);
    // z = z₀ + t², dz = 2t dt
    let integrand = |t: f64| {
        let z = z0 + t * t;
        let w = z * z - zp2;
        2.0 * t * (level - 0.5 * c2 * w * w).max(0.0).sqrt()
    };
    let top = (s.z_plus - z0).sqrt();
    let value = quad::integrate(integrand, 0.0, top, 1e-13, 1e-13)?;
    Ok(value - q * PI / 4.0)
}

/// The harmonic version of the quantization integral,
/// `(h₊²/2) ∫ (2q/h₊² - (z - z₊)²)^(1/2) dz` from the harmonic turning point
/// to `z₊`, evaluated through the arcsine; equals `qπ/4`.
pub fn wkb_quantization_harmonic(spec: &PotentialSpec, q: f64) -> Result<f64> {
    let (half, _) = spec.to_half();
    let s = WellScales::new(&half)?;
    let a = (2.0 * q / s.h_plus_sq).sqrt();
    // ∫_{-a}^{0} √(a² - x²) dx = a²/2 · (x√(a²-x²)/a² + asin(x/a)) |_{-a}^{0}
    let integral = 0.5 * a * a * (0.0f64.asin() - (-1.0f64).asin());
    Ok(0.5 * s.h_plus_sq * integral)
}

/// WKB solutions to the left of `z₀` and their derivatives at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WkbOriginValues {
    pub y: f64,
    pub y_bar: f64,
    pub y_prime: f64,
    pub y_bar_prime: f64,
}

impl WkbOriginValues {
    pub fn value_ratio(&self) -> f64 {
        self.y / self.y_bar
    }

    pub fn derivative_ratio(&self) -> f64 {
        self.y_prime / self.y_bar_prime
    }
}

/// Origin values in their Stirling-reduced forms.
///
/// Each value carries `e^(±h⁶/12√2c²)`, so the individual entries overflow
/// for `h⁶/c²` beyond about 10⁴; the ratios are then better taken from
/// [`matching_constants_double`].
pub fn wkb_origin_values(spec: &PotentialSpec, q: f64) -> Result<WkbOriginValues> {
    let (half, _) = spec.to_half();
    let s = WellScales::new(&half)?;
    let ln_k = 0.25 * q * (s.ratio / SQRT_2).ln();
    let ln_depth = 0.25 * (half.h4 * half.h4 / (32.0 * half.c2)).ln();
    let half_action = s.ratio / (12.0 * SQRT_2);
    let ln_root = (2.0 * PI).sqrt().ln();
    let up = ln_fact(0.25 * (q - 1.0))?;
    let down = ln_fact(0.25 * (q - 3.0))?;
    Ok(WkbOriginValues {
        y: (ln_root + ln_k - ln_depth - up - half_action).exp(),
        y_bar: (down - ln_root - ln_k - ln_depth + half_action).exp(),
        y_prime: (ln_depth + ln_root + ln_k - up - half_action).exp(),
        y_bar_prime: -(ln_depth + down - ln_root - ln_k + half_action).exp(),
    })
}

/// `ΔE = (4/π)(∂E/∂q)(y/ȳ)(0)` with the slope from the order-`order` series.
pub fn splitting_from_origin_values(spec: &PotentialSpec, q0: u32, order: usize) -> Result<f64> {
    let q = require_q0(q0)?;
    let (half, back) = spec.to_half();
    let values = wkb_origin_values(&half, q)?;
    Ok(4.0 / PI * energy_slope(&half, q, order)? * values.value_ratio() * back)
}

/// `Δ^WKB_n = (1/π)(∂E/∂(n+½))(y/ȳ)(0)`, half of the full splitting.
pub fn wkb_restricted_splitting(spec: &PotentialSpec, q0: u32, order: usize) -> Result<f64> {
    let q = require_q0(q0)?;
    let (half, back) = spec.to_half();
    let values = wkb_origin_values(&half, q)?;
    let slope_in_n = 2.0 * energy_slope(&half, q, order)?;
    Ok(slope_in_n / PI * values.value_ratio() * back)
}

/// Left-hand side of the origin condition for each parity branch:
/// `sin(π(q+3)/4)` (even, vanishes at q₀ = 1, 5, 9, …) and
/// `cos(π(q+3)/4)` (odd, vanishes at q₀ = 3, 7, 11, …).
pub fn origin_condition(q: f64) -> (f64, f64) {
    let x = 0.25 * (q + 3.0);
    (specfun::sin_pi(x), specfun::cos_pi(x))
}

/// Slope at `q₀` of the vanishing factor at the minima:
/// `(-1)^((q₀+1)/4) π/4` from `sin(π(q+1)/4)` for q₀ ≡ 3 (mod 4) and
/// `-(-1)^((q₀-1)/4) π/4` from `cos(π(q+1)/4)` for q₀ ≡ 1 (mod 4).
pub fn minimum_condition_slope(q0: u32) -> Result<f64> {
    require_q0(q0)?;
    let sign = |k: u32| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(if q0 % 4 == 3 { sign((q0 + 1) / 4) * PI / 4.0 } else { -sign((q0 - 1) / 4) * PI / 4.0 })
}

/// Which leading-order branch to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    /// `y_A`, away from the minima (double well) or the origin (inverted well)
    A,
    /// `ȳ_A(z) = y_A(-z)`
    ABar,
    /// `y_B`, parabolic-cylinder branch near `z₊` (double well) or the origin
    B,
    /// `ȳ_B(z) = y_B(-z)`
    BBar,
    /// `½(y_A + ȳ_A)`
    Even,
    /// `½(y_A - ȳ_A)`
    Odd,
}

/// A possibly huge or tiny value stored as sign and log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavefunctionValue {
    pub sign: f64,
    pub ln_abs: f64,
    /// false when `z` lies outside the validity domain of the branch
    pub in_domain: bool,
}

impl WavefunctionValue {
    fn zero(in_domain: bool) -> Self {
        Self { sign: 0.0, ln_abs: f64::NEG_INFINITY, in_domain }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

/// `|x|^p` with the sign of `x^p` when `p` is an integer.
fn signed_power(x: f64, p: f64) -> (f64, f64) {
    let sign = if x < 0.0 && p.fract() == 0.0 && (p as i64) % 2 != 0 { -1.0 } else { 1.0 };
    (sign, p * x.abs().ln())
}

/// `½(a ± b)` in log space.
fn half_combination(a: WavefunctionValue, b: WavefunctionValue, plus: bool) -> WavefunctionValue {
    let bs = if plus { b.sign } else { -b.sign };
    let in_domain = a.in_domain && b.in_domain;
    if a.sign == 0.0 && bs == 0.0 {
        return WavefunctionValue::zero(in_domain);
    }
    let m = a.ln_abs.max(b.ln_abs);
    let sum = a.sign * (a.ln_abs - m).exp() + bs * (b.ln_abs - m).exp();
    if sum == 0.0 {
        return WavefunctionValue::zero(in_domain);
    }
    WavefunctionValue { sign: sum.signum(), ln_abs: m + (0.5 * sum.abs()).ln(), in_domain }
}

fn branch_a(half: &PotentialSpec, q: f64, z: f64) -> Result<WavefunctionValue> {
    let c = half.c();
    match half.case {
        Case::DoubleWell => {
            let s = WellScales::new(half)?;
            let (dm, dp) = (z - s.z_plus, z + s.z_plus);
            if dm == 0.0 {
                return Ok(WavefunctionValue::zero(false));
            }
            let ln_a = 0.5 * (q - 1.0) * dm.abs().ln() - 0.5 * (q + 1.0) * dp.abs().ln();
            let exponent = -(c * z.powi(3) / 3.0 - half.h4 * z / (4.0 * c)) / SQRT_2;
            let width = 1.0 / s.h_plus;
            let in_domain = dm.abs() > width && dp.abs() > width;
            Ok(WavefunctionValue { sign: 1.0, ln_abs: ln_a + exponent, in_domain })
        }
        Case::InvertedDoubleWell => {
            let x = 2.0 * half.c2 * z * z / half.h4;
            if x > 1.0 {
                return Err(Error::OutOfRegime(format!("z = {z} lies beyond the hump")));
            }
            if z == 0.0 {
                return Ok(WavefunctionValue::zero(false));
            }
            let exponent = half.h6_over_c2() / 12.0 * (1.0 - x).powf(1.5);
            let (sign, ln_pow) = signed_power(z, 0.5 * (q - 1.0));
            let in_domain = z.abs() * half.h() > 1.0 && x < 0.5;
            Ok(WavefunctionValue { sign, ln_abs: ln_pow + exponent, in_domain })
        }
        Case::BoundedQuartic => Err(Error::WrongCase { expected: "double or inverted double well", got: half.case }),
    }
}

fn branch_b(half: &PotentialSpec, q: f64, z: f64) -> Result<WavefunctionValue> {
    let (w, in_domain) = match half.case {
        Case::DoubleWell => {
            let s = WellScales::new(half)?;
            let w = s.h_plus * (z - s.z_plus);
            (w, w.abs() >= 1.0 && (z - s.z_plus).abs() < 0.5 * s.z_plus)
        }
        Case::InvertedDoubleWell => {
            let w = half.h() * z;
            (w, w.abs() >= 1.0 && 2.0 * half.c2 * z * z / half.h4 < 0.5)
        }
        Case::BoundedQuartic => {
            return Err(Error::WrongCase { expected: "double or inverted double well", got: half.case })
        }
    };
    if w == 0.0 {
        return Ok(WavefunctionValue::zero(in_domain));
    }
    // D_ν(w) ≈ w^ν e^(-w²/4), normalised by [(q-1)/4]! 2^((q-1)/4)
    let (sign, ln_pow) = signed_power(w, 0.5 * (q - 1.0));
    let ln = ln_pow - 0.25 * w * w - ln_fact(0.25 * (q - 1.0))? - 0.25 * (q - 1.0) * 2f64.ln();
    Ok(WavefunctionValue { sign, ln_abs: ln, in_domain })
}

/// Leading-order branch value at `z`. Outside the validity domain the value
/// is still returned, with `in_domain = false`.
pub fn eval_wavefunction_leading(spec: &PotentialSpec, q: f64, z: f64, kind: WaveKind) -> Result<WavefunctionValue> {
    let (half, _) = spec.to_half();
    match kind {
        WaveKind::A => branch_a(&half, q, z),
        WaveKind::ABar => branch_a(&half, q, -z),
        WaveKind::B => branch_b(&half, q, z),
        WaveKind::BBar => branch_b(&half, q, -z),
        WaveKind::Even => Ok(half_combination(branch_a(&half, q, z)?, branch_a(&half, q, -z)?, true)),
        WaveKind::Odd => Ok(half_combination(branch_a(&half, q, z)?, branch_a(&half, q, -z)?, false)),
    }
}
