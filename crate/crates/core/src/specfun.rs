//! Gamma kernel, parabolic-cylinder values at the origin and complete
//! elliptic integrals.
//!
//! Factorials follow the physics convention `z! = Γ(z + 1)` and are
//! evaluated for real, possibly negative, quarter-integer arguments.

use crate::error::{Error, Result};
use crate::model::{Case, PotentialSpec};
use crate::phase::Phased;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

const POLE_TOL: f64 = 1e-12;

/// `sin(πx)`, exact at integers and half-integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round(); // r in [-1, 1]
    if r == 0.0 || r.abs() == 1.0 {
        0.0
    } else if r == 0.5 {
        1.0
    } else if r == -0.5 {
        -1.0
    } else {
        (PI * r).sin()
    }
}

/// `cos(πx)`, exact at integers and half-integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// True when `x` is (numerically) a nonpositive integer.
pub fn is_gamma_pole(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() <= POLE_TOL * x.abs().max(1.0)
}

/// `ln|Γ(x)|`. Poles of Γ are reported as [`Error::Pole`].
pub fn log_gamma(x: f64) -> Result<f64> {
    Ok(log_gamma_signed(x)?.0)
}

/// `(ln|Γ(x)|, sign Γ(x))`.
pub fn log_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if is_gamma_pole(x) {
        return Err(Error::Pole(x));
    }
    if x >= 0.5 {
        return Ok((statrs::function::gamma::ln_gamma(x), 1.0));
    }
    // Γ(x) Γ(1-x) = π / sin(πx), with Γ(1-x) > 0 here.
    let s = sin_pi(x);
    let lg = PI.ln() - s.abs().ln() - statrs::function::gamma::ln_gamma(1.0 - x);
    Ok((lg, s.signum()))
}

pub fn gamma(x: f64) -> Result<f64> {
    let (lg, sign) = log_gamma_signed(x)?;
    Ok(sign * lg.exp())
}

/// `z! = Γ(z + 1)`.
pub fn factorial(z: f64) -> Result<f64> {
    gamma(z + 1.0)
}

/// `1/z!`, which is zero at the poles of the factorial.
pub fn reciprocal_factorial(z: f64) -> f64 {
    match log_gamma_signed(z + 1.0) {
        Ok((lg, sign)) => sign * (-lg).exp(),
        Err(_) => 0.0,
    }
}

/// `[num]! / [den]!` evaluated through log-gamma differences.
///
/// A pole in the denominator alone gives zero. When both are poles the
/// finite limit along a common shift is returned.
pub fn factorial_ratio(num: f64, den: f64) -> Result<f64> {
    match (log_gamma_signed(num + 1.0), log_gamma_signed(den + 1.0)) {
        (Ok((ln, sn)), Ok((ld, sd))) => Ok(sn * sd * (ln - ld).exp()),
        (Ok(_), Err(_)) => Ok(0.0),
        (Err(_), Ok(_)) => Err(Error::Pole(num + 1.0)),
        (Err(_), Err(_)) => {
            // Γ(-m+ε)/Γ(-k+ε) → (-1)^(k-m) k!/m!
            let m = -(num + 1.0).round();
            let k = -(den + 1.0).round();
            let sign = if ((k - m) as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            Ok(sign * factorial_ratio(k, m)?)
        }
    }
}

/// `[-(q+1)/4]!` through the reflection formula
/// `[-(q+1)/4]! = π / ([(q-3)/4]! sin(π(q+1)/4))`.
pub fn reflection_ratio(q: f64) -> Result<f64> {
    let s = sin_pi(0.25 * (q + 1.0));
    let partner = 0.25 * (q - 3.0);
    match factorial(partner) {
        Ok(f) if s != 0.0 => Ok(PI / (f * s)),
        Ok(_) => Err(Error::Pole(-0.25 * (q + 1.0) + 1.0)),
        // 1/∞ · 1/0 is indeterminate; fall back to the direct evaluation.
        Err(_) => factorial(-0.25 * (q + 1.0)),
    }
}

/// `(D_ν(0), D'_ν(0))` for `ν = (q-1)/2`.
pub fn pcf_origin(q: f64) -> (f64, f64) {
    let sqrt_pi = PI.sqrt();
    let value = sqrt_pi * 2f64.powf(0.25 * (q - 1.0)) * reciprocal_factorial(-0.25 * (q + 1.0));
    let slope = -sqrt_pi * 2f64.powf(0.25 * (q + 1.0)) * reciprocal_factorial(-0.25 * (q + 3.0));
    (value, slope)
}

/// Origin values of the normalised parabolic-cylinder solutions `B_q` and
/// `C̄_q` and their `w`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OriginValues {
    pub b: f64,
    pub c_bar: f64,
    pub b_prime: f64,
    /// `C̄_q'(0)` is purely imaginary; stored as magnitude plus phase.
    pub c_bar_prime: Phased,
}

/// `B_q(0)` from `D_ν(0) / ([(q-1)/4]! 2^((q-1)/4))`.
pub fn b_origin_from_pcf(q: f64) -> f64 {
    pcf_origin(q).0 * reciprocal_factorial(0.25 * (q - 1.0)) * 2f64.powf(-0.25 * (q - 1.0))
}

/// `C̄_q(0)` from the value of `D_{-(q+1)/2}` at the origin,
/// `√π 2^(-(q+1)/4) / [(q-1)/4]!`, divided by `2^(-(q+1)/4) [-(q+1)/4]!`.
pub fn c_bar_origin_from_pcf(q: f64) -> f64 {
    PI.sqrt() * reciprocal_factorial(0.25 * (q - 1.0)) * reciprocal_factorial(-0.25 * (q + 1.0))
}

/// `D_{-(q+1)/2}(0)` from the circuit relation,
/// `√(π/2) D_{(q-1)/2}(0) / ([(q-1)/2]! cos(π(q-1)/4))`.
pub fn pcf_origin_conjugate_via_circuit(q: f64) -> Result<f64> {
    let c = cos_pi(0.25 * (q - 1.0));
    if c == 0.0 {
        return Err(Error::Pole(0.25 * (q - 1.0)));
    }
    Ok((PI / 2.0).sqrt() * pcf_origin(q).0 * reciprocal_factorial(0.5 * (q - 1.0)) / c)
}

/// The four origin values in their closed sine forms.
pub fn bq_cq_origin(q: f64) -> Result<OriginValues> {
    let s_plus1 = sin_pi(0.25 * (q + 1.0));
    let b = factorial_ratio(0.25 * (q - 3.0), 0.25 * (q - 1.0))? * s_plus1 / PI.sqrt();
    let c_bar = c_bar_origin_from_pcf(q);
    let k = (2.0 / PI).sqrt();
    let b_prime = -k * sin_pi(0.25 * (q + 3.0));
    let c_bar_prime = Phased::imaginary(k * sin_pi(0.25 * (q - 3.0)));
    Ok(OriginValues { b, c_bar, b_prime, c_bar_prime })
}

/// `(K(k), E(k))` by the arithmetic–geometric mean, `k2 = k²`.
pub fn elliptic_ke(k2: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&k2) {
        if k2 == 1.0 {
            return Err(Error::InvalidParameter("K(k) diverges at k² = 1".into()));
        }
        return Err(Error::InvalidParameter(format!("k² must lie in [0, 1), got {k2}")));
    }
    let mut a = 1.0;
    let mut b = (1.0 - k2).sqrt();
    let mut sum = 0.5 * k2; // Σ 2^(n-1) c_n², c_0² = k²
    let mut weight = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        weight *= 2.0;
        sum += weight * c * c;
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        // a and b can end up oscillating one ulp apart; stop there.
        if c.abs() <= f64::EPSILON * a {
            break;
        }
    }
    let k = FRAC_PI_2 / a;
    Ok((k, k * (1.0 - sum)))
}

/// Logarithmic small-`k′` expansions of `(K, E)`.
pub fn ke_small_kprime(kprime2: f64) -> Result<(f64, f64)> {
    if !(kprime2 > 0.0 && kprime2 <= 0.2) {
        return Err(Error::OutOfRegime(format!("k'² must lie in (0, 0.2], got {kprime2}")));
    }
    let l = (4.0 / kprime2.sqrt()).ln();
    let k = l + 0.25 * (l - 1.0) * kprime2;
    let e = 1.0 + 0.5 * (l - 0.5) * kprime2 + 3.0 / 16.0 * (l - 13.0 / 12.0) * kprime2 * kprime2;
    Ok((k, e))
}

/// Modulus data of the barrier action integral for a double well at level `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticData {
    /// `G = (8√2 c²/h⁶)^(1/2)`
    pub g: f64,
    /// `u = G √(2q)`
    pub u: f64,
    pub k2: f64,
    pub kprime2: f64,
    /// outer root of the integrand, `a = (h²/2c)(1+u)^(1/2)`
    pub a: f64,
    /// inner root, `b² = h⁴/4c² - √q h₊/c`
    pub b: f64,
}

impl EllipticData {
    pub fn new(spec: &PotentialSpec, q: f64) -> Result<Self> {
        spec.require(Case::DoubleWell)?;
        if q.is_nan() || q <= 0.0 {
            return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
        }
        let g = (8.0 * SQRT_2 * spec.c2 / spec.h6()).sqrt();
        let u = g * (2.0 * q).sqrt();
        if u >= 1.0 {
            return Err(Error::OutOfRegime(format!("u = G√(2q) = {u} ≥ 1")));
        }
        let z_plus = spec.h2() / (2.0 * spec.c());
        let h_plus = 2f64.powf(0.25) * spec.h();
        let b2 = spec.h4 / (4.0 * spec.c2) - q.sqrt() * h_plus / spec.c();
        Ok(Self {
            g,
            u,
            k2: (1.0 - u) / (1.0 + u),
            kprime2: 2.0 * u / (1.0 + u),
            a: z_plus * (1.0 + u).sqrt(),
            b: b2.sqrt(),
        })
    }
}

/// Barrier integral `I₂(0) = (2/3G²)(1+u)^(1/2)[E(k) - u K(k)]`.
pub fn i2_exact(spec: &PotentialSpec, q: f64) -> Result<f64> {
    let d = EllipticData::new(spec, q)?;
    let (k, e) = elliptic_ke(d.k2)?;
    Ok(2.0 / (3.0 * d.g * d.g) * (1.0 + d.u).sqrt() * (e - d.u * k))
}

/// Small-`u` form of `I₂(0)` at `q = 2n+1`, positive branch:
/// `2/3G² + (n+½) ln(G/4) + ½(n+½) ln(n+½) - ½(n+½)`.
///
/// Some literature versions of this expansion differ by an n-dependent
/// power of 2 inside the logarithm; this is the form consistent with
/// [`i2_exact`].
pub fn i2_expansion(spec: &PotentialSpec, n: u32) -> Result<f64> {
    let q = 2.0 * n as f64 + 1.0;
    let d = EllipticData::new(spec, q)?;
    if d.u > 0.2 {
        return Err(Error::OutOfRegime(format!("expansion requires u ≤ 0.2, got {}", d.u)));
    }
    let m = n as f64 + 0.5;
    Ok(2.0 / (3.0 * d.g * d.g) + m * (d.g / 4.0).ln() + 0.5 * m * m.ln() - 0.5 * m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn sin_pi_exact_points() {
        assert_eq!(sin_pi(1.0), 0.0);
        assert_eq!(sin_pi(-3.0), 0.0);
        assert_eq!(sin_pi(2.5), 1.0);
        assert_eq!(sin_pi(-0.5), -1.0);
        assert_eq!(cos_pi(0.5), 0.0);
        assert_eq!(cos_pi(1.0), -1.0);
        assert!((sin_pi(0.25) - 0.5f64.sqrt()).abs() < 2e-16);
    }

    #[test]
    fn log_gamma_known_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-15);
        assert!((log_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-15);
        // Γ(n) = (n-1)!
        let mut fact = 1.0f64;
        for n in 1..40 {
            if n > 1 {
                fact *= (n - 1) as f64;
            }
            let lg = log_gamma(n as f64).unwrap();
            if n > 3 {
                assert!(rel(lg, fact.ln()) < 1e-13, "n={n}");
            } else {
                assert!((lg - fact.ln()).abs() < 1e-14);
            }
        }
        // Γ(n+½) = (2n)! √π / (4^n n!)
        for n in 1..20u32 {
            let exact = (1..=2 * n).map(|k| (k as f64).ln()).sum::<f64>() + 0.5 * PI.ln()
                - n as f64 * 4f64.ln()
                - (1..=n).map(|k| (k as f64).ln()).sum::<f64>();
            let lg = log_gamma(n as f64 + 0.5).unwrap();
            assert!((lg - exact).abs() <= 1e-12 * exact.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn gamma_reflection_at_0_3() {
        let x = 0.3;
        let lhs = gamma(x).unwrap() * gamma(1.0 - x).unwrap();
        assert!(rel(lhs, PI / (PI * x).sin()) < 1e-12);
    }

    #[test]
    fn gamma_negative_arguments() {
        assert!(rel(gamma(-0.5).unwrap(), -2.0 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma(-1.5).unwrap(), 4.0 / 3.0 * PI.sqrt()) < 1e-14);
        assert!(matches!(gamma(0.0), Err(Error::Pole(_))));
        assert!(matches!(gamma(-2.0), Err(Error::Pole(_))));
        assert_eq!(reciprocal_factorial(-1.0), 0.0);
    }

    #[test]
    fn factorial_ratio_poles() {
        assert_eq!(factorial_ratio(0.5, -1.0).unwrap(), 0.0);
        assert!(matches!(factorial_ratio(-1.0, 0.5), Err(Error::Pole(_))));
        // Γ(-1+ε)/Γ(-2+ε) → -2
        assert!((factorial_ratio(-2.0, -3.0).unwrap() + 2.0).abs() < 1e-14);
        assert!((factorial_ratio(3.0, 1.0).unwrap() - 6.0).abs() < 1e-13);
    }

    #[test]
    fn reflection_ratio_examples() {
        assert!(rel(reflection_ratio(1.0).unwrap(), PI.sqrt()) < 1e-14);
        let direct = factorial(-0.25).unwrap();
        assert!(rel(reflection_ratio(0.0).unwrap(), direct) < 1e-13);
        assert!(matches!(reflection_ratio(3.0), Err(Error::Pole(_))));
        for &q in &[0.3, 2.2, 5.5, 9.1] {
            let direct = factorial(-0.25 * (q + 1.0)).unwrap();
            assert!(rel(reflection_ratio(q).unwrap(), direct) < 1e-12, "q={q}");
        }
    }

    #[test]
    fn pcf_origin_hermite_values() {
        let (d0, d0p) = pcf_origin(1.0);
        assert!((d0 - 1.0).abs() < 1e-14 && d0p.abs() < 1e-14);
        let (d1, d1p) = pcf_origin(3.0);
        assert!(d1.abs() < 1e-14 && (d1p - 1.0).abs() < 1e-14);
        let (d2, d2p) = pcf_origin(5.0);
        assert!((d2 + 1.0).abs() < 1e-14 && d2p.abs() < 1e-14);
    }

    #[test]
    fn origin_values() {
        let v = bq_cq_origin(1.0).unwrap();
        assert!((v.b - 1.0).abs() < 1e-14);
        assert!((v.c_bar - 1.0).abs() < 1e-14);
        assert_eq!(v.b_prime, 0.0);
        for &q in &[0.5, 1.0, 2.0, 3.5, 5.0, 6.3] {
            let v = bq_cq_origin(q).unwrap();
            assert!((v.b / v.c_bar - 1.0).abs() < 1e-12, "q={q}");
            assert!((v.b - b_origin_from_pcf(q)).abs() < 1e-13 * v.b.abs().max(1.0));
        }
    }

    #[test]
    fn derivative_forms_agree() {
        for &q in &[0.5, 2.0, 3.5, 5.0, 7.25] {
            let v = bq_cq_origin(q).unwrap();
            let b_prime = -(2.0 * PI).sqrt()
                * reciprocal_factorial(0.25 * (q - 1.0))
                * reciprocal_factorial(-0.25 * (q + 3.0));
            assert!((v.b_prime - b_prime).abs() < 1e-13, "q={q}");
            let c_prime = -(2.0 * PI).sqrt()
                * reciprocal_factorial(-0.25 * (q + 1.0))
                * reciprocal_factorial(0.25 * (q - 3.0));
            assert!((v.c_bar_prime.as_imaginary().unwrap() - c_prime).abs() < 1e-13, "q={q}");
            // sin(π(q-3)/4) = -sin(π(q+1)/4)
            assert!((sin_pi(0.25 * (q - 3.0)) + sin_pi(0.25 * (q + 1.0))).abs() < 1e-15);
        }
    }

    #[test]
    fn circuit_identity() {
        for &q in &[0.5, 2.0, 4.5, 6.0, 8.5] {
            let lhs = pcf_origin_conjugate_via_circuit(q).unwrap();
            let rhs = PI.sqrt() * 2f64.powf(-0.25 * (q + 1.0)) * reciprocal_factorial(0.25 * (q - 1.0));
            assert!((lhs - rhs).abs() < 1e-12 * rhs.abs(), "q={q}");
        }
    }

    #[test]
    fn duplication_formula() {
        let mut z = 0.25;
        while z <= 10.0 {
            let lhs = PI.sqrt() * factorial(2.0 * z).unwrap();
            let rhs = 2f64.powf(2.0 * z) * factorial(z).unwrap() * factorial(z - 0.5).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "z={z}");
            z += 0.25;
        }
    }

    #[test]
    fn elliptic_reference_values() {
        let (k, e) = elliptic_ke(0.0).unwrap();
        assert!((k - FRAC_PI_2).abs() < 1e-15 && (e - FRAC_PI_2).abs() < 1e-15);
        let (k, e) = elliptic_ke(0.5).unwrap();
        assert!((k - 1.854_074_677_301_372).abs() < 1e-13);
        assert!((e - 1.350_643_881_047_675_5).abs() < 1e-13);
        let (_, e) = elliptic_ke(1.0 - 1e-12).unwrap();
        assert!((e - 1.0).abs() < 1e-10);
        assert!(elliptic_ke(1.0).is_err());
    }

    #[test]
    fn elliptic_against_quadrature() {
        for &k2 in &[0.1, 0.37, 0.8, 0.95] {
            let (k, e) = elliptic_ke(k2).unwrap();
            let kq = crate::quad::integrate(|t: f64| 1.0 / (1.0 - k2 * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-15, 1e-14)
                .unwrap();
            let eq = crate::quad::integrate(|t: f64| (1.0 - k2 * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-15, 1e-14)
                .unwrap();
            assert!(rel(k, kq) < 1e-12 && rel(e, eq) < 1e-12, "k2={k2}");
        }
    }

    #[test]
    fn legendre_relation() {
        for i in 1..10 {
            let k2 = i as f64 / 10.0;
            let (k, e) = elliptic_ke(k2).unwrap();
            let (kp, ep) = elliptic_ke(1.0 - k2).unwrap();
            assert!((e * kp + ep * k - k * kp - FRAC_PI_2).abs() < 1e-10);
        }
    }

    #[test]
    fn small_kprime_expansions() {
        let kp2 = 0.01;
        let (k_exp, _) = ke_small_kprime(kp2).unwrap();
        let (k_agm, _) = elliptic_ke(1.0 - kp2).unwrap();
        let l = (4.0 / kp2.sqrt()).ln();
        assert!((k_exp - k_agm).abs() <= 10.0 * kp2 * kp2 * l);
        let kp2 = 0.04;
        let (_, e_exp) = ke_small_kprime(kp2).unwrap();
        let (_, e_agm) = elliptic_ke(1.0 - kp2).unwrap();
        let l = (4.0 / kp2.sqrt()).ln();
        assert!((e_exp - e_agm).abs() <= kp2.powi(3) * l);
        // leading terms
        let (k_exp, e_exp) = ke_small_kprime(1e-12).unwrap();
        assert!((k_exp - (4.0 / 1e-6f64).ln()).abs() < 1e-9);
        assert!((e_exp - 1.0).abs() < 1e-9);
        assert!(ke_small_kprime(0.3).is_err());
    }

    #[test]
    fn elliptic_data_invariants() {
        let s = PotentialSpec::half(Case::DoubleWell, 16.0, 1.0).unwrap();
        let d = EllipticData::new(&s, 1.0).unwrap();
        assert!((d.g * d.g - 0.176_776_695_296_636_9).abs() < 1e-12);
        assert!((d.u - 0.594_603_557_501_360_5).abs() < 1e-12);
        assert!((d.k2 + d.kprime2 - 1.0).abs() < 1e-15);
        assert!(d.b < d.a);
        assert!((d.b * d.b / (d.a * d.a) - d.k2).abs() < 1e-13);
        assert!(matches!(EllipticData::new(&s, 5.0), Err(Error::OutOfRegime(_))));
    }

    #[test]
    fn i2_limits_and_monotonicity() {
        let s = PotentialSpec::half(Case::DoubleWell, 100.0, 1.0).unwrap();
        let v: Vec<f64> = [1.0, 3.0, 5.0].iter().map(|&q| i2_exact(&s, q).unwrap()).collect();
        assert!(v[0] > v[1] && v[1] > v[2]);
        let d = EllipticData::new(&s, 1e-10).unwrap();
        let lim = 2.0 / (3.0 * d.g * d.g);
        assert!((i2_exact(&s, 1e-10).unwrap() - lim).abs() < 1e-4 * lim);
    }

    #[test]
    fn i2_expansion_arithmetic() {
        // G = 0.1 at c² = 1: h⁶ = 8√2/G²
        let h6 = 8.0 * SQRT_2 / 0.01;
        let s = PotentialSpec::half(Case::DoubleWell, h6.powf(2.0 / 3.0), 1.0).unwrap();
        let direct = 200.0 / 3.0 + 0.5 * 0.025f64.ln() + 0.25 * 0.5f64.ln() - 0.25;
        let v = i2_expansion(&s, 0).unwrap();
        assert!((v - direct).abs() < 1e-9 * direct);
        assert!((v - i2_exact(&s, 1.0).unwrap()).abs() < 1e-4 * direct);
    }

    #[test]
    fn i2_expansion_guards_regime() {
        let s = PotentialSpec::half(Case::DoubleWell, 16.0, 1.0).unwrap();
        assert!(matches!(i2_expansion(&s, 0), Err(Error::OutOfRegime(_))));
        let b = PotentialSpec::half(Case::BoundedQuartic, 16.0, 1.0).unwrap();
        assert!(matches!(i2_exact(&b, 1.0), Err(Error::WrongCase { .. })));
    }
}
