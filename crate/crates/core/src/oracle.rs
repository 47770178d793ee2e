//! Independent ground truth: a finite-difference eigensolver for the real
//! spectra and an exact-rational Rayleigh–Schrödinger engine.
//!
//! The grid solver discretises `-y'' + V y = E y` (Half convention) on a
//! Dirichlet box with second-order central differences and finds
//! eigenvalues by Sturm-sequence bisection. Energies for a One-convention
//! spec are obtained from the mapped Half-convention problem.

use crate::error::{Error, Result};
use crate::model::{Case, PotentialSpec};
use crate::quad;
use crate::series::{int, ratio, AsymptoticSeries, QPolynomial, SeriesTerm};
use crate::specfun::EllipticData;
use num::rational::BigRational;
use num::traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;

/// Energy margin by which the potential at the box edge must exceed the
/// highest requested eigenvalue.
pub const WALL_MARGIN: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    /// Box is `[-half_width, half_width]`.
    pub half_width: f64,
    /// Grid points including both walls.
    pub points: usize,
    pub boundary: Boundary,
    /// Bisection stops at `tolerance * max(1, |E|)`.
    pub tolerance: f64,
    /// Also solve on `2N - 1` points and extrapolate.
    pub richardson: bool,
}

impl GridConfig {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidParameter(format!("half_width must be positive, got {half_width}")));
        }
        if points < 3 {
            return Err(Error::InvalidParameter(format!("need at least 3 grid points, got {points}")));
        }
        Ok(Self { half_width, points, boundary: Boundary::Dirichlet, tolerance: 1e-10, richardson: true })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    /// Picks a box wide enough that the `k` lowest states have decayed by
    /// roughly `e^-30` at the walls.
    pub fn for_spec(spec: &PotentialSpec, k: usize, points: usize) -> Result<Self> {
        let (half, _) = spec.to_half();
        if half.case == Case::InvertedDoubleWell {
            return Err(Error::WrongCase { expected: "bounded quartic or double well", got: half.case });
        }
        let e_est = energy_ceiling(&half, k);
        let v = |z: f64| half.potential_value(z);
        // outermost classical turning point
        let mut hi = 1.0;
        while v(hi) <= e_est {
            hi *= 2.0;
        }
        let mut lo = match half.case {
            Case::DoubleWell => half.landmarks()?.z_plus,
            _ => 0.0,
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if v(mid) > e_est {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let turning = hi;
        // march outward until the WKB decay exponent reaches 30
        let step = turning.max(1e-3) * 1e-3;
        let mut z = turning;
        let mut action = 0.0;
        while action < 30.0 || v(z) < e_est + WALL_MARGIN {
            action += (v(z + 0.5 * step) - e_est).max(0.0).sqrt() * step;
            z += step;
        }
        Self::new(z, points)
    }
}

/// Generous upper estimate of the `k`-th level (0-based).
fn energy_ceiling(spec: &PotentialSpec, k: usize) -> f64 {
    let q = 2.0 * k as f64 + 1.0;
    let quartic_wkb = (0.5 * q * std::f64::consts::PI / (1.748 * (2.0 / spec.c2).powf(0.25))).powf(4.0 / 3.0);
    match spec.case {
        Case::DoubleWell => {
            let lm = spec.landmarks().expect("double well has landmarks");
            lm.v_at_extremum + 0.5 * q * lm.h_plus_sq + quartic_wkb
        }
        _ => 0.5 * q * spec.h2() + quartic_wkb,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    /// Eigenvalues on the `N`-point grid, ascending.
    pub eigenvalues: Vec<f64>,
    /// Richardson estimates from `N` and `2N-1` points.
    pub richardson: Option<Vec<f64>>,
    /// `(E_even, E_odd)` for consecutive pairs of the best estimates.
    pub splitting_pairs: Vec<(f64, f64)>,
    pub parities: Vec<Parity>,
    pub config: GridConfig,
}

impl OracleResult {
    /// Richardson values when available, raw grid values otherwise.
    pub fn best(&self) -> &[f64] {
        self.richardson.as_deref().unwrap_or(&self.eigenvalues)
    }
}

/// Symmetric tridiagonal finite-difference Hamiltonian on the interior points.
#[derive(Debug, Clone)]
pub struct GridOperator {
    pub z: Vec<f64>,
    pub diag: Vec<f64>,
    /// constant off-diagonal `-1/Δz²`
    pub off: f64,
}

impl GridOperator {
    pub fn new<V: Fn(f64) -> f64>(potential: V, half_width: f64, points: usize) -> Self {
        let dz = 2.0 * half_width / (points - 1) as f64;
        let kinetic = 2.0 / (dz * dz);
        let z: Vec<f64> = (1..points - 1).map(|i| -half_width + i as f64 * dz).collect();
        let diag = z.iter().map(|&x| kinetic + potential(x)).collect();
        Self { z, diag, off: -1.0 / (dz * dz) }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let e2 = self.off * self.off;
        let mut count = 0;
        let mut p = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            p = if i == 0 { d - x } else { d - x - e2 / p };
            if p == 0.0 {
                p = -f64::EPSILON * (d.abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if p < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `index`-th eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, index: usize, tolerance: f64) -> Result<f64> {
        let spread = 2.0 * self.off.abs();
        let mut lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - spread;
        let mut hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + spread;
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tolerance * mid.abs().max(1.0) || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::Bisection { lo, hi })
    }

    /// Eigenvector near `energy` by inverse iteration.
    pub fn eigenvector(&self, energy: f64) -> Vec<f64> {
        let n = self.dim();
        let shift = energy - 1e-9 * energy.abs().max(1.0);
        // asymmetric start so both parities are represented
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 / n as f64).collect();
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        // Thomas algorithm
        let n = self.dim();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let guard = |v: f64| if v == 0.0 { f64::EPSILON } else { v };
        let mut m = guard(self.diag[0] - shift);
        c[0] = self.off / m;
        d[0] = rhs[0] / m;
        for i in 1..n {
            m = guard(self.diag[i] - shift - self.off * c[i - 1]);
            c[i] = self.off / m;
            d[i] = (rhs[i] - self.off * d[i - 1]) / m;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }

    pub fn parity(&self, energy: f64) -> Parity {
        let v = self.eigenvector(energy);
        let n = v.len();
        let (mut sym, mut anti) = (0.0, 0.0);
        for i in 0..n / 2 {
            sym += (v[i] - v[n - 1 - i]).abs();
            anti += (v[i] + v[n - 1 - i]).abs();
        }
        if sym < anti {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Lowest `k` eigenvalues of an arbitrary potential in the Half convention.
pub fn eig_lowest_potential<V: Fn(f64) -> f64>(potential: V, config: &GridConfig, k: usize) -> Result<OracleResult> {
    let interior = config.points.saturating_sub(2);
    if k == 0 || k > interior {
        return Err(Error::TooManyEigenvalues { requested: k, points: config.points });
    }
    let coarse = GridOperator::new(&potential, config.half_width, config.points);
    let eigenvalues = (0..k).map(|i| coarse.eigenvalue(i, config.tolerance)).collect::<Result<Vec<_>>>()?;
    let top = eigenvalues[k - 1];
    let wall = potential(config.half_width).min(potential(-config.half_width));
    if wall < top + WALL_MARGIN {
        return Err(Error::InvalidParameter(format!(
            "box too small: V(±L) = {wall} does not exceed E = {top} by {WALL_MARGIN}"
        )));
    }
    let parities = eigenvalues.iter().map(|&e| coarse.parity(e)).collect();
    let richardson = if config.richardson {
        let fine = GridOperator::new(&potential, config.half_width, 2 * config.points - 1);
        let fine_values = (0..k).map(|i| fine.eigenvalue(i, config.tolerance)).collect::<Result<Vec<_>>>()?;
        Some(fine_values.iter().zip(&eigenvalues).map(|(f, c)| (4.0 * f - c) / 3.0).collect())
    } else {
        None
    };
    let mut result = OracleResult { eigenvalues, richardson, splitting_pairs: Vec::new(), parities, config: *config };
    result.splitting_pairs = result.best().chunks_exact(2).map(|p| (p[0], p[1])).collect();
    Ok(result)
}

/// Lowest `k` eigenvalues of a bounded quartic or double well, in the
/// spec's own convention.
pub fn eig_lowest(spec: &PotentialSpec, config: &GridConfig, k: usize) -> Result<OracleResult> {
    if spec.case == Case::InvertedDoubleWell {
        return Err(Error::WrongCase { expected: "bounded quartic or double well", got: spec.case });
    }
    let (half, back) = spec.to_half();
    let mut result = eig_lowest_potential(|z| half.potential_value(z), config, k)?;
    if back != 1.0 {
        let scale = |v: &mut Vec<f64>| v.iter_mut().for_each(|e| *e *= back);
        scale(&mut result.eigenvalues);
        if let Some(r) = result.richardson.as_mut() {
            scale(r);
        }
        result.splitting_pairs.iter_mut().for_each(|(a, b)| {
            *a *= back;
            *b *= back;
        });
    }
    Ok(result)
}

/// `E_{2n+1} - E_{2n}` of a double well, Richardson-extrapolated when enabled.
pub fn splitting_numeric(spec: &PotentialSpec, config: &GridConfig, n: usize) -> Result<f64> {
    spec.require(Case::DoubleWell)?;
    let result = eig_lowest(spec, config, 2 * n + 2)?;
    let (even, odd) = result.splitting_pairs[n];
    let gap = odd - even;
    let resolution = 4.0 * config.tolerance * even.abs().max(1.0);
    if gap <= resolution {
        return Err(Error::Unresolved { pair: n, value: gap, tolerance: resolution });
    }
    Ok(gap)
}

type State = BTreeMap<usize, BigRational>;

fn add_scaled(acc: &mut State, v: &State, s: &BigRational) {
    for (&m, c) in v {
        let e = acc.entry(m).or_insert_with(BigRational::zero);
        *e += c * s;
    }
}

/// `X = b + b†` on the unnormalised basis `|m) = (b†)^m |0⟩`.
fn apply_x(v: &State) -> State {
    let mut out = State::new();
    for (&m, c) in v {
        *out.entry(m + 1).or_insert_with(BigRational::zero) += c;
        if m > 0 {
            *out.entry(m - 1).or_insert_with(BigRational::zero) += c * int(m as i64);
        }
    }
    out
}

fn apply_x_power(v: &State, power: u32) -> State {
    (0..power).fold(v.clone(), |acc, _| apply_x(&acc))
}

/// Rayleigh–Schrödinger coefficients `e_0..=e_order` of
/// `N + ½ + Σ_j κ^j X^{p_j}` for level `n`, with `perturbations[j-1] = p_j`.
fn rspt_ladder(n: usize, perturbations: &[u32], order: usize) -> Vec<BigRational> {
    let mut psi: Vec<State> = vec![State::from([(n, int(1))])];
    let mut energy = vec![ratio(2 * n as i64 + 1, 2)];
    for k in 1..=order {
        let mut source = State::new();
        for (j, &p) in perturbations.iter().enumerate() {
            let j = j + 1;
            if j <= k {
                add_scaled(&mut source, &apply_x_power(&psi[k - j], p), &int(1));
            }
        }
        let e_k = source.get(&n).cloned().unwrap_or_else(BigRational::zero);
        energy.push(e_k);
        let mut rhs = State::new();
        add_scaled(&mut rhs, &source, &int(-1));
        for j in 1..=k {
            add_scaled(&mut rhs, &psi[k - j], &energy[j]);
        }
        let next: State = rhs
            .into_iter()
            .filter(|(m, c)| *m != n && !c.is_zero())
            .map(|(m, c)| {
                let gap = int(m as i64 - n as i64);
                (m, c / gap)
            })
            .collect();
        psi.push(next);
    }
    energy
}

fn level_from_q0(q0: u32) -> Result<usize> {
    if q0 % 2 == 1 {
        Ok(((q0 - 1) / 2) as usize)
    } else {
        Err(Error::InvalidParameter(format!("q0 must be odd and positive, got {q0}")))
    }
}

/// Exact perturbative energy of the bounded quartic at level `q0`,
/// terms `E_0..=E_order` in powers of `c²/h⁶`.
pub fn rspt_rational(q0: u32, order: usize) -> Result<AsymptoticSeries> {
    let n = level_from_q0(q0)?;
    if order > 4 {
        return Err(Error::InvalidParameter(format!("RSPT order is limited to 4, got {order}")));
    }
    // H/h² = N + ½ + g X⁴ with g = c²/(2h⁶)
    let e = rspt_ladder(n, &[4], order);
    let terms = e
        .iter()
        .enumerate()
        .map(|(k, ek)| {
            let coeff = ek * ratio(1, 1i64 << k);
            SeriesTerm::new(1 - 3 * k as i32, k as i32, false, QPolynomial::constant(coeff))
        })
        .collect();
    Ok(AsymptoticSeries::new(terms, order + 1))
}

/// Exact perturbative energy of the double well about a minimum at level
/// `q0`: the constant `V(z₊)`, `½q h₊²`, and `orders` further terms in
/// powers of `c²/h⁶`.
pub fn rspt_rational_double(q0: u32, orders: usize) -> Result<AsymptoticSeries> {
    let n = level_from_q0(q0)?;
    if orders > 4 {
        return Err(Error::InvalidParameter(format!("RSPT order is limited to 4, got {orders}")));
    }
    // H/h₊² = N + ½ + λX³ + λ²X⁴ with λ² = √2c²/(8h⁶)
    let e = rspt_ladder(n, &[3, 4], 2 * orders);
    let mut terms = vec![SeriesTerm::new(4, -1, false, QPolynomial::constant(ratio(-1, 32)))];
    for m in 0..=orders {
        let coeff = &e[2 * m] * ratio(1, 8i64.pow(m as u32));
        terms.push(SeriesTerm::with_sqrt2_power(1 - 3 * m as i32, m as i32, m as i32 + 1, QPolynomial::constant(coeff)));
    }
    Ok(AsymptoticSeries::new(terms, orders + 1))
}

/// `I₂(0) = (c/√2) ∫₀^b √((a²-z²)(b²-z²)) dz` by adaptive quadrature,
/// with `z = b - s²` removing the square-root endpoint.
pub fn i2_quadrature(spec: &PotentialSpec, q: f64) -> Result<f64> {
    let d = EllipticData::new(spec, q)?;
    let (a2, b) = (d.a * d.a, d.b);
    let integrand = |s: f64| {
        let z = b - s * s;
        2.0 * s * s * ((a2 - z * z) * (b + z)).max(0.0).sqrt()
    };
    let value = quad::integrate(integrand, 0.0, b.sqrt(), 1e-14, 1e-13)?;
    Ok(spec.c() / std::f64::consts::SQRT_2 * value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::energy_series;
    use crate::specfun;

    #[test]
    fn harmonic_control() {
        let config = GridConfig::new(12.0, 4001).unwrap();
        let r = eig_lowest_potential(|z| z * z, &config, 3).unwrap();
        for (e, want) in r.eigenvalues.iter().zip([1.0, 3.0, 5.0]) {
            assert!((e - want).abs() < 1e-4, "{e}");
        }
        let rich = r.richardson.as_ref().unwrap();
        for (i, want) in [1.0, 3.0, 5.0].iter().enumerate() {
            assert!((rich[i] - want).abs() < 1e-6);
            assert!((rich[i] - want).abs() * 10.0 < (r.eigenvalues[i] - want).abs());
        }
        assert_eq!(r.parities, vec![Parity::Even, Parity::Odd, Parity::Even]);
    }

    #[test]
    fn sturm_count_matches_bisection() {
        let config = GridConfig::new(8.0, 801).unwrap();
        let op = GridOperator::new(|z| z * z + 0.1 * z.powi(4), config.half_width, config.points);
        let values: Vec<f64> = (0..6).map(|i| op.eigenvalue(i, 1e-12).unwrap()).collect();
        for (i, w) in values.windows(2).enumerate() {
            let mid = 0.5 * (w[0] + w[1]);
            assert_eq!(op.sturm_count(mid), i + 1);
        }
        assert_eq!(op.sturm_count(values[0] - 1e-3), 0);
    }

    #[test]
    fn too_many_eigenvalues() {
        let config = GridConfig::new(1.0, 5).unwrap();
        assert!(matches!(
            eig_lowest_potential(|z| z * z, &config, 4),
            Err(Error::TooManyEigenvalues { .. })
        ));
        assert!(GridConfig::new(1.0, 2).is_err());
    }

    #[test]
    fn small_box_rejected() {
        let config = GridConfig::new(1.0, 201).unwrap();
        assert!(eig_lowest_potential(|z| z * z, &config, 2).is_err());
    }

    #[test]
    fn double_well_pair() {
        let spec = PotentialSpec::half(Case::DoubleWell, 16.0, 1.0).unwrap();
        let config = GridConfig::for_spec(&spec, 4, 2001).unwrap();
        let r = eig_lowest(&spec, &config, 4).unwrap();
        let (even, odd) = r.splitting_pairs[0];
        assert!(odd > even);
        assert!(odd - even < 0.1 * (r.best()[2] - r.best()[1]));
        assert_eq!(r.parities, vec![Parity::Even, Parity::Odd, Parity::Even, Parity::Odd]);
        assert!(splitting_numeric(&spec, &config, 0).unwrap() > 0.0);
    }

    #[test]
    fn inverted_refused() {
        let spec = PotentialSpec::half(Case::InvertedDoubleWell, 16.0, 1.0).unwrap();
        let config = GridConfig::new(5.0, 101).unwrap();
        assert!(eig_lowest(&spec, &config, 1).is_err());
        assert!(GridConfig::for_spec(&spec, 1, 101).is_err());
    }

    #[test]
    fn convention_one_is_half_scaled() {
        use crate::model::Convention;
        let one = PotentialSpec::new(Case::BoundedQuartic, 2.0, 0.5, Convention::One).unwrap();
        let (half, _) = one.to_half();
        let config = GridConfig::for_spec(&half, 2, 1001).unwrap();
        let a = eig_lowest(&one, &config, 2).unwrap();
        let b = eig_lowest(&half, &config, 2).unwrap();
        assert!((a.best()[0] * 2.0 - b.best()[0]).abs() < 1e-12);
    }

    #[test]
    fn rspt_examples() {
        let s = rspt_rational(1, 2).unwrap();
        assert_eq!(s.terms[0].coeff, QPolynomial::constant(ratio(1, 2)));
        assert_eq!(s.terms[1].coeff, QPolynomial::constant(ratio(3, 2)));
        assert_eq!(s.terms[2].coeff, QPolynomial::constant(ratio(-21, 2)));
        assert_eq!((s.terms[2].h2_power, s.terms[2].c2_power), (-5, 2));
        let s3 = rspt_rational(3, 1).unwrap();
        assert_eq!(s3.terms[1].coeff, QPolynomial::constant(ratio(15, 2)));
        assert!(rspt_rational(2, 1).is_err());
        assert!(rspt_rational(1, 5).is_err());
    }

    #[test]
    fn rspt_matches_series() {
        for q0 in [1u32, 3, 5] {
            let rspt = rspt_rational(q0, 3).unwrap();
            let series = energy_series(Case::BoundedQuartic, 4).unwrap().at_q(&int(q0 as i64));
            assert_eq!(rspt, series, "q0={q0}");
        }
    }

    #[test]
    fn rspt_double_matches_series() {
        for q0 in [1u32, 3, 5] {
            let rspt = rspt_rational_double(q0, 3).unwrap();
            let series = energy_series(Case::DoubleWell, 4).unwrap().at_q(&int(q0 as i64));
            assert_eq!(rspt, series, "q0={q0}");
        }
    }

    #[test]
    fn i2_against_exact() {
        let spec = PotentialSpec::half(Case::DoubleWell, 16.0, 1.0).unwrap();
        let quad = i2_quadrature(&spec, 1.0).unwrap();
        let exact = specfun::i2_exact(&spec, 1.0).unwrap();
        assert!(((quad - exact) / exact).abs() < 1e-12, "{quad} vs {exact}");
    }
}
