//! Exact-rational asymptotic series for the eigenvalues in descending
//! powers of h².
//!
//! The inverted-well expansion comes from the banded recurrence between
//! parabolic-cylinder solutions `y_q` shifted in steps of four; the
//! bounded quartic follows from it by `c² → -c²`. The double-well
//! expansion comes from the analogous recurrence for the `A_q` solutions
//! built around the minima, shifted in steps of two.

use crate::error::{Error, Result};
use crate::model::Case;
use crate::specfun;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::Integer;
use serde_json::{json, Value};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Shorthand for an exact rational `n/d`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Polynomial in `q` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct QPolynomial {
    coeffs: BTreeMap<u32, BigRational>,
}

impl QPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(0, c)
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The polynomial `q`.
    pub fn q() -> Self {
        Self::monomial(1, BigRational::one())
    }

    pub fn monomial(degree: u32, c: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(degree, c);
        }
        Self { coeffs }
    }

    /// Builds from `(numerator, denominator)` pairs in ascending degree.
    pub fn from_ratios(ascending: &[(i64, i64)]) -> Self {
        let mut p = Self::zero();
        for (deg, &(n, d)) in ascending.iter().enumerate() {
            p.add_term(deg as u32, ratio(n, d));
        }
        p
    }

    fn add_term(&mut self, degree: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(degree).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&degree);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, degree: u32) -> BigRational {
        self.coeffs.get(&degree).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Nonzero `(degree, coefficient)` pairs, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.coeffs.iter().map(|(&d, c)| (d, c))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = Self::zero();
        for (d, c) in self.terms() {
            out.add_term(d, c * s);
        }
        out
    }

    /// `p(q + shift)`.
    pub fn shifted(&self, shift: &BigRational) -> Self {
        // Horner in the polynomial ring.
        let linear = &Self::q() + &Self::constant(shift.clone());
        let mut out = Self::zero();
        if let Some(top) = self.degree() {
            for d in (0..=top).rev() {
                out = &(&out * &linear) + &Self::constant(self.coeff(d));
            }
        }
        out
    }

    pub fn eval(&self, q: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        if let Some(top) = self.degree() {
            for d in (0..=top).rev() {
                acc = acc * q + self.coeff(d);
            }
        }
        acc
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        let mut acc = 0.0;
        if let Some(top) = self.degree() {
            for d in (0..=top).rev() {
                acc = acc * q + to_f64(&self.coeff(d));
            }
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (d, c) in self.terms() {
            if d > 0 {
                out.add_term(d - 1, c * int(d as i64));
            }
        }
        out
    }

    /// `Some(0)` if only even powers occur, `Some(1)` if only odd ones.
    pub fn parity(&self) -> Option<u32> {
        let mut it = self.coeffs.keys().map(|d| d % 2);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// Splits `p = content * primitive` with `primitive` having coprime
    /// integer coefficients and positive leading coefficient.
    pub fn content(&self) -> (BigRational, QPolynomial) {
        if self.is_zero() {
            return (BigRational::zero(), Self::zero());
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for (_, c) in self.terms() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        let lead = self.coeff(self.degree().expect("nonzero"));
        if lead.is_negative() {
            content = -content;
        }
        let primitive = self.scale(&content.recip());
        (content, primitive)
    }

    /// Dense ascending coefficient list, rendered as exact rationals.
    pub fn to_rational_strings(&self) -> Vec<String> {
        match self.degree() {
            None => vec!["0".to_string()],
            Some(top) => (0..=top).map(|d| self.coeff(d).to_string()).collect(),
        }
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Add for &QPolynomial {
    type Output = QPolynomial;
    fn add(self, rhs: &QPolynomial) -> QPolynomial {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d, c.clone());
        }
        out
    }
}

impl Sub for &QPolynomial {
    type Output = QPolynomial;
    fn sub(self, rhs: &QPolynomial) -> QPolynomial {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d, -c.clone());
        }
        out
    }
}

impl Mul for &QPolynomial {
    type Output = QPolynomial;
    fn mul(self, rhs: &QPolynomial) -> QPolynomial {
        let mut out = QPolynomial::zero();
        for (da, ca) in self.terms() {
            for (db, cb) in rhs.terms() {
                out.add_term(da + db, ca * cb);
            }
        }
        out
    }
}

impl Neg for &QPolynomial {
    type Output = QPolynomial;
    fn neg(self) -> QPolynomial {
        self.scale(&int(-1))
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = abs.is_one();
            match d {
                0 => f.write_str(&fmt_rational(&abs))?,
                _ => {
                    if !unit {
                        f.write_str(&fmt_rational(&abs))?;
                    }
                    if *d == 1 {
                        f.write_str("q")?;
                    } else {
                        write!(f, "q^{d}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// One term `coeff(q) · (√2)^[sqrt2] · (h²)^h2_power · (c²)^c2_power`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTerm {
    pub h2_power: i32,
    pub c2_power: i32,
    pub sqrt2: bool,
    pub coeff: QPolynomial,
}

impl SeriesTerm {
    pub fn new(h2_power: i32, c2_power: i32, sqrt2: bool, coeff: QPolynomial) -> Self {
        Self { h2_power, c2_power, sqrt2, coeff }
    }

    /// Builds a term whose rational factor carries `(√2)^k` for any `k`,
    /// folding even powers of √2 into the coefficient.
    pub fn with_sqrt2_power(h2_power: i32, c2_power: i32, k: i32, coeff: QPolynomial) -> Self {
        let half = k.div_euclid(2);
        let factor = if half >= 0 { int(1i64 << half) } else { ratio(1, 1i64 << (-half)) };
        Self { h2_power, c2_power, sqrt2: k.rem_euclid(2) == 1, coeff: coeff.scale(&factor) }
    }

    pub fn value(&self, q: f64, h2: f64, c2: f64) -> f64 {
        let s = if self.sqrt2 { std::f64::consts::SQRT_2 } else { 1.0 };
        self.coeff.eval_f64(q) * s * h2.powi(self.h2_power) * c2.powi(self.c2_power)
    }

    fn render(&self) -> (bool, String) {
        let (content, primitive) = self.coeff.content();
        let negative = content.is_negative();
        let abs = content.abs();
        let mut s = String::new();
        if !abs.is_one() || primitive.is_one_poly() {
            s.push_str(&format!("({})", abs_rational(&abs)));
        }
        if !primitive.is_one_poly() {
            if primitive.terms().count() == 1 {
                s.push_str(&primitive.to_string());
            } else {
                s.push_str(&format!("({primitive})"));
            }
        }
        if self.sqrt2 {
            s.push_str(" sqrt2");
        }
        let mut num = Vec::new();
        let mut den = Vec::new();
        let mut push = |sym: &str, p: i32| {
            if p > 0 {
                num.push(format!("{sym}^{}", 2 * p));
            } else if p < 0 {
                den.push(format!("{sym}^{}", -2 * p));
            }
        };
        push("c", self.c2_power);
        push("h", self.h2_power);
        if num.is_empty() && !den.is_empty() {
            num.push("1".to_string());
        }
        if !num.is_empty() {
            s.push(' ');
            s.push_str(&num.join(" "));
        }
        if !den.is_empty() {
            s.push('/');
            s.push_str(&den.join(" "));
        }
        (negative, s)
    }

    fn to_json(&self) -> Value {
        json!({
            "h2_power": self.h2_power,
            "c2_power": self.c2_power,
            "sqrt2": self.sqrt2,
            "q_poly": self.coeff.to_rational_strings(),
        })
    }
}

impl QPolynomial {
    fn is_one_poly(&self) -> bool {
        self.degree() == Some(0) && self.coeff(0).is_one()
    }
}

fn abs_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Truncated series sorted by descending power of h².
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticSeries {
    pub terms: Vec<SeriesTerm>,
    pub truncation_order: usize,
}

impl AsymptoticSeries {
    pub fn new(mut terms: Vec<SeriesTerm>, truncation_order: usize) -> Self {
        terms.retain(|t| !t.coeff.is_zero());
        terms.sort_by(|a, b| b.h2_power.cmp(&a.h2_power).then(a.c2_power.cmp(&b.c2_power)));
        Self { terms, truncation_order }
    }

    pub fn value(&self, q: f64, h2: f64, c2: f64) -> f64 {
        self.terms.iter().map(|t| t.value(q, h2, c2)).sum()
    }

    /// Term-wise derivative with respect to `q`.
    pub fn derivative_q(&self) -> AsymptoticSeries {
        let terms = self
            .terms
            .iter()
            .map(|t| SeriesTerm { coeff: t.coeff.derivative(), ..t.clone() })
            .collect();
        AsymptoticSeries::new(terms, self.truncation_order)
    }

    /// Series with `q` fixed to a rational value; every coefficient becomes a constant.
    pub fn at_q(&self, q: &BigRational) -> AsymptoticSeries {
        let terms = self
            .terms
            .iter()
            .map(|t| SeriesTerm { coeff: QPolynomial::constant(t.coeff.eval(q)), ..t.clone() })
            .collect();
        AsymptoticSeries::new(terms, self.truncation_order)
    }

    /// Text form such as `E = (1/2)q h^2 - (3/4)(q^2 + 1) c^2/h^4`.
    pub fn render(&self, symbol: &str) -> String {
        let mut out = format!("{symbol} =");
        if self.terms.is_empty() {
            out.push_str(" 0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let (neg, body) = t.render();
            match (i, neg) {
                (0, false) => out.push_str(&format!(" {body}")),
                (0, true) => out.push_str(&format!(" -{body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
                (_, true) => out.push_str(&format!(" - {body}")),
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "truncation_order": self.truncation_order,
            "terms": self.terms.iter().map(SeriesTerm::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Coefficients `(½(q+3), q, ½(q-3))` of `y_{q+4}`, `y_q`, `y_{q-4}` in `w² y_q`.
pub fn w2_step_coeffs() -> [QPolynomial; 3] {
    [
        QPolynomial::from_ratios(&[(3, 2), (1, 2)]),
        QPolynomial::q(),
        QPolynomial::from_ratios(&[(-3, 2), (1, 2)]),
    ]
}

/// `S_{2i}(q, 4j)`: coefficient of `y_{q+4j}` in `w^{2i} y_q`, for `|j| ≤ i`.
pub fn s_coeffs(i: u32) -> Result<BTreeMap<i64, QPolynomial>> {
    if i == 0 {
        return Err(Error::InvalidParameter("power index must be at least 1".into()));
    }
    let step = w2_step_coeffs();
    let mut current: BTreeMap<i64, QPolynomial> = BTreeMap::from([(0, QPolynomial::one())]);
    for _ in 0..i {
        let mut next: BTreeMap<i64, QPolynomial> = BTreeMap::new();
        for (&j, s) in &current {
            let shift = int(4 * j);
            for (k, offset) in [(0usize, 1i64), (1, 0), (2, -1)] {
                let contrib = s * &step[k].shifted(&shift);
                let e = next.entry(j + offset).or_default();
                *e = &*e + &contrib;
            }
        }
        current = next;
    }
    Ok(current)
}

/// A bracket `[q+4·from, q+4·to]` of the inverted-well recurrence:
/// `c² S₄(q+4·from, 4(to-from))`, plus `Δ` on the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketCoefficient {
    pub from: i64,
    pub to: i64,
    /// coefficient of `c²`, as a polynomial in `q`
    pub c2_part: QPolynomial,
    pub includes_delta: bool,
}

pub fn inverted_bracket(from: i64, to: i64) -> BracketCoefficient {
    let s4 = s_coeffs(2).expect("i = 2 is valid");
    let c2_part = s4.get(&(to - from)).map(|p| p.shifted(&int(4 * from))).unwrap_or_default();
    BracketCoefficient { from, to, c2_part, includes_delta: from == to }
}

/// Banded recurrence `scale·t·b_t = ε Σ_j b_j M(j,t)` with
/// `M(j,t) = A_{t-j}(q + step·j) + δ_{jt} λ(ε)`, `b_0 = 1`, and the
/// eigenvalue parameter `λ` fixed order by order by the `t = 0` row.
struct BandRecurrence {
    step: i64,
    scale: i64,
    /// `A_l(q)` for `l = -2..=2`
    band: [QPolynomial; 5],
}

struct RecurrenceSolution {
    /// `p[i][t]`: coefficient of `ε^i` in `b_t`
    p: Vec<BTreeMap<i64, QPolynomial>>,
    /// `λ_m`, the coefficient of `ε^m` in `λ`
    lambda: Vec<QPolynomial>,
}

impl BandRecurrence {
    fn inverted() -> Self {
        let s4 = s_coeffs(2).expect("i = 2 is valid");
        let band = [-2i64, -1, 0, 1, 2].map(|l| s4[&l].clone());
        Self { step: 4, scale: 4, band }
    }

    fn double_well() -> Self {
        let band = [-2i64, -1, 0, 1, 2].map(|l| double_well_band(l).expect("|l| <= 2"));
        Self { step: 2, scale: 2, band }
    }

    /// Returns `P_0..=P_max` and `λ_0..=λ_max`.
    fn solve(&self, max: usize) -> RecurrenceSolution {
        let mut shifted: HashMap<(i64, i64), QPolynomial> = HashMap::new();
        let mut a = |l: i64, j: i64| -> QPolynomial {
            if !(-2..=2).contains(&l) {
                return QPolynomial::zero();
            }
            shifted
                .entry((l, j))
                .or_insert_with(|| self.band[(l + 2) as usize].shifted(&int(self.step * j)))
                .clone()
        };
        let zero = QPolynomial::zero();
        let mut p: Vec<BTreeMap<i64, QPolynomial>> = vec![BTreeMap::from([(0, QPolynomial::one())])];
        let mut lambda: Vec<QPolynomial> = Vec::new();
        for i in 0..=max {
            // t = 0 row at order ε^i fixes λ_i.
            let mut l_i = if i == 0 { -&a(0, 0) } else { QPolynomial::zero() };
            for (&j, pij) in &p[i] {
                if j != 0 && j.abs() <= 2 {
                    l_i = &l_i - &(pij * &a(-j, j));
                }
            }
            lambda.push(l_i);
            if i == max {
                break;
            }
            let width = 2 * (i as i64 + 1);
            let mut next = BTreeMap::new();
            for t in -width..=width {
                if t == 0 {
                    continue;
                }
                let mut acc = QPolynomial::zero();
                for j in (t - 2)..=(t + 2) {
                    if let Some(pij) = p[i].get(&j) {
                        acc = &acc + &(pij * &a(t - j, j));
                    }
                }
                for (m, lm) in lambda.iter().enumerate() {
                    let pt = p[i - m].get(&t).unwrap_or(&zero);
                    acc = &acc + &(lm * pt);
                }
                next.insert(t, acc.scale(&ratio(1, self.scale * t)));
            }
            p.push(next);
        }
        RecurrenceSolution { p, lambda }
    }
}

/// `P_i(q, q+4j)` for `|j| ≤ 2i`, with `c² = 1` and the lower-order `Δ`
/// substituted in every bracket; `P_0 = {0: 1}` and `P_i(q,q) = 0` otherwise.
pub fn p_coeffs(i: usize) -> BTreeMap<i64, QPolynomial> {
    let sol = BandRecurrence::inverted().solve(i);
    let mut out = sol.p[i].clone();
    let w = 2 * i as i64;
    for j in -w..=w {
        out.entry(j).or_default();
    }
    out
}

fn require_order(order: usize) -> Result<()> {
    if order == 0 {
        Err(Error::InvalidParameter("series order must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `Δ(q, h²)` of the inverted well to `order` terms in powers of `c²/h⁶`.
pub fn delta_series_inverted(order: usize) -> Result<AsymptoticSeries> {
    require_order(order)?;
    let sol = BandRecurrence::inverted().solve(order - 1);
    let terms = sol
        .lambda
        .iter()
        .enumerate()
        .map(|(m, l)| SeriesTerm::new(-3 * m as i32, m as i32 + 1, false, l.clone()))
        .collect();
    Ok(AsymptoticSeries::new(terms, order))
}

/// Double-well `Δ` to `order` terms; `E = V(z₊) + ½qh₊² + Δ/h₊⁴`.
pub fn delta_series_double(order: usize) -> Result<AsymptoticSeries> {
    require_order(order)?;
    let sol = BandRecurrence::double_well().solve(order - 1);
    // λ = 2Δ/c² and ε = √2c²/(4h⁶), so Δ_m = (λ_m/2)(√2)^m/4^m · c^{2m+2}/h^{6m}.
    let terms = sol
        .lambda
        .iter()
        .enumerate()
        .map(|(m, l)| {
            let c = l.scale(&ratio(1, 2 * 4i64.pow(m as u32)));
            SeriesTerm::with_sqrt2_power(-3 * m as i32, m as i32 + 1, m as i32, c)
        })
        .collect();
    Ok(AsymptoticSeries::new(terms, order))
}

/// Eigenvalue series `E(q, h²)` with `order` terms beyond any constant.
pub fn energy_series(case: Case, order: usize) -> Result<AsymptoticSeries> {
    require_order(order)?;
    let mut terms = Vec::new();
    match case {
        Case::InvertedDoubleWell | Case::BoundedQuartic => {
            terms.push(SeriesTerm::new(1, 0, false, QPolynomial::monomial(1, ratio(1, 2))));
            if order > 1 {
                let sol = BandRecurrence::inverted().solve(order - 2);
                for (m, l) in sol.lambda.iter().enumerate() {
                    // Δ_m c^{2(m+1)}/(2h^{6m+4}); c² → -c² for the bounded quartic.
                    let sign = if case == Case::BoundedQuartic && m % 2 == 0 { -1 } else { 1 };
                    let coeff = l.scale(&ratio(sign, 2));
                    terms.push(SeriesTerm::new(-(3 * m as i32 + 2), m as i32 + 1, false, coeff));
                }
            }
        }
        Case::DoubleWell => {
            terms.push(SeriesTerm::new(4, -1, false, QPolynomial::constant(ratio(-1, 32))));
            terms.push(SeriesTerm::new(1, 0, true, QPolynomial::monomial(1, ratio(1, 2))));
            if order > 1 {
                let sol = BandRecurrence::double_well().solve(order - 2);
                for (m, l) in sol.lambda.iter().enumerate() {
                    let c = l.scale(&ratio(1, 4i64.pow(m as u32 + 1)));
                    terms.push(SeriesTerm::with_sqrt2_power(-(3 * m as i32 + 2), m as i32 + 1, m as i32, c));
                }
            }
        }
    }
    Ok(AsymptoticSeries::new(terms, order))
}

/// Double-well band `a_l(q)`: coefficient of `A_{q+2l}` in `16 z₊² A_q''`.
fn double_well_band(l: i64) -> Option<QPolynomial> {
    let p = match l {
        -2 => QPolynomial::from_ratios(&[(3, 1), (-4, 1), (1, 1)]), // (q-1)(q-3)
        -1 => QPolynomial::from_ratios(&[(-4, 1), (8, 1), (-4, 1)]), // -4(q-1)²
        0 => QPolynomial::from_ratios(&[(2, 1), (0, 1), (6, 1)]),    // 2(3q²+1)
        1 => QPolynomial::from_ratios(&[(-4, 1), (-8, 1), (-4, 1)]), // -4(q+1)²
        2 => QPolynomial::from_ratios(&[(3, 1), (4, 1), (1, 1)]),    // (q+1)(q+3)
        _ => return None,
    };
    Some(p)
}

/// The double-well bracket table `(q, q+2l)` for `l = -2..=2`.
///
/// The diagonal entry additionally carries `diagonal_delta_weight · Δ/c²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleWellBracketTable {
    pub entries: BTreeMap<i64, QPolynomial>,
    pub diagonal_delta_weight: BigRational,
}

pub fn a_coeff_table_double() -> DoubleWellBracketTable {
    let entries = (-2..=2).map(|l| (l, double_well_band(l).expect("|l| <= 2"))).collect();
    DoubleWellBracketTable { entries, diagonal_delta_weight: int(2) }
}

/// Coefficients of `B_{q+2}` and `B_{q-2}` in `w B_q(w)`:
/// `√2 [(q+1)/4]!/[(q-1)/4]!` and `√2 [(q-3)/4]!/[(q-5)/4]!`.
pub fn pcf_recurrence_double(q: f64) -> Result<(f64, f64)> {
    let s = std::f64::consts::SQRT_2;
    let up = s * specfun::factorial_ratio(0.25 * (q + 1.0), 0.25 * (q - 1.0))?;
    let down = s * specfun::factorial_ratio(0.25 * (q - 3.0), 0.25 * (q - 5.0))?;
    Ok((up, down))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[(i64, i64)]) -> QPolynomial {
        QPolynomial::from_ratios(c)
    }

    #[test]
    fn polynomial_arithmetic() {
        let p = poly(&[(1, 1), (2, 1)]); // 1 + 2q
        let sq = &p * &p;
        assert_eq!(sq, poly(&[(1, 1), (4, 1), (4, 1)]));
        assert!((&p - &p).is_zero());
        assert_eq!(p.shifted(&int(1)), poly(&[(3, 1), (2, 1)]));
        assert_eq!(sq.eval(&int(2)), int(25));
        assert_eq!(sq.derivative(), poly(&[(4, 1), (8, 1)]));
        let (c, prim) = poly(&[(-3, 4), (0, 1), (-3, 4)]).content();
        assert_eq!(c, ratio(-3, 4));
        assert_eq!(prim, poly(&[(1, 1), (0, 1), (1, 1)]));
        assert_eq!(poly(&[(0, 1), (1, 1), (0, 1), (3, 1)]).parity(), Some(1));
        assert_eq!(poly(&[(1, 1), (1, 1)]).parity(), None);
    }

    #[test]
    fn no_stored_zero_coefficients() {
        let p = &poly(&[(1, 1), (1, 1)]) - &poly(&[(0, 1), (1, 1)]);
        assert_eq!(p.terms().count(), 1);
        assert_eq!(p.degree(), Some(0));
    }

    #[test]
    fn w2_examples() {
        let [up, mid, down] = w2_step_coeffs();
        assert_eq!((up.eval(&int(1)), mid.eval(&int(1)), down.eval(&int(1))), (int(2), int(1), int(-1)));
        assert_eq!((up.eval(&int(3)), mid.eval(&int(3)), down.eval(&int(3))), (int(3), int(3), int(0)));
        let sum = &(&up + &mid) + &down;
        assert_eq!(sum, poly(&[(0, 1), (2, 1)]));
    }

    #[test]
    fn s4_closed_forms() {
        let s4 = s_coeffs(2).unwrap();
        assert_eq!(s4[&0], poly(&[(3, 2), (0, 1), (3, 2)]));
        assert_eq!(s4[&1], poly(&[(6, 1), (5, 1), (1, 1)])); // (q+2)(q+3)
        assert_eq!(s4[&-1], poly(&[(6, 1), (-5, 1), (1, 1)])); // (q-2)(q-3)
        assert_eq!(s4[&2], poly(&[(21, 4), (10, 4), (1, 4)])); // ¼(q+3)(q+7)
        assert_eq!(s4[&-2], poly(&[(21, 4), (-10, 4), (1, 4)]));
        assert_eq!(s4[&0].eval(&int(1)), int(3));
        assert_eq!(s4[&1].eval(&int(1)), int(12));
        let s2 = s_coeffs(1).unwrap();
        assert_eq!(s2.values().cloned().collect::<Vec<_>>(), {
            let [a, b, c] = w2_step_coeffs();
            vec![c, b, a]
        });
        assert!(s_coeffs(0).is_err());
    }

    #[test]
    fn brackets() {
        let b = inverted_bracket(0, 1);
        assert_eq!(b.c2_part.eval(&int(1)), int(12));
        assert!(!b.includes_delta);
        assert!(inverted_bracket(2, 2).includes_delta);
        assert!(inverted_bracket(0, 3).c2_part.is_zero());
    }

    #[test]
    fn p_table_examples() {
        assert_eq!(p_coeffs(0), BTreeMap::from([(0, QPolynomial::one())]));
        let p1 = p_coeffs(1);
        assert_eq!(p1[&1].eval(&int(1)), int(3));
        assert_eq!(p1[&-1].eval(&int(1)), ratio(-1, 2));
        assert!(p1[&0].is_zero());
    }

    #[test]
    fn p_table_support() {
        for i in 1..=6 {
            let p = p_coeffs(i);
            assert!(p[&0].is_zero());
            assert!(p.keys().all(|j| j.abs() <= 2 * i as i64));
            // the outermost entries are nonzero
            assert!(!p[&(2 * i as i64)].is_zero());
        }
    }

    #[test]
    fn inverted_delta() {
        let d = delta_series_inverted(2).unwrap();
        assert_eq!(d.terms[0], SeriesTerm::new(0, 1, false, poly(&[(-3, 2), (0, 1), (-3, 2)])));
        // -(17q³ + 67q)/4 c⁴/h⁶
        assert_eq!(d.terms[1], SeriesTerm::new(-3, 2, false, poly(&[(0, 1), (-67, 4), (0, 1), (-17, 4)])));
        assert_eq!(d.terms[1].coeff.parity(), Some(1));
    }

    #[test]
    fn inverted_energy() {
        let e = energy_series(Case::InvertedDoubleWell, 3).unwrap();
        assert_eq!(e.terms.len(), 3);
        assert_eq!(e.terms[0], SeriesTerm::new(1, 0, false, poly(&[(0, 1), (1, 2)])));
        assert_eq!(e.terms[1], SeriesTerm::new(-2, 1, false, poly(&[(-3, 4), (0, 1), (-3, 4)])));
        assert_eq!(e.terms[2], SeriesTerm::new(-5, 2, false, poly(&[(0, 1), (-67, 8), (0, 1), (-17, 8)])));
        assert_eq!(
            e.render("E"),
            "E = (1/2)q h^2 - (3/4)(q^2 + 1) c^2/h^4 - (1/8)(17q^3 + 67q) c^4/h^10"
        );
    }

    #[test]
    fn parity_pairing() {
        let e = energy_series(Case::InvertedDoubleWell, 7).unwrap();
        for t in &e.terms {
            assert_eq!(t.coeff.parity(), Some(t.h2_power.rem_euclid(2) as u32), "{t:?}");
        }
    }

    #[test]
    fn bounded_is_sign_flip() {
        let inv = energy_series(Case::InvertedDoubleWell, 6).unwrap();
        let bnd = energy_series(Case::BoundedQuartic, 6).unwrap();
        for (a, b) in inv.terms.iter().zip(&bnd.terms) {
            let sign = if a.c2_power % 2 == 1 { -1 } else { 1 };
            assert_eq!(b.coeff, a.coeff.scale(&int(sign)));
            assert_eq!((a.h2_power, a.c2_power), (b.h2_power, b.c2_power));
        }
    }

    #[test]
    fn double_well_series() {
        let e = energy_series(Case::DoubleWell, 3).unwrap();
        assert_eq!(e.terms.len(), 4);
        assert_eq!(e.terms[0], SeriesTerm::new(4, -1, false, poly(&[(-1, 32)])));
        assert_eq!(e.terms[1], SeriesTerm::new(1, 0, true, poly(&[(0, 1), (1, 2)])));
        assert_eq!(e.terms[2], SeriesTerm::new(-2, 1, false, poly(&[(-1, 2), (0, 1), (-3, 2)])));
        // -√2 q(17q²+19)/4 c⁴/h¹⁰
        assert_eq!(e.terms[3], SeriesTerm::new(-5, 2, true, poly(&[(0, 1), (-19, 4), (0, 1), (-17, 4)])));
        let d = delta_series_double(2).unwrap();
        assert_eq!(d.terms[0], SeriesTerm::new(0, 1, false, poly(&[(-1, 1), (0, 1), (-3, 1)])));
        assert_eq!(d.terms[1], SeriesTerm::new(-3, 2, true, poly(&[(0, 1), (-19, 2), (0, 1), (-17, 2)])));
        assert_eq!(d.terms[0].coeff.eval(&int(1)), int(-4));
    }

    #[test]
    fn double_well_table() {
        let t = a_coeff_table_double();
        assert_eq!(t.entries[&-2].eval(&int(5)), int(8));
        assert_eq!(t.entries[&1].eval(&int(1)), int(-16));
        assert_eq!(t.entries[&-1].eval(&int(1)), int(0));
        assert_eq!(t.diagonal_delta_weight, int(2));
    }

    #[test]
    fn derivative_and_value() {
        let e = energy_series(Case::InvertedDoubleWell, 2).unwrap();
        let d = e.derivative_q();
        assert_eq!(d.terms[0].coeff, poly(&[(1, 2)]));
        let v = e.value(1.0, 10.0, 1.0);
        assert!((v - (5.0 - 1.5 / 100.0)).abs() < 1e-14);
    }

    #[test]
    fn json_shape() {
        let e = energy_series(Case::InvertedDoubleWell, 2).unwrap();
        let j = e.to_json();
        assert_eq!(j["terms"][0]["h2_power"], 1);
        assert_eq!(j["terms"][0]["q_poly"][1], "1/2");
        assert_eq!(j["terms"][1]["q_poly"][0], "-3/4");
    }

    #[test]
    fn pcf_recurrence() {
        let (up, down) = pcf_recurrence_double(3.0).unwrap();
        let half_fact = specfun::factorial(0.5).unwrap();
        assert!((up - std::f64::consts::SQRT_2 / half_fact).abs() < 1e-14);
        assert!((down - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-14);
        assert_eq!(pcf_recurrence_double(1.0).unwrap().1, 0.0);
        // w B_q(w) vanishes at w = 0
        for &q in &[0.5, 2.0, 3.0, 4.5, 7.0] {
            let (up, down) = pcf_recurrence_double(q).unwrap();
            let combo = up * specfun::b_origin_from_pcf(q + 2.0) + down * specfun::b_origin_from_pcf(q - 2.0);
            assert!(combo.abs() < 1e-13, "q={q}: {combo}");
        }
    }

    #[test]
    fn rejects_zero_order() {
        assert!(energy_series(Case::DoubleWell, 0).is_err());
        assert!(delta_series_inverted(0).is_err());
    }
}
