//! Exact floors, ceilings and fractional parts of integer multiples of
//! rational and quadratic-irrational ratios.
//!
//! Every routine here works on integers only. Quadratic values are compared
//! against rationals by squaring, and sums of several distinct square roots are
//! signed by interval refinement with integer square roots, which terminates
//! because square roots of distinct square-free radicands are linearly
//! independent over the rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number used across the crate.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("coefficient of the square root must be nonzero")]
    ZeroSurdCoefficient,
    #[error("radicand {0} must be positive")]
    NonPositiveRadicand(i64),
    #[error("radicand {0} is a perfect square")]
    PerfectSquareRadicand(i64),
    #[error("value {0} does not lie in the open interval (0,1)")]
    OutOfUnitInterval(String),
    #[error("integer overflow while normalizing {0}")]
    Overflow(&'static str),
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Sign of `u + v·√d` for a non-square `d > 0`.
pub fn sign_surd(u: &BigInt, v: &BigInt, d: u64) -> Ordering {
    let su = u.sign();
    let sv = v.sign();
    use num_bigint::Sign::*;
    match (su, sv) {
        (NoSign, NoSign) => Ordering::Equal,
        (_, NoSign) => u.cmp(&BigInt::zero()),
        (NoSign, _) => v.cmp(&BigInt::zero()),
        (Plus, Plus) => Ordering::Greater,
        (Minus, Minus) => Ordering::Less,
        (Plus, Minus) => {
            // u > |v|√d  <=>  u² > v² d
            (u * u).cmp(&(v * v * BigInt::from(d)))
        }
        (Minus, Plus) => (v * v * BigInt::from(d)).cmp(&(u * u)),
    }
}

/// Splits `d = s²·f` with `f` square-free and returns `(s, f)`.
pub fn square_free_part(d: u64) -> (u64, u64) {
    let mut rest = d;
    let mut outer = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        while rest.is_multiple_of(p * p) {
            rest /= p * p;
            outer *= p;
        }
        p += 1;
    }
    (outer, rest)
}

/// `num/den` in lowest terms with `den ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalRatio {
    num: i64,
    den: i64,
}

impl RationalRatio {
    pub fn new(num: i64, den: i64) -> Result<Self, NumberError> {
        if den == 0 {
            return Err(NumberError::ZeroDenominator);
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = num.checked_neg().ok_or(NumberError::Overflow("rational"))?;
            den = den.checked_neg().ok_or(NumberError::Overflow("rational"))?;
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn to_rational(&self) -> Rational {
        rational(self.num, self.den)
    }

    /// `[m·num/den]`.
    pub fn floor_scaled(&self, m: u64) -> BigInt {
        (BigInt::from(m) * self.num).div_floor(&BigInt::from(self.den))
    }

    /// True when `m·num/den` is an integer.
    pub fn divides_scaled(&self, m: u64) -> bool {
        (m as i128 * self.num as i128) % self.den as i128 == 0
    }
}

impl fmt::Display for RationalRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `(a + b·√D)/c` with `D > 1` square-free, `b ≠ 0`, `c > 0` and
/// `gcd(a, b, c) = 1`. Two values are equal iff their fields are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticRatio {
    a: i64,
    b: i64,
    c: i64,
    radicand: u64,
}

impl QuadraticRatio {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, NumberError> {
        if c == 0 {
            return Err(NumberError::ZeroDenominator);
        }
        if b == 0 {
            return Err(NumberError::ZeroSurdCoefficient);
        }
        if d <= 0 {
            return Err(NumberError::NonPositiveRadicand(d));
        }
        let (outer, radicand) = square_free_part(d as u64);
        if radicand == 1 {
            return Err(NumberError::PerfectSquareRadicand(d));
        }
        let mut b = b
            .checked_mul(outer as i64)
            .ok_or(NumberError::Overflow("quadratic"))?;
        let (mut a, mut c) = (a, c);
        if c < 0 {
            a = a.checked_neg().ok_or(NumberError::Overflow("quadratic"))?;
            b = b.checked_neg().ok_or(NumberError::Overflow("quadratic"))?;
            c = c.checked_neg().ok_or(NumberError::Overflow("quadratic"))?;
        }
        let g = a.gcd(&b).gcd(&c);
        Ok(Self {
            a: a / g,
            b: b / g,
            c: c / g,
            radicand,
        })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    /// `[m·(a + b√D)/c]` using one integer square root.
    pub fn floor_scaled(&self, m: u64) -> BigInt {
        let m = BigInt::from(m);
        let scaled_a = &m * self.a;
        let scaled_b = &m * self.b;
        let root = (&scaled_b * &scaled_b * BigInt::from(self.radicand)).sqrt();
        // B√D is irrational, so the floor of a negative multiple sits one below.
        let floor_surd = if scaled_b.is_negative() {
            -root - 1
        } else {
            root
        };
        (scaled_a + floor_surd).div_floor(&BigInt::from(self.c))
    }

    /// Orders `m·value` against `q`.
    pub fn cmp_scaled(&self, m: u64, q: &Rational) -> Ordering {
        let m = BigInt::from(m);
        let u = &m * self.a * q.denom() - q.numer() * self.c;
        let v = &m * self.b * q.denom();
        sign_surd(&u, &v, self.radicand)
    }

    pub fn value(&self) -> SurdSum {
        SurdSum::from_rational(rational(self.a, self.c))
            + SurdSum::surd(rational(self.b, self.c), self.radicand)
    }
}

impl fmt::Display for QuadraticRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{:+}√{})/{}", self.a, self.b, self.radicand, self.c)
    }
}

/// `θ/2π` for an angle entering the iteration formulas; always in `(0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AngleRatio {
    Rational(RationalRatio),
    Quadratic(QuadraticRatio),
}

impl AngleRatio {
    pub fn rational(num: i64, den: i64) -> Result<Self, NumberError> {
        Self::from_rational_ratio(RationalRatio::new(num, den)?)
    }

    pub fn quadratic(a: i64, b: i64, c: i64, d: i64) -> Result<Self, NumberError> {
        Self::from_quadratic_ratio(QuadraticRatio::new(a, b, c, d)?)
    }

    pub fn from_rational_ratio(r: RationalRatio) -> Result<Self, NumberError> {
        if r.num <= 0 || r.num >= r.den {
            return Err(NumberError::OutOfUnitInterval(r.to_string()));
        }
        Ok(Self::Rational(r))
    }

    pub fn from_quadratic_ratio(q: QuadraticRatio) -> Result<Self, NumberError> {
        let inside = q.cmp_scaled(1, &Rational::zero()) == Ordering::Greater
            && q.cmp_scaled(1, &Rational::one()) == Ordering::Less;
        if !inside {
            return Err(NumberError::OutOfUnitInterval(q.to_string()));
        }
        Ok(Self::Quadratic(q))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Self::Rational(_))
    }

    /// Reduced denominator of a rational ratio.
    pub fn denominator(&self) -> Option<i64> {
        match self {
            Self::Rational(r) => Some(r.den),
            Self::Quadratic(_) => None,
        }
    }

    pub fn is_half(&self) -> bool {
        matches!(self, Self::Rational(r) if r.num == 1 && r.den == 2)
    }

    pub fn floor_scaled(&self, m: u64) -> i64 {
        let fl = match self {
            Self::Rational(r) => r.floor_scaled(m),
            Self::Quadratic(q) => q.floor_scaled(m),
        };
        fl.to_i64()
            .expect("floor of m·x with x in (0,1) fits in i64")
    }

    pub fn upper_e(&self, m: u64) -> i64 {
        self.floor_scaled(m) + self.phi(m)
    }

    pub fn phi(&self, m: u64) -> i64 {
        match self {
            Self::Rational(r) => i64::from(!r.divides_scaled(m)),
            Self::Quadratic(_) => 1,
        }
    }

    pub fn value(&self) -> SurdSum {
        match self {
            Self::Rational(r) => SurdSum::from_rational(r.to_rational()),
            Self::Quadratic(q) => q.value(),
        }
    }

    /// `{m·x}` as an exact value.
    pub fn fract_scaled(&self, m: u64) -> SurdSum {
        self.value().scale_int(m as i64) - SurdSum::from_integer(self.floor_scaled(m))
    }

    /// Orders `m·x` against a rational.
    pub fn cmp_scaled(&self, m: u64, q: &Rational) -> Ordering {
        match self {
            Self::Rational(r) => (r.to_rational() * rational_from_int(m as i64)).cmp(q),
            Self::Quadratic(qr) => qr.cmp_scaled(m, q),
        }
    }
}

impl fmt::Display for AngleRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational(r) => r.fmt(f),
            Self::Quadratic(q) => q.fmt(f),
        }
    }
}

/// `[m·x]`.
pub fn floor_scaled(m: u64, x: &AngleRatio) -> i64 {
    x.floor_scaled(m)
}

/// `E(m·x)`, the least integer not below `m·x`.
pub fn upper_e(m: u64, x: &AngleRatio) -> i64 {
    x.upper_e(m)
}

/// `φ(m·x) = E(m·x) − [m·x]`.
pub fn phi_indicator(m: u64, x: &AngleRatio) -> i64 {
    x.phi(m)
}

/// `q + Σ cᵢ·√Dᵢ` over distinct square-free radicands `Dᵢ > 1` with nonzero
/// coefficients. The representation is canonical, so the value is rational
/// iff no radical terms remain.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SurdSum {
    rational: Rational,
    radicals: BTreeMap<u64, Rational>,
}

impl SurdSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        Self {
            rational: q,
            radicals: BTreeMap::new(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(rational_from_int(n))
    }

    /// `coeff·√d` for any positive `d`, folding square factors into the coefficient.
    pub fn surd(coeff: Rational, d: u64) -> Self {
        let (outer, radicand) = square_free_part(d);
        let coeff = coeff * rational_from_int(outer as i64);
        if radicand == 1 {
            return Self::from_rational(coeff);
        }
        let mut out = Self::zero();
        if !coeff.is_zero() {
            out.radicals.insert(radicand, coeff);
        }
        out
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    /// `(coefficient, radicand)` pairs in increasing radicand order.
    pub fn quadratic_part(&self) -> impl Iterator<Item = (&Rational, u64)> {
        self.radicals.iter().map(|(d, c)| (c, *d))
    }

    pub fn is_rational(&self) -> bool {
        self.radicals.is_empty()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.rational)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            rational: &self.rational * k,
            radicals: self.radicals.iter().map(|(d, c)| (*d, c * k)).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&rational_from_int(k))
    }

    /// Certified enclosure `[lo, hi]` using `√D` truncated to `bits` binary digits.
    pub fn bounds(&self, bits: u32) -> (Rational, Rational) {
        let scale = BigInt::one() << bits;
        let mut lo = self.rational.clone();
        let mut hi = self.rational.clone();
        for (d, c) in &self.radicals {
            let root = (BigInt::from(*d) << (2 * bits)).sqrt();
            let below = Rational::new(root.clone(), scale.clone());
            let above = Rational::new(root + 1, scale.clone());
            if c.is_positive() {
                lo += c * &below;
                hi += c * &above;
            } else {
                lo += c * &above;
                hi += c * &below;
            }
        }
        (lo, hi)
    }

    pub fn signum(&self) -> Ordering {
        match self.radicals.len() {
            0 => self.rational.cmp(&Rational::zero()),
            1 => {
                let (d, c) = self.radicals.iter().next().unwrap();
                let u = self.rational.numer() * c.denom();
                let v = c.numer() * self.rational.denom();
                sign_surd(&u, &v, *d)
            }
            _ => {
                let zero = Rational::zero();
                let mut bits = 64;
                loop {
                    let (lo, hi) = self.bounds(bits);
                    if lo > zero {
                        return Ordering::Greater;
                    }
                    if hi < zero {
                        return Ordering::Less;
                    }
                    bits *= 2;
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.rational.floor().to_integer();
        }
        let mut bits = 32;
        loop {
            let (lo, hi) = self.bounds(bits);
            let (f_lo, f_hi) = (lo.floor().to_integer(), hi.floor().to_integer());
            if f_lo == f_hi {
                return f_lo;
            }
            bits *= 2;
        }
    }

    /// `[v·den]/den`, the largest multiple of `1/den` not above the value.
    pub fn lower_bound_with_denominator(&self, den: u64) -> Rational {
        let den = rational_from_int(den as i64);
        Rational::from_integer(self.scale(&den).floor()) / den
    }

    /// Approximate value, for human-facing output only.
    pub fn to_f64_approx(&self) -> f64 {
        let (lo, hi) = self.bounds(64);
        let mid = (lo + hi) / rational_from_int(2);
        mid.numer().to_f64().unwrap_or(f64::NAN) / mid.denom().to_f64().unwrap_or(f64::NAN)
    }
}

impl PartialOrd for SurdSum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SurdSum {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl Add<&SurdSum> for &SurdSum {
    type Output = SurdSum;
    fn add(self, rhs: &SurdSum) -> SurdSum {
        let mut out = self.clone();
        out.rational += &rhs.rational;
        for (d, c) in &rhs.radicals {
            let entry = out.radicals.entry(*d).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                out.radicals.remove(d);
            }
        }
        out
    }
}

impl Add for SurdSum {
    type Output = SurdSum;
    fn add(self, rhs: SurdSum) -> SurdSum {
        &self + &rhs
    }
}

impl Neg for &SurdSum {
    type Output = SurdSum;
    fn neg(self) -> SurdSum {
        self.scale_int(-1)
    }
}

impl Neg for SurdSum {
    type Output = SurdSum;
    fn neg(self) -> SurdSum {
        -&self
    }
}

impl Sub<&SurdSum> for &SurdSum {
    type Output = SurdSum;
    fn sub(self, rhs: &SurdSum) -> SurdSum {
        self + &(-rhs)
    }
}

impl Sub for SurdSum {
    type Output = SurdSum;
    fn sub(self, rhs: SurdSum) -> SurdSum {
        &self - &rhs
    }
}

impl Mul<&Rational> for &SurdSum {
    type Output = SurdSum;
    fn mul(self, rhs: &Rational) -> SurdSum {
        self.scale(rhs)
    }
}

impl fmt::Display for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rational)?;
        for (d, c) in &self.radicals {
            if c.is_negative() {
                write!(f, " - {}·√{}", -c, d)?;
            } else {
                write!(f, " + {}·√{}", c, d)?;
            }
        }
        Ok(())
    }
}
