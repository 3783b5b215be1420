//! Exact and enclosure-based scalars.
//!
//! Every quantity the crate reports (candidate frequencies `α`, measures,
//! transition probabilities, residual vectors) is a [`Scalar`]: an exact
//! rational, an exact element of a real quadratic field, or a dyadic
//! enclosure. Exact kinds stay exact under `+ − ×` and (nonzero) division;
//! mixing an exact value with an enclosure yields an enclosure.

mod adaptive;
mod quadratic;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

pub use adaptive::{nearest_integer_refined, AdaptiveReal, BoundedPrecision, Refine};
pub(crate) use adaptive::rational_to_f64;
pub use quadratic::QuadraticReal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("precision exhausted: need {required_bits} bits, have {available_bits}")]
    PrecisionExhausted { required_bits: u32, available_bits: u32 },
    #[error("cannot mix sqrt({0}) and sqrt({1})")]
    RadicandMismatch(u64, u64),
    #[error("radicand {0} is not a square-free integer >= 2")]
    BadRadicand(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation needs an exact scalar")]
    ExactRequired,
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let bad = || ScalarError::Parse(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Parses a plain decimal such as `-0.3333` into the exact rational it denotes.
pub fn parse_decimal(s: &str) -> Result<BigRational, ScalarError> {
    let bad = || ScalarError::Parse(s.to_string());
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let q = BigRational::new(digits, den);
    Ok(if neg { -q } else { q })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rational(BigRational),
    Quadratic(QuadraticReal),
    Adaptive(AdaptiveReal),
}

/// Bits used when an exact operand meets an enclosure.
fn promotion_bits(a: &AdaptiveReal) -> u32 {
    a.accuracy_bits().saturating_add(16).min(1 << 20)
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn integer(k: impl Into<BigInt>) -> Self {
        Scalar::Rational(BigRational::from_integer(k.into()))
    }

    pub fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Scalar::Rational(BigRational::new(n.into(), d.into()))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Adaptive(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Scalar::Rational(_) => "rational",
            Scalar::Quadratic(_) => "quadratic",
            Scalar::Adaptive(_) => "adaptive",
        }
    }

    /// Exact zero test; enclosures are zero only when exactly `[0, 0]`.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Quadratic(x) => x.is_zero(),
            Scalar::Adaptive(a) => a.is_exact() && a.to_f64() == 0.0,
        }
    }

    /// `Some(k)` when the value is exactly the integer `k`.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Scalar::Rational(q) if q.is_integer() => Some(q.to_integer()),
            Scalar::Quadratic(x) if x.is_integer() => Some(x.rational_part().to_integer()),
            _ => None,
        }
    }

    fn to_quadratic(&self, d: u64) -> Option<QuadraticReal> {
        match self {
            Scalar::Rational(q) => QuadraticReal::from_rational(q.clone(), d).ok(),
            Scalar::Quadratic(x) => Some(x.clone()),
            Scalar::Adaptive(_) => None,
        }
    }

    pub fn to_adaptive(&self, bits: u32) -> AdaptiveReal {
        match self {
            Scalar::Rational(q) => AdaptiveReal::from_rational(q, bits),
            Scalar::Quadratic(x) => x.to_adaptive(bits),
            Scalar::Adaptive(a) => a.clone(),
        }
    }

    fn binary(
        &self,
        other: &Self,
        rat: impl Fn(&BigRational, &BigRational) -> BigRational,
        quad: impl Fn(&QuadraticReal, &QuadraticReal) -> Result<QuadraticReal, ScalarError>,
        adapt: impl Fn(&AdaptiveReal, &AdaptiveReal) -> AdaptiveReal,
    ) -> Result<Self, ScalarError> {
        use Scalar::*;
        Ok(match (self, other) {
            (Rational(a), Rational(b)) => Rational(rat(a, b)),
            (Quadratic(x), y) | (y, Quadratic(x)) if y.is_exact() => {
                let d = x.radicand();
                let (l, r) = if matches!(self, Quadratic(_)) {
                    (x.clone(), y.to_quadratic(d).expect("exact"))
                } else {
                    (y.to_quadratic(d).expect("exact"), x.clone())
                };
                let q = quad(&l, &r)?;
                if q.is_rational() {
                    Rational(q.rational_part().clone())
                } else {
                    Quadratic(q)
                }
            }
            (Adaptive(a), Adaptive(b)) => Adaptive(adapt(a, b)),
            (Adaptive(a), e) => Adaptive(adapt(a, &e.to_adaptive(promotion_bits(a)))),
            (e, Adaptive(b)) => Adaptive(adapt(&e.to_adaptive(promotion_bits(b)), b)),
            _ => unreachable!(),
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ScalarError> {
        self.binary(other, |a, b| a + b, |a, b| a.checked_add(b), |a, b| a.add(b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        self.binary(other, |a, b| a - b, |a, b| a.checked_sub(b), |a, b| a.sub(b))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        self.binary(other, |a, b| a * b, |a, b| a.checked_mul(b), |a, b| a.mul(b))
    }

    /// Exact division; enclosures are not divided.
    pub fn checked_div(&self, other: &Self) -> Result<Self, ScalarError> {
        if !self.is_exact() || !other.is_exact() {
            return Err(ScalarError::ExactRequired);
        }
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a / b)),
            _ => {
                let d = match (self, other) {
                    (Scalar::Quadratic(x), _) | (_, Scalar::Quadratic(x)) => x.radicand(),
                    _ => unreachable!(),
                };
                let q = self.to_quadratic(d).unwrap().checked_div(&other.to_quadratic(d).unwrap())?;
                Ok(Scalar::from(q))
            }
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        match self {
            Scalar::Rational(q) => Scalar::Rational(q * BigRational::from_integer(k.clone())),
            Scalar::Quadratic(x) => Scalar::from(x.mul_int(k)),
            Scalar::Adaptive(a) => Scalar::Adaptive(a.mul_int(k)),
        }
    }

    pub fn add_int(&self, k: &BigInt) -> Self {
        self + &Scalar::integer(k.clone())
    }

    /// Sign, or `PrecisionExhausted` for an enclosure that contains zero.
    pub fn sign(&self) -> Result<i8, ScalarError> {
        match self {
            Scalar::Rational(q) => Ok(if q.is_zero() {
                0
            } else if q.is_negative() {
                -1
            } else {
                1
            }),
            Scalar::Quadratic(x) => Ok(x.sign()),
            Scalar::Adaptive(a) => a.sign().ok_or(ScalarError::PrecisionExhausted {
                required_bits: a.accuracy_bits().saturating_mul(2).max(64),
                available_bits: a.accuracy_bits(),
            }),
        }
    }

    pub fn try_cmp(&self, other: &Self) -> Result<std::cmp::Ordering, ScalarError> {
        Ok(self.checked_sub(other)?.sign()?.cmp(&0))
    }

    pub fn abs(&self) -> Result<Self, ScalarError> {
        match self {
            Scalar::Adaptive(a) => Ok(Scalar::Adaptive(a.abs())),
            _ => Ok(if self.sign()? < 0 { -self } else { self.clone() }),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(q) => rational_to_f64(q),
            Scalar::Quadratic(x) => x.to_f64(),
            Scalar::Adaptive(a) => a.to_f64(),
        }
    }

    /// Rendering tagged with its mode: exact text, or a decimal with precision bits.
    pub fn render(&self) -> String {
        match self {
            Scalar::Adaptive(a) => format!("{} [{} bits]", a.to_decimal_string(), a.accuracy_bits()),
            _ => self.to_string(),
        }
    }
}

/// Nearest integer to `x` with ties resolved downward; the flag marks an exact tie.
pub fn nearest_integer(x: &Scalar) -> Result<(BigInt, bool), ScalarError> {
    match x {
        Scalar::Rational(q) => {
            let f = q.floor();
            let frac = q - &f;
            let half = BigRational::new(1.into(), 2.into());
            let f = f.to_integer();
            Ok(match frac.cmp(&half) {
                std::cmp::Ordering::Less => (f, false),
                std::cmp::Ordering::Equal => (f, true),
                std::cmp::Ordering::Greater => (f + 1, false),
            })
        }
        Scalar::Quadratic(x) => Ok(x.nearest_integer()),
        Scalar::Adaptive(a) => a.nearest_integer().ok_or(ScalarError::PrecisionExhausted {
            required_bits: a.accuracy_bits().saturating_add(32),
            available_bits: a.accuracy_bits(),
        }),
    }
}

/// `|||x|||`, the distance to the nearest integer, in the same kind as `x`.
pub fn frac_distance(x: &Scalar) -> Result<Scalar, ScalarError> {
    match x {
        Scalar::Adaptive(a) => Ok(Scalar::Adaptive(a.frac_distance())),
        Scalar::Quadratic(q) => Ok(Scalar::from(q.frac_distance())),
        Scalar::Rational(_) => {
            let (k, _) = nearest_integer(x)?;
            x.add_int(&-k).abs()
        }
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Rational(q)
    }
}

impl From<QuadraticReal> for Scalar {
    fn from(x: QuadraticReal) -> Self {
        if x.is_rational() {
            Scalar::Rational(x.rational_part().clone())
        } else {
            Scalar::Quadratic(x)
        }
    }
}

impl From<AdaptiveReal> for Scalar {
    fn from(a: AdaptiveReal) -> Self {
        Scalar::Adaptive(a)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("mixed quadratic fields")
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

scalar_binop!(Add, add, checked_add);
scalar_binop!(Sub, sub, checked_sub);
scalar_binop!(Mul, mul, checked_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Quadratic(x) => Scalar::Quadratic(-x),
            Scalar::Adaptive(a) => Scalar::Adaptive(a.neg()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Quadratic(x) => write!(f, "{x}"),
            Scalar::Adaptive(a) => write!(f, "{a}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    /// Exact text only: `p/q` or `p/q+r/s*sqrt(d)`.
    fn from_str(s: &str) -> Result<Self, ScalarError> {
        if s.contains("sqrt(") {
            Ok(Scalar::from(s.parse::<QuadraticReal>()?))
        } else {
            Ok(Scalar::Rational(parse_rational(s)?))
        }
    }
}

/// Max of `|x_i|` over a vector (`|||·|||`-style lifts use [`frac_distance`] per entry first).
pub fn max_abs(xs: &[Scalar]) -> Result<Scalar, ScalarError> {
    let mut best = Scalar::zero();
    for x in xs {
        let a = x.abs()?;
        if a.try_cmp(&best)? == std::cmp::Ordering::Greater {
            best = a;
        }
    }
    Ok(best)
}
