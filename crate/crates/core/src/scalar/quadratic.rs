//! Exact arithmetic in a real quadratic field `ℚ(√d)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::adaptive::AdaptiveReal;
use super::{parse_rational, ScalarError};

/// A number `a + b·√d` with rational `a`, `b` and a square-free radicand `d ≥ 2`.
///
/// Values whose irrational part is zero are compatible with every radicand, so
/// rationals mix freely with any field; two genuinely irrational operands must
/// share `d`.
#[derive(Clone, Debug)]
pub struct QuadraticReal {
    a: BigRational,
    b: BigRational,
    d: u64,
}

fn is_square_free(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

impl QuadraticReal {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Result<Self, ScalarError> {
        if !is_square_free(d) {
            return Err(ScalarError::BadRadicand(d));
        }
        Ok(Self { a, b, d })
    }

    pub fn from_rational(a: BigRational, d: u64) -> Result<Self, ScalarError> {
        Self::new(a, BigRational::zero(), d)
    }

    pub fn from_integer(a: i64, d: u64) -> Result<Self, ScalarError> {
        Self::from_rational(BigRational::from_integer(a.into()), d)
    }

    /// Shorthand for `(a_num/a_den) + (b_num/b_den)·√d`; panics on a bad radicand.
    pub fn from_parts(a_num: i64, a_den: i64, b_num: i64, b_den: i64, d: u64) -> Self {
        Self::new(
            BigRational::new(a_num.into(), a_den.into()),
            BigRational::new(b_num.into(), b_den.into()),
            d,
        )
        .expect("radicand must be square-free and at least 2")
    }

    /// The golden ratio `(1 + √5)/2`.
    pub fn golden() -> Self {
        Self::from_parts(1, 2, 1, 2, 5)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.b.is_zero() && self.a.is_integer()
    }

    fn joint_radicand(&self, other: &Self) -> Result<u64, ScalarError> {
        if self.b.is_zero() {
            Ok(other.d)
        } else if other.b.is_zero() || self.d == other.d {
            Ok(self.d)
        } else {
            Err(ScalarError::RadicandMismatch(self.d, other.d))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = self.joint_radicand(other)?;
        Ok(Self { a: &self.a + &other.a, b: &self.b + &other.b, d })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = self.joint_radicand(other)?;
        Ok(Self { a: &self.a - &other.a, b: &self.b - &other.b, d })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = self.joint_radicand(other)?;
        let dr = BigRational::from_integer(d.into());
        let a = &self.a * &other.a + &self.b * &other.b * dr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self { a, b, d })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ScalarError> {
        let inv = other.inverse()?;
        self.checked_mul(&inv)
    }

    /// `1/x = (a − b√d)/(a² − d·b²)`.
    pub fn inverse(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let norm = self.norm();
        Ok(Self { a: &self.a / &norm, b: -(&self.b / &norm), d: self.d })
    }

    /// Field norm `a² − d·b²`; nonzero for nonzero `x`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.into())
    }

    pub fn mul_rational(&self, k: &BigRational) -> Self {
        Self { a: &self.a * k, b: &self.b * k, d: self.d }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let k = BigRational::from_integer(k.clone());
        self.mul_rational(&k)
    }

    pub fn add_int(&self, k: &BigInt) -> Self {
        Self { a: &self.a + BigRational::from_integer(k.clone()), b: self.b.clone(), d: self.d }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact sign of `a + b√d`.
    pub fn sign(&self) -> i8 {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: the larger of a² and d·b² wins; equality is impossible.
        let a2 = &self.a * &self.a;
        let db2 = &self.b * &self.b * BigRational::from_integer(self.d.into());
        if a2 > db2 {
            sa
        } else {
            sb
        }
    }

    /// Writes the value as `(p + q√d)/r` with integers and `r > 0`.
    fn integral_form(&self) -> (BigInt, BigInt, BigInt) {
        let r = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer() * (&r / self.a.denom());
        let q = self.b.numer() * (&r / self.b.denom());
        (p, q, r)
    }

    /// `floor(q·√d·2^shift)` for an integer `q`.
    fn floor_scaled_root(q: &BigInt, d: u64, shift: u64) -> BigInt {
        if q.is_zero() {
            return BigInt::zero();
        }
        let radicand = (q * q * BigInt::from(d)) << (2 * shift);
        let s = radicand.sqrt();
        if q.sign() == Sign::Minus {
            // q√d is irrational, so its ceiling is isqrt + 1.
            -(s + BigInt::one())
        } else {
            s
        }
    }

    pub fn floor(&self) -> BigInt {
        let (p, q, r) = self.integral_form();
        let s = Self::floor_scaled_root(&q, self.d, 0);
        (p + s).div_floor(&r)
    }

    /// Nearest integer, ties (half-integers) resolved downward.
    pub fn nearest_integer(&self) -> (BigInt, bool) {
        let f = self.floor();
        // Sign of 2(x − f) − 1 decides the rounding direction.
        let two = BigInt::from(2);
        let probe = self.mul_int(&two).add_int(&(-(&f * &two) - 1));
        match probe.sign() {
            s if s < 0 => (f, false),
            0 => (f, true),
            _ => (f + 1, false),
        }
    }

    /// Distance `|||x|||` to the nearest integer, exactly.
    pub fn frac_distance(&self) -> Self {
        let (k, _) = self.nearest_integer();
        self.add_int(&-k).abs()
    }

    /// Enclosure with absolute radius at most `2^-(bits+2)`.
    pub fn to_adaptive(&self, bits: u32) -> AdaptiveReal {
        if self.b.is_zero() {
            return AdaptiveReal::from_rational(&self.a, bits);
        }
        let k = u64::from(bits) + 2;
        let (p, q, r) = self.integral_form();
        let s = Self::floor_scaled_root(&q, self.d, k);
        let low = (p << k) + s;
        let lo = low.div_floor(&r);
        let hi = (&low + BigInt::one()).div_ceil(&r);
        AdaptiveReal::from_bounds(lo, hi, -(k as i64))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_adaptive(64).to_f64()
    }
}

fn rational_sign(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_negative() {
        -1
    } else {
        1
    }
}

impl PartialEq for QuadraticReal {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.d == other.d)
    }
}

impl Eq for QuadraticReal {}

impl PartialOrd for QuadraticReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Panics when comparing elements of different fields.
impl Ord for QuadraticReal {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&QuadraticReal> for &QuadraticReal {
            type Output = QuadraticReal;
            fn $method(self, rhs: &QuadraticReal) -> QuadraticReal {
                self.$checked(rhs).expect("mixed quadratic fields")
            }
        }
        impl $trait<QuadraticReal> for QuadraticReal {
            type Output = QuadraticReal;
            fn $method(self, rhs: QuadraticReal) -> QuadraticReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QuadraticReal> for QuadraticReal {
            type Output = QuadraticReal;
            fn $method(self, rhs: &QuadraticReal) -> QuadraticReal {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &QuadraticReal {
    type Output = QuadraticReal;
    fn neg(self) -> QuadraticReal {
        QuadraticReal { a: -&self.a, b: -&self.b, d: self.d }
    }
}

impl Neg for QuadraticReal {
    type Output = QuadraticReal;
    fn neg(self) -> QuadraticReal {
        -&self
    }
}

impl fmt::Display for QuadraticReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.b.is_negative() { "-" } else { "+" };
        write!(f, "{}{}{}*sqrt({})", self.a, sep, self.b.abs(), self.d)
    }
}

impl FromStr for QuadraticReal {
    type Err = ScalarError;

    /// Parses `p/q+r/s*sqrt(d)`, also accepting `p/q-r/s*sqrt(d)` and a bare `r/s*sqrt(d)`.
    fn from_str(s: &str) -> Result<Self, ScalarError> {
        let bad = || ScalarError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = t.strip_suffix(')').ok_or_else(bad)?;
        let (head, d) = body.rsplit_once("*sqrt(").ok_or_else(bad)?;
        let d: u64 = d.parse().map_err(|_| bad())?;
        let bytes = head.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'+' | b'-' | b'/'));
        let (a, b) = match split {
            Some(i) => {
                let a = parse_rational(&head[..i])?;
                let b = if bytes[i] == b'-' {
                    -parse_rational(&head[i + 1..])?
                } else {
                    parse_rational(&head[i + 1..])?
                };
                (a, b)
            }
            None => (BigRational::zero(), parse_rational(head)?),
        };
        Self::new(a, b, d)
    }
}

impl From<&QuadraticReal> for (BigRational, BigRational) {
    fn from(x: &QuadraticReal) -> Self {
        (x.a.clone(), x.b.clone())
    }
}

impl QuadraticReal {
    pub fn one(d: u64) -> Self {
        Self { a: BigRational::one(), b: BigRational::zero(), d }
    }

    pub fn zero(d: u64) -> Self {
        Self { a: BigRational::zero(), b: BigRational::zero(), d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi() -> QuadraticReal {
        QuadraticReal::golden()
    }

    #[test]
    fn sign_cases() {
        assert_eq!(QuadraticReal::zero(5).sign(), 0);
        // 5 − 2φ = 4 − √5
        assert_eq!(QuadraticReal::from_parts(4, 1, -1, 1, 5).sign(), 1);
        // 2 − φ = 3/2 − √5/2
        assert_eq!(QuadraticReal::from_parts(3, 2, -1, 2, 5).sign(), 1);
        assert_eq!(QuadraticReal::from_parts(-3, 1, 1, 1, 5).sign(), -1);
        assert_eq!(QuadraticReal::from_parts(2, 1, 1, 1, 5).sign(), 1);
    }

    #[test]
    fn golden_identities() {
        let p = phi();
        let one = QuadraticReal::one(5);
        assert_eq!(&p * &p, &p + &one);
        assert_eq!(p.inverse().unwrap(), &p - &one);
    }

    #[test]
    fn nearest_integer_examples() {
        let seven = BigInt::from(7);
        let x = (phi() - QuadraticReal::one(5)).mul_int(&seven); // ≈ 4.3262
        assert_eq!(x.nearest_integer(), (BigInt::from(4), false));
        let half = QuadraticReal::from_parts(1, 2, 0, 1, 5);
        assert_eq!(half.nearest_integer(), (BigInt::zero(), true));
        assert_eq!(QuadraticReal::zero(5).nearest_integer(), (BigInt::zero(), false));
        let minus_half = QuadraticReal::from_parts(-1, 2, 0, 1, 5);
        assert_eq!(minus_half.nearest_integer(), (BigInt::from(-1), true));
    }

    #[test]
    fn frac_distance_examples() {
        let p = phi();
        let x = (&p - &QuadraticReal::one(5)).mul_int(&BigInt::from(7));
        let want = p.mul_int(&BigInt::from(7)).add_int(&BigInt::from(-11));
        assert_eq!(x.frac_distance(), want);
        let y = (&p - &QuadraticReal::one(5)).mul_int(&BigInt::from(5));
        assert_eq!(y.frac_distance(), p.mul_int(&BigInt::from(5)).add_int(&BigInt::from(-8)));
        assert!(QuadraticReal::from_integer(3, 5).unwrap().frac_distance().is_zero());
    }

    #[test]
    fn floor_of_negative_irrationals() {
        // −φ ≈ −1.618
        assert_eq!((-phi()).floor(), BigInt::from(-2));
        // 1 − √5 ≈ −1.236
        assert_eq!(QuadraticReal::from_parts(1, 1, -1, 1, 5).floor(), BigInt::from(-2));
        assert_eq!(QuadraticReal::from_parts(-7, 3, 0, 1, 5).floor(), BigInt::from(-3));
    }

    #[test]
    fn radicand_mismatch_is_an_error() {
        let a = QuadraticReal::from_parts(0, 1, 1, 1, 5);
        let b = QuadraticReal::from_parts(0, 1, 1, 1, 2);
        assert!(matches!(a.checked_add(&b), Err(ScalarError::RadicandMismatch(5, 2))));
        let r = QuadraticReal::from_parts(1, 3, 0, 1, 2);
        assert!(a.checked_mul(&r).is_ok());
        assert!(QuadraticReal::new(BigRational::zero(), BigRational::one(), 8).is_err());
    }

    #[test]
    fn text_round_trip() {
        for s in ["-1/2+1/2*sqrt(5)", "3/2-1/2*sqrt(5)", "0+7*sqrt(2)", "-5-2*sqrt(3)"] {
            let x: QuadraticReal = s.parse().unwrap();
            let back: QuadraticReal = x.to_string().parse().unwrap();
            assert_eq!(x, back, "{s}");
        }
        let x: QuadraticReal = "-1/2+-1/2*sqrt(5)".parse().unwrap();
        assert_eq!(x, QuadraticReal::from_parts(-1, 2, -1, 2, 5));
        assert_eq!(x.to_string(), "-1/2-1/2*sqrt(5)");
    }

    #[test]
    fn enclosures_contain_known_decimals() {
        let e = phi().to_adaptive(20);
        assert!(e.contains_f64(1.618_033_988_7));
        assert!(e.radius_f64() <= 2f64.powi(-19) * 2.0);
        let z = QuadraticReal::zero(5).to_adaptive(4);
        assert!(z.is_exact() && z.to_f64() == 0.0);
        let e = QuadraticReal::from_parts(3, 2, -1, 2, 5).to_adaptive(30);
        assert!(e.contains_f64(0.381_966_011_3));
        assert!(e.radius_f64() <= 2f64.powi(-29));
    }
}
