//! Dyadic midpoint-radius enclosures.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ScalarError;

/// The closed interval `[(mid − rad)·2^exp, (mid + rad)·2^exp]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptiveReal {
    mid: BigInt,
    rad: BigUint,
    exp: i64,
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << (e as u64))
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (e.unsigned_abs()))
    }
}

impl AdaptiveReal {
    pub fn new(mid: BigInt, rad: BigUint, exp: i64) -> Self {
        Self { mid, rad, exp }
    }

    pub fn exact_integer(k: BigInt) -> Self {
        Self { mid: k, rad: BigUint::zero(), exp: 0 }
    }

    /// Interval `[lo, hi]·2^exp` with `lo ≤ hi`.
    pub(crate) fn from_bounds(lo: BigInt, hi: BigInt, exp: i64) -> Self {
        debug_assert!(lo <= hi);
        let rad = (&hi - &lo).magnitude().clone();
        Self { mid: lo + hi, rad, exp: exp - 1 }
    }

    /// Enclosure of a rational with absolute radius at most `2^-(bits+2)`.
    pub fn from_rational(q: &BigRational, bits: u32) -> Self {
        let k = u64::from(bits) + 2;
        let scaled = q.numer() << k;
        let (lo, rem) = scaled.div_mod_floor(q.denom());
        if rem.is_zero() {
            return Self { mid: lo, rad: BigUint::zero(), exp: -(k as i64) }.normalized();
        }
        let hi = &lo + 1;
        Self::from_bounds(lo, hi, -(k as i64))
    }

    pub fn mid_rational(&self) -> BigRational {
        BigRational::from_integer(self.mid.clone()) * pow2(self.exp)
    }

    pub fn radius_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.rad.clone())) * pow2(self.exp)
    }

    pub fn lower(&self) -> BigRational {
        self.mid_rational() - self.radius_rational()
    }

    pub fn upper(&self) -> BigRational {
        self.mid_rational() + self.radius_rational()
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower() <= x && x <= &self.upper()
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        BigRational::from_float(x).is_some_and(|q| self.contains(&q))
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.mid_rational())
    }

    pub fn radius_f64(&self) -> f64 {
        rational_to_f64(&self.radius_rational())
    }

    /// Number of correct binary digits after the point: `⌊−log₂ rad⌋`, capped for exact values.
    pub fn accuracy_bits(&self) -> u32 {
        if self.rad.is_zero() {
            return u32::MAX;
        }
        let rad_log = self.rad.bits() as i64 + self.exp; // rad < 2^rad_log
        if rad_log >= 0 {
            0
        } else {
            rad_log.unsigned_abs().min(u64::from(u32::MAX - 1)) as u32
        }
    }

    /// Drops trailing zero bits shared by midpoint and radius.
    fn normalized(mut self) -> Self {
        if self.mid.is_zero() && self.rad.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz_mid = self.mid.trailing_zeros().unwrap_or(u64::MAX);
        let tz_rad = self.rad.trailing_zeros().unwrap_or(u64::MAX);
        let tz = tz_mid.min(tz_rad);
        if tz > 0 && tz != u64::MAX {
            self.mid >>= tz;
            self.rad >>= tz;
            self.exp += tz as i64;
        }
        self
    }

    fn aligned(&self, exp: i64) -> (BigInt, BigUint) {
        debug_assert!(exp <= self.exp);
        let s = (self.exp - exp) as u64;
        (&self.mid << s, &self.rad << s)
    }

    pub fn add(&self, other: &Self) -> Self {
        let exp = self.exp.min(other.exp);
        let (m1, r1) = self.aligned(exp);
        let (m2, r2) = other.aligned(exp);
        Self { mid: m1 + m2, rad: r1 + r2, exp }.normalized()
    }

    pub fn neg(&self) -> Self {
        Self { mid: -&self.mid, rad: self.rad.clone(), exp: self.exp }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let a1 = self.mid.magnitude();
        let a2 = other.mid.magnitude();
        let rad = a1 * &other.rad + a2 * &self.rad + &self.rad * &other.rad;
        Self { mid: &self.mid * &other.mid, rad, exp: self.exp + other.exp }.normalized()
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self { mid: &self.mid * k, rad: &self.rad * k.magnitude(), exp: self.exp }.normalized()
    }

    pub fn abs(&self) -> Self {
        Self { mid: self.mid.abs(), rad: self.rad.clone(), exp: self.exp }
    }

    /// Enclosure of `max(x, y)` for `x` in `self` and `y` in `other`.
    pub fn max(&self, other: &Self) -> Self {
        let exp = self.exp.min(other.exp);
        let (m1, r1) = self.aligned(exp);
        let (m2, r2) = other.aligned(exp);
        let (r1, r2) = (BigInt::from(r1), BigInt::from(r2));
        let lo = (&m1 - &r1).max(&m2 - &r2);
        let hi = (m1 + r1).max(m2 + r2);
        Self::from_bounds(lo, hi, exp).normalized()
    }

    /// Sign if decidable from the enclosure.
    pub fn sign(&self) -> Option<i8> {
        let m = self.mid.magnitude();
        if self.rad.is_zero() {
            return Some(match self.mid.sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            });
        }
        if m > &self.rad {
            Some(if self.mid.is_negative() { -1 } else { 1 })
        } else {
            None
        }
    }

    /// Rounds outward so that the exponent is at least `-bits`.
    pub fn round_to(&self, bits: u32) -> Self {
        let target = -i64::from(bits);
        if self.exp >= target {
            return self.clone();
        }
        let s = (target - self.exp) as u64;
        let lo = (&self.mid - BigInt::from(self.rad.clone())) >> s; // floor shift
        let hi = -((-(&self.mid + BigInt::from(self.rad.clone()))) >> s); // ceil shift
        Self::from_bounds(lo, hi, target).normalized()
    }

    /// Nearest integer with ties going down, or `None` when the enclosure
    /// straddles a half-integer.
    pub fn nearest_integer(&self) -> Option<(BigInt, bool)> {
        let lo = self.lower();
        let hi = self.upper();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let k_lo = (&lo - &half).ceil().to_integer();
        let k_hi = (&hi - &half).ceil().to_integer();
        if k_lo != k_hi {
            return None;
        }
        let tie = self.rad.is_zero() && (&lo - &half).is_integer();
        Some((k_lo, tie))
    }

    /// Enclosure of `|||x|||`, from the 1-Lipschitz property of the distance.
    pub fn frac_distance(&self) -> Self {
        let m = self.mid_rational();
        let d = (&m - m.round()).abs();
        // d is dyadic with exponent ≥ self.exp
        let scaled = d * pow2(-self.exp);
        debug_assert!(scaled.is_integer());
        Self { mid: scaled.to_integer(), rad: self.rad.clone(), exp: self.exp }.normalized()
    }

    /// Decimal midpoint with a `±` radius, both in scientific notation.
    pub fn to_decimal_string(&self) -> String {
        format!("{:e}±{:.3e}", self.to_f64(), self.radius_f64())
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    // Scale into a range where the integer quotient carries ~64 significant bits.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = 64 - (nb - db);
    let scaled = if shift >= 0 {
        (q.numer() << (shift as u64)) / q.denom()
    } else {
        q.numer() / (q.denom() << (shift.unsigned_abs()))
    };
    let f = scaled.to_f64().unwrap_or(f64::NAN);
    f * 2f64.powi(-(shift.clamp(i32::MIN as i64, i32::MAX as i64) as i32))
}

impl fmt::Display for AdaptiveReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

/// Source of ever-tighter enclosures for a real number.
pub trait Refine: Send + Sync {
    fn enclose(&self, bits: u32) -> Result<AdaptiveReal, ScalarError>;
}

impl Refine for super::QuadraticReal {
    fn enclose(&self, bits: u32) -> Result<AdaptiveReal, ScalarError> {
        Ok(self.to_adaptive(bits))
    }
}

impl Refine for BigRational {
    fn enclose(&self, bits: u32) -> Result<AdaptiveReal, ScalarError> {
        Ok(AdaptiveReal::from_rational(self, bits))
    }
}

/// A value known only to a fixed number of bits (e.g. a decimal typed on the command line).
#[derive(Clone, Debug)]
pub struct BoundedPrecision {
    value: BigRational,
    max_bits: u32,
}

impl BoundedPrecision {
    pub fn new(value: BigRational, max_bits: u32) -> Self {
        Self { value, max_bits }
    }

    pub fn max_bits(&self) -> u32 {
        self.max_bits
    }
}

impl Refine for BoundedPrecision {
    fn enclose(&self, bits: u32) -> Result<AdaptiveReal, ScalarError> {
        if bits > self.max_bits {
            return Err(ScalarError::PrecisionExhausted { required_bits: bits, available_bits: self.max_bits });
        }
        Ok(AdaptiveReal::from_rational(&self.value, self.max_bits))
    }
}

/// Nearest integer of a refinable value, doubling precision until decided.
pub fn nearest_integer_refined(
    source: &dyn Refine,
    start_bits: u32,
    max_bits: u32,
) -> Result<(BigInt, bool), ScalarError> {
    let mut bits = start_bits.max(1);
    loop {
        let enc = source.enclose(bits)?;
        if let Some(k) = enc.nearest_integer() {
            return Ok(k);
        }
        if bits >= max_bits {
            return Err(ScalarError::PrecisionExhausted { required_bits: bits.saturating_mul(2), available_bits: bits });
        }
        bits = bits.saturating_mul(2).min(max_bits);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_enclosure_radius() {
        let e = AdaptiveReal::from_rational(&q(1, 3), 20);
        assert!(e.contains(&q(1, 3)));
        assert!(e.radius_rational() <= q(1, 1 << 22));
        assert!(AdaptiveReal::from_rational(&q(3, 4), 10).is_exact());
    }

    #[test]
    fn arithmetic_keeps_enclosures() {
        let a = AdaptiveReal::from_rational(&q(1, 3), 40);
        let b = AdaptiveReal::from_rational(&q(-2, 7), 40);
        assert!(a.add(&b).contains(&(q(1, 3) + q(-2, 7))));
        assert!(a.sub(&b).contains(&(q(1, 3) - q(-2, 7))));
        assert!(a.mul(&b).contains(&(q(1, 3) * q(-2, 7))));
        let big = BigInt::from(1_000_003);
        assert!(a.mul_int(&big).contains(&(q(1, 3) * BigRational::from_integer(big))));
    }

    #[test]
    fn nearest_integer_undecidable_at_half() {
        let e = AdaptiveReal::from_rational(&q(1, 2), 10);
        assert_eq!(e.nearest_integer(), Some((BigInt::zero(), true)));
        let fuzzy = AdaptiveReal::new(BigInt::from(1), BigUint::from(1u32), -1); // [0, 1]
        assert_eq!(fuzzy.nearest_integer(), None);
        let clear = AdaptiveReal::from_rational(&q(7, 3), 10);
        assert_eq!(clear.nearest_integer(), Some((BigInt::from(2), false)));
    }

    #[test]
    fn bounded_precision_refuses_extra_bits() {
        let src = BoundedPrecision::new(q(1, 3), 24);
        assert!(src.enclose(24).is_ok());
        assert!(matches!(
            src.enclose(40),
            Err(ScalarError::PrecisionExhausted { required_bits: 40, available_bits: 24 })
        ));
    }

    #[test]
    fn round_to_is_outward() {
        let a = AdaptiveReal::from_rational(&q(5, 7), 60);
        let r = a.round_to(10);
        assert!(r.contains(&q(5, 7)));
        assert!(r.radius_rational() <= q(2, 1 << 10));
    }

    #[test]
    fn f64_conversion() {
        assert_eq!(rational_to_f64(&q(1, 4)), 0.25);
        assert!((rational_to_f64(&q(-1, 3)) + 1.0 / 3.0).abs() < 1e-16);
        let huge = BigRational::from_integer(BigInt::one() << 300u32);
        assert_eq!(rational_to_f64(&huge), 2f64.powi(300));
    }
}
