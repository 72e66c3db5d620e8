//! Certified fixed-point interval arithmetic.
//!
//! A [`FixedReal`] is a pair of integer mantissas `lo ≤ hi` over a common
//! power-of-two denominator, `[lo·2^-B, hi·2^-B]`. Every operation rounds the
//! lower mantissa down and the upper mantissa up, so the exact result is
//! always inside the returned interval. Floors are taken with
//! [`floor_scaled`], which refuses to answer when the interval straddles an
//! integer; [`Precision`] then retries at doubled precision.

mod series;

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub use series::{arctan_ratio, beta_const, log_of, pi_const, sqrt_int, LogBase};

/// Precision used when a caller gives no hint.
pub const DEFAULT_START_BITS: u32 = 64;
/// Hard ceiling on escalation.
pub const MAX_PRECISION_BITS: u32 = 1 << 16;

pub(crate) fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

pub(crate) fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

pub(crate) fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

pub(crate) fn shr_floor(a: &BigInt, k: u32) -> BigInt {
    div_floor(a, &pow2(k))
}

pub(crate) fn shr_ceil(a: &BigInt, k: u32) -> BigInt {
    div_ceil(a, &pow2(k))
}

/// An exact dyadic rational `numerator / 2^denominator_log2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicRational {
    numerator: u64,
    denominator_log2: u32,
}

impl DyadicRational {
    pub const ONE: DyadicRational = DyadicRational { numerator: 1, denominator_log2: 0 };
    pub const ZERO: DyadicRational = DyadicRational { numerator: 0, denominator_log2: 0 };

    pub fn new(numerator: u64, denominator_log2: u32) -> Result<Self> {
        if denominator_log2 > 126 {
            return Err(Error::invalid("dyadic denominator exponent must be at most 126"));
        }
        Ok(DyadicRational { numerator, denominator_log2 })
    }

    /// A dilation factor in `[1, 2)`: requires `2^b ≤ A < 2^(b+1)`.
    pub fn alpha(numerator: u64, denominator_log2: u32) -> Result<Self> {
        if denominator_log2 > 62 {
            return Err(Error::invalid("alpha resolution must be at most 62 bits"));
        }
        let low = 1u64 << denominator_log2;
        if numerator < low || numerator >= low << 1 {
            return Err(Error::invalid(alloc::format!("alpha = {numerator}/2^{denominator_log2} is not in [1, 2)")));
        }
        Ok(DyadicRational { numerator, denominator_log2 })
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Result<Self> {
        Self::new(1, k)
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator_log2(&self) -> u32 {
        self.denominator_log2
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn in_unit_dilation_range(&self) -> bool {
        let low = 1u128 << self.denominator_log2;
        let a = self.numerator as u128;
        a >= low && a < low << 1
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / libm::exp2(self.denominator_log2 as f64)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.denominator_log2)
    }
}

/// Certified enclosure `[lo·2^-B, hi·2^-B]` of a real number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixedReal {
    lo: BigInt,
    hi: BigInt,
    scale_bits: u32,
}

impl FixedReal {
    /// Panics if `lo > hi`.
    pub fn new(lo: BigInt, hi: BigInt, scale_bits: u32) -> Self {
        assert!(lo <= hi, "enclosure endpoints out of order");
        FixedReal { lo, hi, scale_bits }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        let n = n.into();
        FixedReal { lo: n.clone(), hi: n, scale_bits: 0 }
    }

    pub fn from_dyadic(d: DyadicRational) -> Self {
        let n = BigInt::from(d.numerator);
        FixedReal { lo: n.clone(), hi: n, scale_bits: d.denominator_log2 }
    }

    pub fn lo(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi(&self) -> &BigInt {
        &self.hi
    }

    pub fn scale_bits(&self) -> u32 {
        self.scale_bits
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// `hi - lo` in units of `2^-B`.
    pub fn width_mantissa(&self) -> BigInt {
        &self.hi - &self.lo
    }

    /// Whether the width is at most `2^-bits`.
    pub fn width_at_most(&self, bits: u32) -> bool {
        (self.width_mantissa() << bits) <= pow2(self.scale_bits)
    }

    /// Smallest `e` with width ≤ `2^e`, or `None` for an exact value.
    pub fn width_log2_ceil(&self) -> Option<i64> {
        let w = self.width_mantissa();
        if w.is_zero() {
            return None;
        }
        let mut e = w.bits() as i64;
        // w is a power of two: its bit length overshoots by one
        if (&w & (&w - 1u32)).is_zero() {
            e -= 1;
        }
        Some(e - self.scale_bits as i64)
    }

    fn mantissas_at(&self, bits: u32) -> (BigInt, BigInt) {
        debug_assert!(bits >= self.scale_bits);
        let s = bits - self.scale_bits;
        (&self.lo << s, &self.hi << s)
    }

    /// Re-expresses the enclosure at `bits` fractional bits; widens
    /// outward when `bits` is below the current scale.
    pub fn with_scale(&self, bits: u32) -> Self {
        if bits >= self.scale_bits {
            let (lo, hi) = self.mantissas_at(bits);
            FixedReal { lo, hi, scale_bits: bits }
        } else {
            let s = self.scale_bits - bits;
            FixedReal { lo: shr_floor(&self.lo, s), hi: shr_ceil(&self.hi, s), scale_bits: bits }
        }
    }

    fn aligned(&self, other: &FixedReal) -> (BigInt, BigInt, BigInt, BigInt, u32) {
        let b = self.scale_bits.max(other.scale_bits);
        let (a_lo, a_hi) = self.mantissas_at(b);
        let (b_lo, b_hi) = other.mantissas_at(b);
        (a_lo, a_hi, b_lo, b_hi, b)
    }

    pub fn add(&self, other: &FixedReal) -> FixedReal {
        let (al, ah, bl, bh, b) = self.aligned(other);
        FixedReal { lo: al + bl, hi: ah + bh, scale_bits: b }
    }

    pub fn sub(&self, other: &FixedReal) -> FixedReal {
        let (al, ah, bl, bh, b) = self.aligned(other);
        FixedReal { lo: al - bh, hi: ah - bl, scale_bits: b }
    }

    pub fn neg(&self) -> FixedReal {
        FixedReal { lo: -&self.hi, hi: -&self.lo, scale_bits: self.scale_bits }
    }

    /// Product, rounded outward to the larger of the two scales.
    pub fn mul(&self, other: &FixedReal) -> FixedReal {
        let products = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        let exact = FixedReal { lo, hi, scale_bits: self.scale_bits + other.scale_bits };
        exact.with_scale(self.scale_bits.max(other.scale_bits))
    }

    /// Exact multiplication by an integer.
    pub fn mul_int(&self, k: &BigInt) -> FixedReal {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if k.is_negative() {
            FixedReal { lo: b, hi: a, scale_bits: self.scale_bits }
        } else {
            FixedReal { lo: a, hi: b, scale_bits: self.scale_bits }
        }
    }

    /// Exact multiplication by `2^k` (`k` may be negative).
    pub fn mul_pow2(&self, k: i64) -> FixedReal {
        if k >= 0 {
            let k = k as u32;
            FixedReal { lo: &self.lo << k, hi: &self.hi << k, scale_bits: self.scale_bits }
        } else {
            let mut r = self.clone();
            r.scale_bits += (-k) as u32;
            r
        }
    }

    /// Exact multiplication by a dyadic rational.
    pub fn mul_dyadic(&self, d: DyadicRational) -> FixedReal {
        self.mul_int(&BigInt::from(d.numerator)).mul_pow2(-(d.denominator_log2 as i64))
    }

    /// Quotient by a strictly positive enclosure, rounded outward to the
    /// larger of the two scales.
    pub fn div(&self, other: &FixedReal) -> Result<FixedReal> {
        if !other.lo.is_positive() {
            return Err(Error::invalid("divisor enclosure must be strictly positive"));
        }
        let b = self.scale_bits.max(other.scale_bits);
        // (x/2^bx) / (y/2^by) * 2^b = x * 2^(by + b) / (y * 2^bx)
        let shift_num = other.scale_bits + b;
        let q = |x: &BigInt, y: &BigInt, up: bool| {
            let num = x << shift_num;
            let den = y << self.scale_bits;
            if up {
                div_ceil(&num, &den)
            } else {
                div_floor(&num, &den)
            }
        };
        let candidates_lo = [q(&self.lo, &other.lo, false), q(&self.lo, &other.hi, false)];
        let candidates_hi = [q(&self.hi, &other.lo, true), q(&self.hi, &other.hi, true)];
        let lo = candidates_lo.iter().min().unwrap().clone();
        let hi = candidates_hi.iter().max().unwrap().clone();
        Ok(FixedReal { lo, hi, scale_bits: b })
    }

    /// Whether `num/den` (with `den > 0`) lies in the enclosure.
    pub fn contains_ratio(&self, num: &BigInt, den: &BigInt) -> bool {
        assert!(den.is_positive());
        let scaled = num << self.scale_bits;
        &self.lo * den <= scaled && scaled <= &self.hi * den
    }

    pub fn contains_dyadic(&self, d: DyadicRational) -> bool {
        self.contains_ratio(&BigInt::from(d.numerator), &pow2(d.denominator_log2))
    }

    pub fn contains_int(&self, n: &BigInt) -> bool {
        self.contains_ratio(n, &BigInt::one())
    }

    /// Whether `other` is a subset of `self`.
    pub fn contains(&self, other: &FixedReal) -> bool {
        let (al, ah, bl, bh, _) = self.aligned(other);
        al <= bl && bh <= ah
    }

    /// `Less` when every point of `self` is below every point of `other`,
    /// `Greater` for the reverse, `None` when the enclosures overlap.
    pub fn certain_cmp(&self, other: &FixedReal) -> Option<Ordering> {
        let (al, ah, bl, bh, _) = self.aligned(other);
        if ah < bl {
            Some(Ordering::Less)
        } else if bh < al {
            Some(Ordering::Greater)
        } else if al == ah && bl == bh && al == bl {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn is_disjoint(&self, other: &FixedReal) -> bool {
        matches!(self.certain_cmp(other), Some(Ordering::Less) | Some(Ordering::Greater))
    }

    /// Midpoint as a float, for reports only.
    pub fn midpoint_f64(&self) -> f64 {
        let mid = &self.lo + &self.hi;
        // keep roughly 60 significant bits before converting
        let excess = (mid.bits() as i64 - 60).max(0) as u32;
        let m = shr_floor(&mid, excess).to_f64().unwrap_or(f64::NAN);
        m * libm::exp2(excess as f64 - self.scale_bits as f64 - 1.0)
    }

    /// Decimal endpoints with `digits` fractional digits, the lower rounded
    /// down and the upper rounded up.
    pub fn to_decimal(&self, digits: u32) -> (String, String) {
        let ten = BigInt::from(10u32).pow(digits);
        let den = pow2(self.scale_bits);
        let lo = div_floor(&(&self.lo * &ten), &den);
        let hi = div_ceil(&(&self.hi * &ten), &den);
        (format_fixed(&lo, digits), format_fixed(&hi, digits))
    }
}

fn format_fixed(n: &BigInt, digits: u32) -> String {
    use alloc::string::ToString;
    let neg = n.sign() == Sign::Minus;
    let mut s = n.abs().to_string();
    let d = digits as usize;
    if d > 0 {
        if s.len() <= d {
            let pad = d + 1 - s.len();
            s.insert_str(0, &"0".repeat(pad));
        }
        s.insert(s.len() - d, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

impl fmt::Display for FixedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.scale_bits as u64 * 30103 / 100000) as u32;
        let (lo, hi) = self.to_decimal(digits.clamp(1, 60));
        write!(f, "[{lo}, {hi}]")
    }
}

/// `⌊v·2^shift⌋`, provided it is the same for every `v` in the enclosure.
///
/// Returns [`Error::NeedsMorePrecision`] when the endpoints floor to
/// different integers.
pub fn floor_scaled(x: &FixedReal, shift: i64) -> Result<BigInt> {
    let e = shift - x.scale_bits as i64;
    let (lo, hi) = if e >= 0 {
        let e = e as u32;
        (&x.lo << e, &x.hi << e)
    } else {
        let e = u32::try_from(-e).map_err(|_| Error::invalid("shift out of range"))?;
        (shr_floor(&x.lo, e), shr_floor(&x.hi, e))
    };
    if lo == hi {
        Ok(lo)
    } else {
        Err(Error::NeedsMorePrecision { bits: x.scale_bits })
    }
}

/// Same as [`floor_scaled`] for a value known to be non-negative.
pub fn floor_scaled_unsigned(x: &FixedReal, shift: i64) -> Result<BigUint> {
    let n = floor_scaled(x, shift)?;
    n.to_biguint().ok_or_else(|| Error::invalid("negative floor where a natural number was expected"))
}

/// Escalation policy: start at `start_bits`, double while the answer is
/// undetermined, give up past `cap_bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub start_bits: u32,
    pub cap_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { start_bits: DEFAULT_START_BITS, cap_bits: MAX_PRECISION_BITS }
    }
}

impl Precision {
    pub fn new(start_bits: u32, cap_bits: u32) -> Result<Self> {
        if start_bits < 8 || cap_bits < start_bits || cap_bits > MAX_PRECISION_BITS {
            return Err(Error::invalid("precision needs 8 ≤ start ≤ cap ≤ 65536"));
        }
        Ok(Precision { start_bits, cap_bits })
    }

    pub fn starting_at(self, bits: u32) -> Self {
        Precision { start_bits: bits.clamp(8, self.cap_bits), ..self }
    }

    /// Runs `attempt` at increasing precision until it stops reporting
    /// [`Error::NeedsMorePrecision`].
    pub fn escalate<T>(&self, mut attempt: impl FnMut(u32) -> Result<T>) -> Result<T> {
        let mut bits = self.start_bits.min(self.cap_bits);
        loop {
            match attempt(bits) {
                Err(Error::NeedsMorePrecision { .. }) => {
                    if bits >= self.cap_bits {
                        return Err(Error::PrecisionCapExceeded { cap: self.cap_bits });
                    }
                    bits = bits.saturating_mul(2).min(self.cap_bits);
                }
                other => return other,
            }
        }
    }

    /// Certified `⌊v·2^shift⌋` where `enclose(bits)` encloses `v`.
    pub fn floor(&self, shift: i64, mut enclose: impl FnMut(u32) -> Result<FixedReal>) -> Result<BigInt> {
        self.escalate(|bits| floor_scaled(&enclose(bits)?, shift))
    }
}

#[cfg(test)]
mod tests;
