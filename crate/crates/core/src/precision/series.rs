use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::{div_ceil, div_floor, pow2, shr_ceil, shr_floor, FixedReal};
use crate::{Error, Result};

// Working precision beyond the requested width. Covers the per-term
// rounding of the series, the 2^h rescaling after argument halving and the
// factor e in e·ln 2.
const GUARD_BITS: u32 = 40;

fn floor_sqrt(v: &BigInt) -> BigInt {
    BigInt::from(v.magnitude().sqrt())
}

fn ceil_sqrt(v: &BigInt) -> BigInt {
    let s = floor_sqrt(v);
    if &s * &s < *v {
        s + 1u32
    } else {
        s
    }
}

/// Bound on `arctan(x)` for the exact dyadic `x = xm·2^-w`, `0 ≤ x ≤ 1/8`.
///
/// Partial sums of the alternating series bracket the limit: stopping after
/// a negative term gives a lower bound, after a positive term an upper one.
/// Terms are rounded so the rounded partial sum stays on the same side.
fn arctan_bound(xm: &BigInt, w: u32, upper: bool) -> BigInt {
    let sq = xm * xm;
    let x2_dn = shr_floor(&sq, w);
    let x2_up = shr_ceil(&sq, w);
    let mut pow_dn = xm.clone();
    let mut pow_up = xm.clone();
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let d = BigInt::from(2 * k + 1);
        let positive = k.is_multiple_of(2);
        let term = if positive == upper { div_ceil(&pow_up, &d) } else { div_floor(&pow_dn, &d) };
        if positive {
            sum += term;
        } else {
            sum -= term;
        }
        let right_parity = positive == upper;
        if right_parity && pow_up <= BigInt::one() {
            return sum;
        }
        pow_dn = shr_floor(&(&pow_dn * &x2_dn), w);
        pow_up = shr_ceil(&(&pow_up * &x2_up), w);
        k += 1;
    }
}

/// `x / (1 + sqrt(1 + x²))`, i.e. `tan(θ/2)` from `tan θ`, rounded down
/// (or up) at scale `w`.
fn halve_angle(xm: &BigInt, w: u32, upper: bool) -> BigInt {
    let one = pow2(w);
    let sq = xm * xm;
    let radicand = if upper { &one + shr_floor(&sq, w) } else { &one + shr_ceil(&sq, w) } << w;
    // a larger root gives a smaller quotient
    let root = if upper { floor_sqrt(&radicand) } else { ceil_sqrt(&radicand) };
    let num = xm << w;
    let den = one + root;
    if upper {
        div_ceil(&num, &den)
    } else {
        div_floor(&num, &den)
    }
}

/// Enclosure of `arctan(num/den)` of width at most `2^-bits`, for
/// `0 ≤ num < den`.
pub fn arctan_ratio(num: impl Into<BigUint>, den: impl Into<BigUint>, bits: u32) -> Result<FixedReal> {
    let num = BigInt::from(num.into());
    let den = BigInt::from(den.into());
    if den.is_zero() || num >= den {
        return Err(Error::invalid("arctan_ratio needs 0 ≤ num < den"));
    }
    let w = bits + GUARD_BITS;
    let mut x_lo = div_floor(&(&num << w), &den);
    let mut x_hi = div_ceil(&(&num << w), &den);
    let eighth = pow2(w - 3);
    let mut halvings = 0u32;
    while x_hi > eighth {
        x_lo = halve_angle(&x_lo, w, false);
        x_hi = halve_angle(&x_hi, w, true);
        halvings += 1;
    }
    let lo = arctan_bound(&x_lo, w, false) << halvings;
    let hi = arctan_bound(&x_hi, w, true) << halvings;
    Ok(FixedReal::new(lo, hi, w))
}

/// Enclosure of π of width at most `2^-bits`, from
/// `π = 16·arctan(1/5) − 4·arctan(1/239)`.
pub fn pi_const(bits: u32) -> FixedReal {
    let w = bits.max(8) + 8;
    let a = arctan_ratio(1u32, 5u32, w).expect("1/5 is in range");
    let b = arctan_ratio(1u32, 239u32, w).expect("1/239 is in range");
    a.mul_int(&BigInt::from(16)).sub(&b.mul_int(&BigInt::from(4)))
}

/// Bounds on `atanh(u/v)` at scale `w`, for `0 < u/v ≤ 1/2`.
fn atanh_ratio(u: &BigInt, v: &BigInt, w: u32) -> FixedReal {
    let z_lo = div_floor(&(u << w), v);
    let z_hi = div_ceil(&(u << w), v);
    let z2_dn = shr_floor(&(&z_lo * &z_lo), w);
    let z2_up = shr_ceil(&(&z_hi * &z_hi), w);
    let mut pow_dn = z_lo;
    let mut pow_up = z_hi;
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let d = BigInt::from(2 * k + 1);
        lo += div_floor(&pow_dn, &d);
        hi += div_ceil(&pow_up, &d);
        if pow_up <= BigInt::one() {
            // the remaining terms sum to at most z^(2k+1)·z²/(1-z²) ≤ one ulp
            hi += 1u32;
            return FixedReal::new(lo, hi, w);
        }
        pow_dn = shr_floor(&(&pow_dn * &z2_dn), w);
        pow_up = shr_ceil(&(&pow_up * &z2_up), w);
        k += 1;
    }
}

/// Base of [`log_of`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogBase {
    Natural,
    Two,
}

/// Enclosure of `ln n` or `log₂ n` of width at most `2^-bits`.
///
/// With `n = 2^e·m`, `1 < m < 2`, uses `ln m = 2·atanh((m−1)/(m+1))` and
/// `ln 2 = 2·atanh(1/3)`. Powers of two are exact in base 2.
pub fn log_of(n: u64, base: LogBase, bits: u32) -> Result<FixedReal> {
    if n < 2 {
        return Err(Error::invalid("logarithm needs n ≥ 2"));
    }
    let e = 63 - n.leading_zeros();
    let w = bits + GUARD_BITS;
    let half_ln2 = || atanh_ratio(&BigInt::one(), &BigInt::from(3), w);
    let pow = 1u64 << e;
    if n == pow {
        return Ok(match base {
            LogBase::Two => FixedReal::from_int(e),
            LogBase::Natural => half_ln2().mul_int(&BigInt::from(2 * e)),
        });
    }
    let u = BigInt::from(n - pow);
    let v = BigInt::from(n as u128 + pow as u128);
    let half_ln_m = atanh_ratio(&u, &v, w);
    Ok(match base {
        LogBase::Natural => half_ln2().mul_int(&BigInt::from(2 * e)).add(&half_ln_m.mul_int(&BigInt::from(2))),
        LogBase::Two => FixedReal::from_int(e).add(&half_ln_m.div(&half_ln2())?),
    })
}

/// Enclosure of `√n` of width at most `2^-bits`.
pub fn sqrt_int(n: u64, bits: u32) -> FixedReal {
    let radicand = BigInt::from(n) << (2 * bits);
    let lo = floor_sqrt(&radicand);
    let hi = ceil_sqrt(&radicand);
    FixedReal::new(lo, hi, bits)
}

/// Enclosure of `β = 1 + √2`, the positive root of `β² − 2β − 1 = 0`.
pub fn beta_const(bits: u32) -> FixedReal {
    FixedReal::from_int(1).add(&sqrt_int(2, bits))
}
