//! Two-squares decomposition of primes `p ≡ 1 (mod 4)` and their angles.
//!
//! Conventions: `p = a² + b²` with `a > b > 0`; `ρ̄_p = a + bi` and
//! `ρ_p = a − bi`, so `ρ̄_p/ρ_p = e^{2πiφ_p}` with `φ_p = arctan(b/a)/π`,
//! which lies in `(0, 1/4)`.

use core::cmp::Ordering;
use core::ops::{Mul, Rem, Sub};

use num_bigint::BigInt;

use crate::precision::{arctan_ratio, pi_const, FixedReal};
use crate::primes::{is_prime, pow_mod};
use crate::{Error, Result};

/// Largest prime accepted by [`two_squares`]; keeps every Gaussian
/// product inside `i128`.
pub const MAX_TWO_SQUARES_PRIME: u64 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GaussianInt {
    pub re: i128,
    pub im: i128,
}

impl GaussianInt {
    pub const fn new(re: i128, im: i128) -> Self {
        GaussianInt { re, im }
    }

    pub fn conj(self) -> Self {
        GaussianInt::new(self.re, -self.im)
    }

    pub fn norm(self) -> i128 {
        self.re * self.re + self.im * self.im
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    /// Quotient rounded to the nearest Gaussian integer, so the remainder
    /// has norm at most half the divisor's.
    pub fn div_round(self, d: Self) -> Self {
        let n = d.norm();
        let num = self * d.conj();
        GaussianInt::new(round_div(num.re, n), round_div(num.im, n))
    }

    pub fn gcd(mut self, mut other: Self) -> Self {
        while !other.is_zero() {
            let r = self % other;
            self = other;
            other = r;
        }
        self
    }
}

impl Mul for GaussianInt {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        GaussianInt::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Sub for GaussianInt {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        GaussianInt::new(self.re - o.re, self.im - o.im)
    }
}

impl Rem for GaussianInt {
    type Output = Self;

    fn rem(self, d: Self) -> Self {
        self - self.div_round(d) * d
    }
}

fn round_div(a: i128, n: i128) -> i128 {
    // nearest integer to a/n for n > 0
    (2 * a + n).div_euclid(2 * n)
}

fn check_class_prime(p: u64) -> Result<()> {
    if p % 4 != 1 {
        return Err(Error::NotOneModFour(p));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// A square root of −1 modulo a prime `p ≡ 1 (mod 4)`.
///
/// Uses `c^((p−1)/4)` for the least quadratic non-residue `c`.
pub fn sqrt_minus_one_mod_p(p: u64) -> Result<u64> {
    check_class_prime(p)?;
    let half = (p - 1) / 2;
    let mut c = 2;
    while pow_mod(c, half, p) != p - 1 {
        c += 1;
    }
    Ok(pow_mod(c, (p - 1) / 4, p))
}

/// `p = a² + b²` with `a > b > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GaussianPrimeDecomposition {
    p: u64,
    a: u64,
    b: u64,
}

impl GaussianPrimeDecomposition {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// `a + bi`, the factor with `Re > Im > 0`.
    pub fn rho_bar(&self) -> GaussianInt {
        GaussianInt::new(self.a as i128, self.b as i128)
    }

    /// `a − bi`.
    pub fn rho(&self) -> GaussianInt {
        self.rho_bar().conj()
    }
}

/// Splits `p` via the Gaussian gcd of `p` and `t + i`, where `t² ≡ −1`.
pub fn two_squares(p: u64) -> Result<GaussianPrimeDecomposition> {
    check_class_prime(p)?;
    if p >= MAX_TWO_SQUARES_PRIME {
        return Err(Error::OutOfRange(p));
    }
    let t = sqrt_minus_one_mod_p(p)?;
    let g = GaussianInt::new(p as i128, 0).gcd(GaussianInt::new(t as i128, 1));
    let (x, y) = (g.re.unsigned_abs() as u64, g.im.unsigned_abs() as u64);
    let (a, b) = match x.cmp(&y) {
        Ordering::Greater => (x, y),
        _ => (y, x),
    };
    debug_assert_eq!(a as u128 * a as u128 + b as u128 * b as u128, p as u128);
    Ok(GaussianPrimeDecomposition { p, a, b })
}

/// Certified enclosure of `φ_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Angle {
    p: u64,
    enclosure: FixedReal,
    bits: u32,
}

impl Angle {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn enclosure(&self) -> &FixedReal {
        &self.enclosure
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }
}

/// `φ_p = arctan(b/a)/π` to within `2^-bits`.
pub fn phi_of(p: u64, bits: u32) -> Result<Angle> {
    Ok(phi_of_decomposition(&two_squares(p)?, bits))
}

pub fn phi_of_decomposition(d: &GaussianPrimeDecomposition, bits: u32) -> Angle {
    let bits = bits.max(16);
    let w = bits + 4;
    let atan = arctan_ratio(d.b, d.a, w).expect("b < a");
    let enclosure = atan.div(&pi_const(w)).expect("π > 0");
    debug_assert!(enclosure.width_at_most(bits));
    debug_assert!(enclosure.lo() > &BigInt::from(0));
    Angle { p: d.p, enclosure, bits }
}
