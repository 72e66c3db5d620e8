//! The infinite construction, class by class.
//!
//! A prime `p ≡ 1 (mod 4)` belongs to class `K` when
//! `2^((K−2)²) < p^β < 2^((K−1)²)`, `β = 1 + √2`. Its element is built from
//! `m_p = ⌊2^(K²)·α·φ_p⌋`: the `K²` binary digits of `m_p` are cut into
//! blocks of `1, 3, 5, …, 2K−1` digits, the blocks are laid out with three
//! zero bits between them, and a leading bit `t_p = 2^(K²+3K+2)` marks the
//! class. Equal sums can then only come from blockwise-equal sums, which
//! [`find_bad_tuples`] enumerates and [`prune`] removes.

mod blocks;
mod prune;
mod tuples;

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};

use crate::gaussian::{phi_of, phi_of_decomposition, two_squares, GaussianPrimeDecomposition};
use crate::precision::{beta_const, floor_scaled_unsigned, log_of, DyadicRational, FixedReal, LogBase, Precision};
use crate::primes::{for_each_prime_upto, is_prime, PrimeTable, ResidueClass};
use crate::{Error, Result};

pub use blocks::{assemble, block_offset, block_width, blocks_of, digits_value, lead_exponent, MAX_BLOCK_CLASS};
pub use prune::{
    construct, counting, dedup, prune, slope_at, ConstructOptions, Construction, Dedup, SidonSet, SlopeRow,
};
pub use tuples::{angle_window_admits, class_gate, find_bad_tuples, find_bad_tuples_filtered, BadTuple};

/// Smallest class index; no prime `≥ 5` falls below it.
pub const K_MIN: u32 = 3;
/// Default largest class.
pub const DEFAULT_K_MAX: u32 = 6;
/// From this class on, a run is too large to verify routinely.
pub const VERIFY_LIMIT_K: u32 = 9;
// 41422/100000 > 1/β = √2 − 1 > 41421/100000
const INV_BETA_UPPER: (u64, u64) = (41_422, 100_000);
const INV_BETA_LOWER: (u64, u64) = (41_421, 100_000);
// extra bits beyond K² + log₂ of α's denominator when caching angles
const ANGLE_GUARD_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionParams {
    pub alpha: DyadicRational,
    /// Reporting enclosure of `β`; class decisions recompute it as needed.
    pub beta: FixedReal,
    pub k_min: u32,
    pub k_max: u32,
    pub precision: Precision,
}

impl ConstructionParams {
    pub fn new(alpha: DyadicRational, k_max: u32) -> Result<Self> {
        if !alpha.in_unit_dilation_range() {
            return Err(Error::invalid("α must be a dyadic rational in [1, 2)"));
        }
        if k_max < K_MIN {
            return Err(Error::invalid("k_max must be at least 3 (classes start above 2)"));
        }
        if k_max > MAX_BLOCK_CLASS {
            return Err(Error::OutOfRange(k_max as u64));
        }
        Ok(ConstructionParams { alpha, beta: beta_const(128), k_min: K_MIN, k_max, precision: Precision::default() })
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn with_alpha(mut self, alpha: DyadicRational) -> Result<Self> {
        if !alpha.in_unit_dilation_range() {
            return Err(Error::invalid("α must be a dyadic rational in [1, 2)"));
        }
        self.alpha = alpha;
        Ok(self)
    }
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

/// Upper bound on every prime of classes `≤ k`: `2^⌈(k−1)²·0.41422⌉`.
pub fn class_bound(k: u32) -> Result<u64> {
    let (n, d) = INV_BETA_UPPER;
    let e = ((k as u64 - 1).pow(2) * n).div_ceil(d);
    if e >= 62 {
        return Err(Error::OutOfRange(k as u64));
    }
    Ok(1 << e)
}

// every prime of class k exceeds this
fn class_floor(k: u32) -> u64 {
    let (n, d) = INV_BETA_LOWER;
    let e = (k as u64).saturating_sub(2).pow(2) * n / d;
    1u64.checked_shl(e as u32).unwrap_or(u64::MAX)
}

/// The class `K` with `(K−2)² < β·log₂ p < (K−1)²`.
pub fn k_index(p: u64, params: &ConstructionParams) -> Result<u32> {
    check_class_prime(p)?;
    params.precision.escalate(|bits| {
        let w = bits + 8;
        let x = beta_const(w).mul(&log_of(p, LogBase::Two, w)?);
        let floor_lo = x.with_scale(0).lo().clone();
        let j = floor_lo.magnitude().sqrt();
        let j = BigInt::from(j);
        let below = FixedReal::from_int(&j * &j);
        let above = FixedReal::from_int((&j + 1u32) * (&j + 1u32));
        let inside = below.certain_cmp(&x) == Some(core::cmp::Ordering::Less)
            && x.certain_cmp(&above) == Some(core::cmp::Ordering::Less);
        if inside {
            Ok(u32::try_from(j).expect("class index fits") + 2)
        } else {
            Err(Error::NeedsMorePrecision { bits })
        }
    })
}

/// Primes of class `K`, ascending.
pub fn class_members(k: u32, params: &ConstructionParams) -> Result<PrimeTable> {
    if k < K_MIN {
        return Err(Error::invalid("classes start at 3"));
    }
    let bound = class_bound(k)?;
    let floor = class_floor(k);
    let mut members = Vec::new();
    let mut failure = None;
    for_each_prime_upto(bound, |p| {
        if failure.is_some() || p < 5 || p % 4 != 1 || p <= floor {
            return;
        }
        match k_index(p, params) {
            Ok(kp) if kp == k => members.push(p),
            Ok(_) => {}
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(PrimeTable::from_sorted(bound, members, Some(ResidueClass::OneModFour)))
}

fn angle_bits(k: u32, alpha: DyadicRational) -> u32 {
    k * k + alpha.denominator_log2() + ANGLE_GUARD_BITS
}

fn m_from_angle(p: u64, k: u32, angle: &FixedReal, alpha: DyadicRational, precision: &Precision) -> Result<BigUint> {
    let shift = (k * k) as i64;
    match floor_scaled_unsigned(&angle.mul_dyadic(alpha), shift) {
        Err(Error::NeedsMorePrecision { bits }) => precision
            .starting_at(bits.saturating_mul(2))
            .escalate(|b| floor_scaled_unsigned(&phi_of(p, b)?.enclosure().mul_dyadic(alpha), shift)),
        other => other,
    }
}

/// `m_p = ⌊2^(K²)·α·φ_p⌋`.
pub fn m_value(p: u64, params: &ConstructionParams) -> Result<BigUint> {
    let k = k_index(p, params)?;
    let shift = (k * k) as i64;
    let alpha = params.alpha;
    params
        .precision
        .starting_at(k * k + alpha.denominator_log2() + 16)
        .escalate(|bits| floor_scaled_unsigned(&phi_of(p, bits)?.enclosure().mul_dyadic(alpha), shift))
}

/// One element of the construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementRecord {
    p: u64,
    class: u32,
    m: BigUint,
    blocks: Vec<u64>,
    a: BigUint,
    t: BigUint,
}

impl ElementRecord {
    fn from_m(p: u64, class: u32, m: BigUint) -> Result<Self> {
        let blocks = blocks_of(&m, class)?;
        let (a, t) = assemble(&blocks)?;
        Ok(ElementRecord { p, class, m, blocks, a, t })
    }

    /// A record built directly from block values, labelled `p`; the class is
    /// the number of blocks.
    pub fn from_blocks(p: u64, blocks: Vec<u64>) -> Result<Self> {
        let (a, t) = assemble(&blocks)?;
        let m = digits_value(&blocks);
        Ok(ElementRecord { p, class: blocks.len() as u32, m, blocks, a, t })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn class(&self) -> u32 {
        self.class
    }

    pub fn m(&self) -> &BigUint {
        &self.m
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn a(&self) -> &BigUint {
        &self.a
    }

    pub fn t(&self) -> &BigUint {
        &self.t
    }
}

/// Chains [`k_index`], [`m_value`], [`blocks_of`] and [`assemble`].
pub fn element(p: u64, params: &ConstructionParams) -> Result<ElementRecord> {
    let k = k_index(p, params)?;
    ElementRecord::from_m(p, k, m_value(p, params)?)
}

/// A class prime with its decomposition and a cached angle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub p: u64,
    pub class: u32,
    pub decomposition: GaussianPrimeDecomposition,
    pub angle: FixedReal,
}

/// Every class prime up to `k_max`, ascending; the `α`-independent part of
/// the construction.
#[derive(Clone, Debug)]
pub struct Catalog {
    params: ConstructionParams,
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn build(params: &ConstructionParams) -> Result<Self> {
        let bound = class_bound(params.k_max)?;
        let mut entries = Vec::new();
        let mut failure = None;
        for_each_prime_upto(bound, |p| {
            if failure.is_some() || p < 5 || p % 4 != 1 {
                return;
            }
            let entry = k_index(p, params).and_then(|class| {
                let decomposition = two_squares(p)?;
                let bits = angle_bits(class, params.alpha).min(params.precision.cap_bits);
                let angle = phi_of_decomposition(&decomposition, bits).enclosure().clone();
                Ok(CatalogEntry { p, class, decomposition, angle })
            });
            match entry {
                Ok(e) if e.class <= params.k_max => entries.push(e),
                Ok(_) => {}
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(Catalog { params: params.clone(), entries })
    }

    pub fn params(&self) -> &ConstructionParams {
        &self.params
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries of class `k`; classes are contiguous because `K_p` grows
    /// with `p`.
    pub fn class(&self, k: u32) -> &[CatalogEntry] {
        let start = self.entries.partition_point(|e| e.class < k);
        let end = self.entries.partition_point(|e| e.class <= k);
        &self.entries[start..end]
    }

    pub fn entry(&self, p: u64) -> Option<&CatalogEntry> {
        self.entries.binary_search_by_key(&p, |e| e.p).ok().map(|i| &self.entries[i])
    }

    pub fn m_value(&self, entry: &CatalogEntry, alpha: DyadicRational) -> Result<BigUint> {
        m_from_angle(entry.p, entry.class, &entry.angle, alpha, &self.params.precision)
    }

    /// Records for every catalog prime at dilation `alpha`, ordered by `p`.
    pub fn elements(&self, alpha: DyadicRational) -> Result<Vec<ElementRecord>> {
        if !alpha.in_unit_dilation_range() {
            return Err(Error::invalid("α must be a dyadic rational in [1, 2)"));
        }
        self.entries.iter().map(|e| ElementRecord::from_m(e.p, e.class, self.m_value(e, alpha)?)).collect()
    }

    /// Angle enclosures aligned with `records`.
    pub fn angles_for(&self, records: &[ElementRecord]) -> Option<Vec<FixedReal>> {
        records.iter().map(|r| self.entry(r.p()).map(|e| e.angle.clone())).collect()
    }
}

/// One record per class prime up to `params.k_max`, ordered by `p`.
pub fn generate(params: &ConstructionParams) -> Result<Vec<ElementRecord>> {
    Catalog::build(params)?.elements(params.alpha)
}

#[cfg(test)]
mod tests;
