//! Finite Sidon sets: the greedy sequence, the logarithmic construction
//! `x_p = ⌊(2n/ln n)·ln p⌋` over primes `p ≤ √(n/(2 ln n))`, and the
//! Gaussian construction `c_p = ⌊n·φ_p⌋` over class primes `p ≤ √n/4`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::ToPrimitive;

use crate::gaussian::phi_of;
use crate::precision::{log_of, FixedReal, LogBase, Precision};
use crate::primes::for_each_prime_upto;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Greedy,
    Log,
    Gauss,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Greedy => "greedy",
            Method::Log => "log",
            Method::Gauss => "gauss",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Method::Greedy),
            "log" => Ok(Method::Log),
            "gauss" => Ok(Method::Gauss),
            _ => Err(Error::invalid("method must be greedy, log or gauss")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSet {
    pub method: Method,
    pub n: u64,
    /// Ascending.
    pub elements: Vec<u64>,
    /// Source prime of each element; empty for the greedy method.
    pub provenance: Vec<u64>,
}

impl FiniteSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// The first `count` terms of the greedy Sidon sequence from 1: each term
/// is the least integer that keeps all differences distinct.
pub fn greedy_sidon(count: usize) -> Result<FiniteSet> {
    if count == 0 {
        return Err(Error::invalid("count must be at least 1"));
    }
    let mut terms: Vec<u64> = vec![1];
    // seen[d] marks a difference already used
    let mut seen: Vec<bool> = vec![false; 64];
    let mut fresh: Vec<u64> = Vec::new();
    let mut c = 1;
    while terms.len() < count {
        c += 1;
        let top = (c - terms[0]) as usize;
        if top >= seen.len() {
            seen.resize(2 * top + 1, false);
        }
        fresh.clear();
        if terms.iter().all(|&a| !seen[(c - a) as usize]) {
            fresh.extend(terms.iter().map(|&a| c - a));
            for &d in &fresh {
                seen[d as usize] = true;
            }
            terms.push(c);
        }
    }
    Ok(FiniteSet { method: Method::Greedy, n: count as u64, elements: terms, provenance: Vec::new() })
}

fn checked_n(n: u64) -> Result<BigInt> {
    if n < 2 {
        return Err(Error::RangeEmpty { n });
    }
    Ok(BigInt::from(n))
}

// k with p^k = n, if any
fn exact_power(p: u64, n: u64) -> Option<u32> {
    let mut acc = p;
    let mut k = 1;
    while acc < n {
        acc = acc.checked_mul(p)?;
        k += 1;
    }
    (acc == n).then_some(k)
}

/// `2p²·ln n < n`, certified.
fn log_range_admits(p: u64, n: u64, precision: &Precision) -> Result<bool> {
    let lhs = BigInt::from(2u32) * BigInt::from(p) * BigInt::from(p);
    let n_big = BigInt::from(n);
    precision.escalate(|bits| {
        let v = log_of(n, LogBase::Natural, bits)?.mul_int(&lhs);
        match v.certain_cmp(&FixedReal::from_int(n_big.clone())) {
            Some(core::cmp::Ordering::Less) => Ok(true),
            Some(_) => Ok(false),
            None => Err(Error::NeedsMorePrecision { bits }),
        }
    })
}

pub fn log_construction(n: u64) -> Result<FiniteSet> {
    log_construction_with(n, &Precision::default())
}

/// One element `⌊2n·ln p / ln n⌋` per prime `p` with `2p²·ln n ≤ n`.
pub fn log_construction_with(n: u64, precision: &Precision) -> Result<FiniteSet> {
    let two_n = checked_n(n)? * 2u32;
    // ln n > 1 for n ≥ 3, so candidates satisfy p² < n/2
    let mut candidates = Vec::new();
    for_each_prime_upto((n / 2).sqrt(), |p| candidates.push(p));
    let mut elements = Vec::new();
    let mut provenance = Vec::new();
    for p in candidates {
        if !log_range_admits(p, n, precision)? {
            break;
        }
        let x = match exact_power(p, n) {
            // ln p / ln n = 1/k exactly
            Some(k) => &two_n / BigInt::from(k),
            None => precision.starting_at(64 - n.leading_zeros() + 32).floor(0, |bits| {
                let ratio = log_of(p, LogBase::Natural, bits + 8)?.div(&log_of(n, LogBase::Natural, bits + 8)?)?;
                Ok(ratio.mul_int(&two_n))
            })?,
        };
        elements.push(x.to_u64().expect("x_p < 2n"));
        provenance.push(p);
    }
    if elements.is_empty() {
        return Err(Error::RangeEmpty { n });
    }
    Ok(FiniteSet { method: Method::Log, n, elements, provenance })
}

pub fn gauss_construction(n: u64) -> Result<FiniteSet> {
    gauss_construction_with(n, &Precision::default())
}

/// One element `⌊n·φ_p⌋` per prime `p ≡ 1 (mod 4)` with `16p² ≤ n`.
pub fn gauss_construction_with(n: u64, precision: &Precision) -> Result<FiniteSet> {
    let limit = n.sqrt() / 4;
    let n_big = BigInt::from(n);
    let mut pairs = Vec::new();
    let mut failure = None;
    for_each_prime_upto(limit, |p| {
        if failure.is_some() || p % 4 != 1 {
            return;
        }
        let c = precision
            .starting_at(64 - n.leading_zeros() + 32)
            .floor(0, |bits| Ok(phi_of(p, bits)?.enclosure().mul_int(&n_big)));
        match c {
            Ok(c) => pairs.push((c.to_u64().expect("c_p ≤ n"), p)),
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if pairs.is_empty() {
        return Err(Error::RangeEmpty { n });
    }
    pairs.sort_unstable();
    let (elements, provenance) = pairs.into_iter().unzip();
    Ok(FiniteSet { method: Method::Gauss, n, elements, provenance })
}
