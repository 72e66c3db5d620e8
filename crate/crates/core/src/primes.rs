//! Prime generation, with the class `p ≡ 1 (mod 4)` as a first-class filter.

use alloc::vec;
use alloc::vec::Vec;

use num_integer::Roots;

const SEGMENT_LEN: u64 = 1 << 18;
// deterministic for every n < 3.3·10^24
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn small_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Calls `visit` on every prime `≤ x` in ascending order.
pub fn for_each_prime_upto(x: u64, mut visit: impl FnMut(u64)) {
    if x < 2 {
        return;
    }
    let base = small_sieve(x.sqrt());
    let mut composite = vec![false; SEGMENT_LEN as usize];
    let mut low = 2u64;
    loop {
        let high = low.saturating_add(SEGMENT_LEN).min(x.saturating_add(1));
        let len = (high - low) as usize;
        composite[..len].fill(false);
        for &p in &base {
            let sq = p * p;
            if sq >= high {
                break;
            }
            let start = sq.max(low.div_ceil(p) * p);
            let mut m = start;
            while m < high {
                composite[(m - low) as usize] = true;
                m += p;
            }
        }
        for (i, &c) in composite[..len].iter().enumerate() {
            if !c {
                visit(low + i as u64);
            }
        }
        if high > x {
            break;
        }
        low = high;
    }
}

/// Residue filters a [`PrimeTable`] may carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidueClass {
    OneModFour,
}

impl ResidueClass {
    pub fn admits(self, p: u64) -> bool {
        match self {
            ResidueClass::OneModFour => p % 4 == 1,
        }
    }
}

/// Ascending, duplicate-free list of primes up to `bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    bound: u64,
    primes: Vec<u64>,
    class_filter: Option<ResidueClass>,
}

impl PrimeTable {
    pub fn upto(bound: u64, class_filter: Option<ResidueClass>) -> Self {
        let mut primes = Vec::new();
        for_each_prime_upto(bound, |p| {
            if class_filter.is_none_or(|c| c.admits(p)) {
                primes.push(p);
            }
        });
        PrimeTable { bound, primes, class_filter }
    }

    /// Builds a table from an already filtered ascending list.
    pub(crate) fn from_sorted(bound: u64, primes: Vec<u64>, class_filter: Option<ResidueClass>) -> Self {
        debug_assert!(primes.windows(2).all(|w| w[0] < w[1]));
        PrimeTable { bound, primes, class_filter }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn class_filter(&self) -> Option<ResidueClass> {
        self.class_filter
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.primes
    }
}

/// Primes `p ≤ x` with `p ≡ 1 (mod 4)`.
pub fn primes_1mod4_upto(x: u64) -> PrimeTable {
    PrimeTable::upto(x, Some(ResidueClass::OneModFour))
}

/// Number of primes `p ≤ x` with `p ≡ 1 (mod 4)`.
pub fn pi1(x: u64) -> u64 {
    let mut count = 0;
    for_each_prime_upto(x, |p| {
        if p % 4 == 1 {
            count += 1;
        }
    });
    count
}
