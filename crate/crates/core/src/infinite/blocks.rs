use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::{Error, Result};

/// Largest class index whose blocks fit a `u64`.
pub const MAX_BLOCK_CLASS: u32 = 32;

/// Width in bits of block `i` (1-based).
pub const fn block_width(i: u32) -> u32 {
    2 * i - 1
}

/// Bit offset of block `i` (1-based) inside an assembled element.
pub const fn block_offset(i: u32) -> u32 {
    (i - 1) * (i - 1) + 3 * i
}

/// Exponent of the leading bit `t = 2^(K²+3K+2)`.
pub const fn lead_exponent(k: u32) -> u32 {
    k * k + 3 * k + 2
}

fn check_class(k: u32) -> Result<()> {
    if k == 0 || k > MAX_BLOCK_CLASS {
        return Err(Error::OutOfRange(k as u64));
    }
    Ok(())
}

/// Cuts `m < 2^(K²)`, read as `K²` big-endian digits, into blocks
/// `Δ_1..Δ_K` where `Δ_i` takes digits `(i−1)²+1 ..= i²`.
pub fn blocks_of(m: &BigUint, k: u32) -> Result<Vec<u64>> {
    check_class(k)?;
    if m.bits() > (k * k) as u64 {
        return Err(Error::invalid("m must be below 2^(K²)"));
    }
    let blocks = (1..=k)
        .map(|i| {
            let mask = (1u64 << block_width(i)) - 1;
            let shifted: BigUint = m >> (k * k - i * i);
            // low 64 bits are enough after masking
            let low = shifted.iter_u64_digits().next().unwrap_or(0);
            low & mask
        })
        .collect();
    Ok(blocks)
}

/// Inverse of [`blocks_of`].
pub fn digits_value(blocks: &[u64]) -> BigUint {
    let k = blocks.len() as u32;
    blocks.iter().zip(1u32..).fold(BigUint::zero(), |acc, (&d, i)| acc + (BigUint::from(d) << (k * k - i * i)))
}

/// `a = Σ Δ_i·2^((i−1)²+3i) + 2^(K²+3K+2)` and `t = 2^(K²+3K+2)`, with
/// `K` the number of blocks.
pub fn assemble(blocks: &[u64]) -> Result<(BigUint, BigUint)> {
    let k = blocks.len() as u32;
    check_class(k)?;
    let t = BigUint::from(1u32) << lead_exponent(k);
    let mut a = t.clone();
    for (&d, i) in blocks.iter().zip(1u32..) {
        if d >> block_width(i) != 0 {
            return Err(Error::BlockOverflow { index: i as usize, width: block_width(i) });
        }
        a += BigUint::from(d) << block_offset(i);
    }
    Ok((a, t))
}
