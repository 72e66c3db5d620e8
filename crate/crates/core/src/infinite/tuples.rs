use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};

use super::ElementRecord;
use crate::precision::FixedReal;

/// `(p, q, r, s)` with `a_p + a_q = a_r + a_s` and `a_p > a_r ≥ a_s > a_q`;
/// `p, r` lie in class `k` and `q, s` in class `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BadTuple {
    pub k: u32,
    pub l: u32,
    pub p: u64,
    pub q: u64,
    pub r: u64,
    pub s: u64,
}

/// Class pairs that can host a bad tuple. For `L ≥ 3` a tuple forces
/// `(K−1)² + (L−1)² > β(L−1)²`, i.e. `(K−1)⁴ > 2(L−1)⁴`.
pub fn class_gate(k: u32, l: u32) -> bool {
    if l < 3 {
        return true;
    }
    let (k1, l1) = ((k - 1) as u128, (l - 1) as u128);
    k1.pow(4) > 2 * l1.pow(4)
}

/// Keeps `(p, q, r, s)` unless `|φ_p + φ_q − φ_r − φ_s| ≥ 4·2^(−L²)` holds
/// for every point of the enclosures.
pub fn angle_window_admits(phi_p: &FixedReal, phi_q: &FixedReal, phi_r: &FixedReal, phi_s: &FixedReal, l: u32) -> bool {
    let sigma = phi_p.add(phi_q).sub(phi_r).sub(phi_s);
    // raising the scale is exact
    let scale = sigma.scale_bits().max(l * l);
    let sigma = sigma.with_scale(scale);
    let c = BigInt::from(1) << (scale + 2 - l * l);
    sigma.lo() < &c && sigma.hi() > &-c
}

/// Elements grouped by class, each group sorted by `a`.
fn by_class(elements: &[ElementRecord]) -> BTreeMap<u32, Vec<usize>> {
    let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, e) in elements.iter().enumerate() {
        classes.entry(e.class()).or_default().push(i);
    }
    for members in classes.values_mut() {
        members.sort_by(|&x, &y| elements[x].a().cmp(elements[y].a()).then(elements[x].p().cmp(&elements[y].p())));
    }
    classes
}

fn tuple(elements: &[ElementRecord], p: usize, q: usize, r: usize, s: usize) -> BadTuple {
    BadTuple {
        k: elements[p].class(),
        l: elements[q].class(),
        p: elements[p].p(),
        q: elements[q].p(),
        r: elements[r].p(),
        s: elements[s].p(),
    }
}

/// Positive differences `a_x − a_y` inside one sorted class, as
/// `(difference, x, y)` sorted by difference.
fn differences(elements: &[ElementRecord], members: &[usize]) -> Vec<(BigUint, usize, usize)> {
    let mut diffs = Vec::new();
    for (j, &y) in members.iter().enumerate() {
        for &x in &members[j + 1..] {
            if elements[x].a() > elements[y].a() {
                diffs.push((elements[x].a() - elements[y].a(), x, y));
            }
        }
    }
    diffs.sort();
    diffs
}

/// Every bad tuple among `elements`.
///
/// A bad tuple always has `K_p = K_r` and `K_q = K_s`: `a_r > a_p/2` pins the
/// bit-length of `a_r`, and the leading bit of the smaller class sits in a
/// gap the other side leaves empty. The search therefore runs per class pair.
pub fn find_bad_tuples(elements: &[ElementRecord]) -> Vec<BadTuple> {
    let classes = by_class(elements);
    let mut out = Vec::new();
    for (&k, big) in &classes {
        for (&l, small) in classes.range(..=k) {
            if l == k {
                same_class(elements, big, &mut out);
            } else {
                cross_class(elements, big, small, &mut out);
            }
        }
    }
    out.sort_unstable();
    out
}

fn cross_class(elements: &[ElementRecord], big: &[usize], small: &[usize], out: &mut Vec<BadTuple>) {
    for (j, &q) in small.iter().enumerate() {
        for &s in &small[j + 1..] {
            if elements[s].a() <= elements[q].a() {
                continue;
            }
            let d = elements[s].a() - elements[q].a();
            for &p in big {
                if elements[p].a() < &d {
                    continue;
                }
                let target = elements[p].a() - &d;
                let start = big.partition_point(|&x| elements[x].a() < &target);
                for &r in big[start..].iter().take_while(|&&x| elements[x].a() == &target) {
                    out.push(tuple(elements, p, q, r, s));
                }
            }
        }
    }
}

fn same_class(elements: &[ElementRecord], members: &[usize], out: &mut Vec<BadTuple>) {
    let diffs = differences(elements, members);
    let mut start = 0;
    while start < diffs.len() {
        let end = start + diffs[start..].iter().take_while(|d| d.0 == diffs[start].0).count();
        for x in &diffs[start..end] {
            for y in &diffs[start..end] {
                let (p, r) = (x.1, x.2);
                let (s, q) = (y.1, y.2);
                if elements[r].a() >= elements[s].a() {
                    out.push(tuple(elements, p, q, r, s));
                }
            }
        }
        start = end;
    }
}

/// [`find_bad_tuples`] restricted by two certified necessary conditions:
/// [`class_gate`] and the angle window of width `4·2^(−L²)`. `angles[i]`
/// must enclose `φ` of `elements[i]`, and the elements must come from a
/// dilation `α ≥ 1`.
pub fn find_bad_tuples_filtered(elements: &[ElementRecord], angles: &[FixedReal]) -> Vec<BadTuple> {
    assert_eq!(elements.len(), angles.len(), "one angle per element");
    let classes = by_class(elements);
    let scale = angles.iter().map(FixedReal::scale_bits).max().unwrap_or(0);
    let lo: Vec<BigInt> = angles.iter().map(|a| a.with_scale(scale).lo().clone()).collect();
    let hi: Vec<BigInt> = angles.iter().map(|a| a.with_scale(scale).hi().clone()).collect();
    let mut out = Vec::new();
    for (&k, big) in &classes {
        for (&l, small) in classes.range(..=k) {
            if !class_gate(k, l) {
                continue;
            }
            let c = window_mantissa(l, scale);
            window_search(elements, (&lo, &hi), big, small, &c, &mut out);
        }
    }
    out.sort_unstable();
    out
}

// 4·2^(−L²) at `scale`, rounded up
fn window_mantissa(l: u32, scale: u32) -> BigInt {
    let e = scale as i64 + 2 - (l * l) as i64;
    if e >= 0 {
        BigInt::from(1) << e as u32
    } else {
        BigInt::from(1)
    }
}

fn window_search(
    elements: &[ElementRecord],
    (lo, hi): (&[BigInt], &[BigInt]),
    big: &[usize],
    small: &[usize],
    c: &BigInt,
    out: &mut Vec<BadTuple>,
) {
    // (δ_lo, δ_hi, s, q) with δ = φ_s − φ_q, sorted by δ_lo
    let mut deltas: Vec<(BigInt, BigInt, usize, usize)> = Vec::new();
    for &q in small {
        for &s in small {
            if elements[s].a() > elements[q].a() {
                deltas.push((&lo[s] - &hi[q], &hi[s] - &lo[q], s, q));
            }
        }
    }
    deltas.sort();
    let spread = deltas.iter().map(|d| &d.1 - &d.0).max().unwrap_or_default();
    for &p in big {
        for &r in big {
            if elements[p].a() <= elements[r].a() {
                continue;
            }
            let (d_lo, d_hi) = (&lo[p] - &hi[r], &hi[p] - &lo[r]);
            // need δ_hi > d_lo − c and δ_lo < d_hi + c
            let floor = &d_lo - c - &spread;
            let ceil = &d_hi + c;
            let start = deltas.partition_point(|d| d.0 <= floor);
            for (_, delta_hi, s, q) in deltas[start..].iter().take_while(|d| d.0 < ceil) {
                if *delta_hi <= &d_lo - c {
                    continue;
                }
                let (s, q) = (*s, *q);
                if elements[r].a() >= elements[s].a()
                    && elements[p].a() + elements[q].a() == elements[r].a() + elements[s].a()
                {
                    out.push(tuple(elements, p, q, r, s));
                }
            }
        }
    }
}
