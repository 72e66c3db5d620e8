//! Grid experiments over the dilation `α ∈ [1, 2)`.
//!
//! Integrals over `α` become averages over a dyadic grid `A/2^b`. The
//! per-`α` statistics are `T_KL`, the number of ordered solutions of
//! `a_p + a_q = a_r + a_s` with `p, r ∈ P_K`, `q, s ∈ P_L`, `p ≠ r`, `q ≠ s`
//! (excluding the swap `(r, s) = (q, p)` when `K = L`), and `A_KL`, the
//! number of bad tuples. Bound values are reported in floating point; no
//! floating-point value feeds back into a construction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use crate::gaussian::{phi_of, GaussianInt};
use crate::infinite::{
    angle_window_admits, class_gate, dedup, find_bad_tuples, find_bad_tuples_filtered, BadTuple, Catalog, CatalogEntry,
    ElementRecord,
};
use crate::precision::{arctan_ratio, DyadicRational, FixedReal, Precision};
use crate::{Error, Result};

/// `2/β = 2(√2 − 1)`.
pub const TWO_OVER_BETA: f64 = 0.828_427_124_746_190_1;
/// `1/β = √2 − 1`, the exponent of the counting function.
pub const INV_BETA: f64 = 0.414_213_562_373_095_05;
/// Ceiling for the congruence-measure experiment, in units of `2^(L²−K²)`.
/// Chosen for this artifact; the underlying estimate hides its constant.
pub const CONGRUENCE_CEILING: u64 = 16;
/// Ceiling for the normalized bad-tuple count; an artifact choice as above.
pub const TREND_CEILING: f64 = 64.0;

/// Points `A/2^b`, `2^b ≤ A < 2^(b+1)`, every `stride`-th one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlphaGrid {
    resolution_log2: u32,
    stride: u64,
}

impl AlphaGrid {
    pub fn full(resolution_log2: u32) -> Result<Self> {
        Self::strided(resolution_log2, 1)
    }

    pub fn strided(resolution_log2: u32, stride: u64) -> Result<Self> {
        if resolution_log2 > 62 {
            return Err(Error::OutOfRange(resolution_log2 as u64));
        }
        if stride == 0 {
            return Err(Error::invalid("grid stride must be positive"));
        }
        Ok(AlphaGrid { resolution_log2, stride })
    }

    /// The single point `α = 1`.
    pub fn unit() -> Self {
        AlphaGrid { resolution_log2: 0, stride: 1 }
    }

    pub fn resolution_log2(&self) -> u32 {
        self.resolution_log2
    }

    pub fn stride(&self) -> u64 {
        self.stride
    }

    pub fn len(&self) -> u64 {
        (1u64 << self.resolution_log2).div_ceil(self.stride)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Twice as many points: one more bit of resolution, same stride.
    pub fn doubled(&self) -> Result<Self> {
        Self::strided(self.resolution_log2 + 1, self.stride)
    }

    fn numerators(&self) -> impl Iterator<Item = u64> {
        let b = self.resolution_log2;
        ((1u64 << b)..(2u64 << b)).step_by(self.stride as usize)
    }

    pub fn points(&self) -> impl Iterator<Item = DyadicRational> + '_ {
        let b = self.resolution_log2;
        self.numerators().map(move |a| DyadicRational::alpha(a, b).expect("grid point in [1, 2)"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub alpha: DyadicRational,
    pub k: u32,
    pub l: u32,
    pub t_kl: u64,
    pub a_kl: u64,
    /// Set when this `α` could not be evaluated; counts are then zero.
    pub error: Option<Error>,
}

/// `2^((2/β)((K−1)²+(L−1)²) − K²)`, the scale of the grid average of `T_KL`.
pub fn bound_value(k: u32, l: u32) -> f64 {
    let e = TWO_OVER_BETA * ((k - 1).pow(2) + (l - 1).pow(2)) as f64 - (k * k) as f64;
    libm::exp2(e)
}

/// `A_KL·2^(L² − (2/β)((K−1)²+(L−1)²))`.
pub fn trend_value(k: u32, l: u32, a_kl: u64) -> f64 {
    let e = (l * l) as f64 - TWO_OVER_BETA * ((k - 1).pow(2) + (l - 1).pow(2)) as f64;
    a_kl as f64 * libm::exp2(e)
}

fn class_pairs(catalog: &Catalog) -> impl Iterator<Item = (u32, u32)> {
    let p = catalog.params();
    let (lo, hi) = (p.k_min, p.k_max);
    (lo..=hi).flat_map(move |k| (lo..=k).map(move |l| (k, l)))
}

/// Ordered solutions counted directly from equal sums.
fn t_counts(kept: &[ElementRecord]) -> BTreeMap<(u32, u32), u64> {
    let mut classes: BTreeMap<u32, Vec<&ElementRecord>> = BTreeMap::new();
    for r in kept {
        classes.entry(r.class()).or_default().push(r);
    }
    let mut out = BTreeMap::new();
    for (&k, big) in &classes {
        for (&l, small) in classes.range(..=k) {
            let mut sums: Vec<(BigUint, u64, u64)> = Vec::with_capacity(big.len() * small.len());
            for p in big {
                for q in small {
                    sums.push((p.a() + q.a(), p.p(), q.p()));
                }
            }
            sums.sort_unstable();
            let mut count = 0u64;
            for group in sums.chunk_by(|x, y| x.0 == y.0) {
                for x in group {
                    for y in group {
                        let swap = k == l && y.1 == x.2 && y.2 == x.1;
                        if x.1 != y.1 && x.2 != y.2 && !swap {
                            count += 1;
                        }
                    }
                }
            }
            out.insert((k, l), count);
        }
    }
    out
}

/// Bad tuples and `T_KL`, `A_KL` at one `α`.
pub fn evaluate_alpha(catalog: &Catalog, alpha: DyadicRational) -> Result<(Vec<BadTuple>, Vec<SweepRow>)> {
    let records = catalog.elements(alpha)?;
    let kept = dedup(&records).kept;
    let angles = catalog.angles_for(&kept).ok_or_else(|| Error::invalid("record missing from catalog"))?;
    let bad = find_bad_tuples_filtered(&kept, &angles);
    let t = t_counts(&kept);
    let rows = class_pairs(catalog)
        .map(|(k, l)| SweepRow {
            alpha,
            k,
            l,
            t_kl: t.get(&(k, l)).copied().unwrap_or(0),
            a_kl: bad.iter().filter(|b| b.k == k && b.l == l).count() as u64,
            error: None,
        })
        .collect();
    Ok((bad, rows))
}

/// Rows for one `α`; a failure marks every row of that `α`.
pub fn sweep_alpha(catalog: &Catalog, alpha: DyadicRational) -> Vec<SweepRow> {
    match evaluate_alpha(catalog, alpha) {
        Ok((_, rows)) => rows,
        Err(e) => class_pairs(catalog)
            .map(|(k, l)| SweepRow { alpha, k, l, t_kl: 0, a_kl: 0, error: Some(e.clone()) })
            .collect(),
    }
}

pub fn sweep(catalog: &Catalog, grid: &AlphaGrid) -> Vec<SweepRow> {
    grid.points().flat_map(|alpha| sweep_alpha(catalog, alpha)).collect()
}

/// Grid averages for one class pair.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSummary {
    pub k: u32,
    pub l: u32,
    pub points: u64,
    pub failed: u64,
    pub mean_t: f64,
    pub mean_a: f64,
    pub max_a: u64,
    pub bound: f64,
    /// `mean_t / bound`.
    pub ratio: f64,
    /// [`trend_value`] of `max_a`.
    pub trend: f64,
}

pub fn summarize(rows: &[SweepRow]) -> Vec<GridSummary> {
    #[derive(Default)]
    struct Acc {
        n: u64,
        failed: u64,
        t: u64,
        a: u64,
        max_a: u64,
    }
    let mut acc: BTreeMap<(u32, u32), Acc> = BTreeMap::new();
    for r in rows {
        let e = acc.entry((r.k, r.l)).or_default();
        if r.error.is_some() {
            e.failed += 1;
            continue;
        }
        e.n += 1;
        e.t += r.t_kl;
        e.a += r.a_kl;
        e.max_a = e.max_a.max(r.a_kl);
    }
    acc.into_iter()
        .map(|((k, l), Acc { n, failed, t, a, max_a })| {
            let denom = n.max(1) as f64;
            let mean_t = t as f64 / denom;
            let bound = bound_value(k, l);
            GridSummary {
                k,
                l,
                points: n,
                failed,
                mean_t,
                mean_a: a as f64 / denom,
                max_a,
                bound,
                ratio: mean_t / bound,
                trend: trend_value(k, l, max_a),
            }
        })
        .collect()
}

/// Both necessary conditions of a bad tuple, checked on catalog angles.
pub fn satisfies_necessary_conditions(t: &BadTuple, catalog: &Catalog) -> bool {
    let angle = |p| catalog.entry(p).map(|e| &e.angle);
    let (Some(p), Some(q), Some(r), Some(s)) = (angle(t.p), angle(t.q), angle(t.r), angle(t.s)) else {
        return false;
    };
    class_gate(t.k, t.l) && angle_window_admits(p, q, r, s, t.l)
}

/// Pairs `(p, r)` that occur in some bad tuple, keyed with their classes.
pub fn participating_pairs<'a>(tuples: impl IntoIterator<Item = &'a BadTuple>) -> BTreeSet<(u32, u32, u64, u64)> {
    tuples.into_iter().map(|t| (t.k, t.l, t.p, t.r)).collect()
}

/// `hits / total` over grid points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fraction {
    pub hits: u64,
    pub total: u64,
}

impl Fraction {
    pub fn to_f64(self) -> f64 {
        self.hits as f64 / self.total as f64
    }

    /// `hits/total ≤ c·2^(−e)`, exactly.
    pub fn at_most_pow2(self, c: u64, e: u32) -> bool {
        (self.hits as u128) << e <= c as u128 * self.total as u128
    }
}

// ⌊A·φ·2^(K²−b)⌋ from u128 mantissas of φ at `scale`, when determined
fn fast_m(a: u64, lo: u128, hi: u128, shift: u32) -> Option<u128> {
    let m_lo = (a as u128 * lo) >> shift;
    let m_hi = (a as u128 * hi) >> shift;
    (m_lo == m_hi).then_some(m_lo)
}

struct FastAngle {
    lo: u128,
    hi: u128,
    shift: u32,
}

impl FastAngle {
    // mantissas at a scale that keeps A·mantissa below 2^128
    fn new(angle: &FixedReal, k: u32, b: u32) -> Option<Self> {
        let scale = 126u32.checked_sub(b)?.min(angle.scale_bits());
        let shift = (scale + b).checked_sub(k * k)?;
        let s = angle.with_scale(scale);
        Some(FastAngle { lo: s.lo().to_u128()?, hi: s.hi().to_u128()?, shift })
    }
}

fn slow_m(p: u64, k: u32, alpha: DyadicRational, precision: &Precision) -> Result<BigInt> {
    precision
        .starting_at(k * k + alpha.denominator_log2() + 32)
        .floor((k * k) as i64, |bits| Ok(phi_of(p, bits)?.enclosure().mul_dyadic(alpha)))
}

/// Fraction of grid points with `m_p(α) ≡ m_r(α) (mod 2^(K²−L²))`.
pub fn congruence_measure(catalog: &Catalog, p: u64, r: u64, l: u32, grid: &AlphaGrid) -> Result<Fraction> {
    let ep = catalog.entry(p).ok_or(Error::OutOfRange(p))?;
    let er = catalog.entry(r).ok_or(Error::OutOfRange(r))?;
    if ep.class != er.class {
        return Err(Error::invalid("p and r must share a class"));
    }
    let k = ep.class;
    if l > k {
        return Err(Error::invalid("L must not exceed K"));
    }
    let b = grid.resolution_log2();
    if b < k * k {
        return Err(Error::ResolutionTooCoarse { resolution: b, required: k * k });
    }
    let total = grid.len();
    if p == r || l == k {
        return Ok(Fraction { hits: total, total });
    }
    let mask = (1u128 << (k * k - l * l)) - 1;
    let precision = &catalog.params().precision;
    let fp = FastAngle::new(&ep.angle, k, b);
    let fr = FastAngle::new(&er.angle, k, b);
    let m_of = |e: &CatalogEntry, fast: &Option<FastAngle>, a: u64| -> Result<u128> {
        if let Some(f) = fast {
            if let Some(m) = fast_m(a, f.lo, f.hi, f.shift) {
                return Ok(m);
            }
        }
        let alpha = DyadicRational::alpha(a, b)?;
        let m = slow_m(e.p, k, alpha, precision)?;
        m.to_u128().ok_or(Error::OutOfRange(e.p))
    };
    let mut hits = 0;
    for a in grid.numerators() {
        let mp = m_of(ep, &fp, a)?;
        let mr = m_of(er, &fr, a)?;
        if mp.wrapping_sub(mr) & mask == 0 {
            hits += 1;
        }
    }
    Ok(Fraction { hits, total })
}

/// `m_p(α)` for one grid point through the certified path; exposed for
/// cross-checking the fast path.
pub fn m_at(catalog: &Catalog, p: u64, alpha: DyadicRational) -> Result<BigUint> {
    let e = catalog.entry(p).ok_or(Error::OutOfRange(p))?;
    catalog.m_value(e, alpha)
}

/// Opening angle of a sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Opening {
    /// The ray through the center only.
    Zero,
    /// `2^(−e)`.
    Pow2Neg(u32),
}

/// Points `w` whose direction is within half the opening of `z0`'s.
pub fn sector_count(points: &[GaussianInt], z0: GaussianInt, opening: Opening, precision: &Precision) -> Result<usize> {
    let mut count = 0;
    for &w in points {
        let prod = w * z0.conj();
        let (dot, cross) = (prod.re, prod.im.unsigned_abs());
        if dot <= 0 {
            continue;
        }
        let dot = dot as u128;
        let inside = match opening {
            _ if cross == 0 => true,
            Opening::Zero => false,
            Opening::Pow2Neg(_) if cross >= dot => false,
            Opening::Pow2Neg(e) => {
                let half = FixedReal::from_int(1).mul_pow2(-(e as i64) - 1);
                precision.escalate(|bits| {
                    let angle = arctan_ratio(cross, dot, bits)?;
                    match angle.certain_cmp(&half) {
                        Some(o) => Ok(o != core::cmp::Ordering::Greater),
                        None => Err(Error::NeedsMorePrecision { bits }),
                    }
                })?
            }
        };
        if inside {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectorRow {
    pub q: u64,
    pub s: u64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectorReport {
    pub k: u32,
    pub l: u32,
    /// `θ = 2^(−L²)`.
    pub theta_log2: i64,
    /// `log₂ R = (K−1)²/β`.
    pub radius_log2: f64,
    /// `θR² + 1`.
    pub bound: f64,
    pub rows: Vec<SectorRow>,
    pub ok: bool,
}

impl SectorReport {
    pub fn max_count(&self) -> usize {
        self.rows.iter().map(|r| r.count).max().unwrap_or(0)
    }
}

/// For up to `samples` pairs `q ≠ s` of class `L`, counts the points
/// `ρ̄_p·ρ_r` (`p ≠ r` in class `K`) in the sector of opening `θ = 2^(−L²)`
/// around `ρ̄_s·ρ_q`, and compares with `θR² + 1`, `R = 2^((K−1)²/β)`.
pub fn sector_bound_check(catalog: &Catalog, k: u32, l: u32, samples: usize) -> Result<SectorReport> {
    let big = catalog.class(k);
    let small = catalog.class(l);
    let mut points = Vec::new();
    for p in big {
        for r in big {
            if p.p != r.p {
                points.push(p.decomposition.rho_bar() * r.decomposition.rho());
            }
        }
    }
    let radius_log2 = INV_BETA * ((k - 1).pow(2)) as f64;
    let bound = libm::exp2(2.0 * radius_log2 - (l * l) as f64) + 1.0;
    let mut rows = Vec::new();
    'outer: for q in small {
        for s in small {
            if q.p == s.p {
                continue;
            }
            if rows.len() >= samples {
                break 'outer;
            }
            let z0 = s.decomposition.rho_bar() * q.decomposition.rho();
            let count = sector_count(&points, z0, Opening::Pow2Neg(l * l), &catalog.params().precision)?;
            rows.push(SectorRow { q: q.p, s: s.p, count });
        }
    }
    let ok = rows.iter().all(|r| (r.count as f64) <= bound);
    Ok(SectorReport { k, l, theta_log2: -((l * l) as i64), radius_log2, bound, rows, ok })
}

/// Every bad tuple at `α`, unfiltered; the reference the filtered search
/// is compared against.
pub fn unfiltered_tuples(catalog: &Catalog, alpha: DyadicRational) -> Result<Vec<BadTuple>> {
    let records = catalog.elements(alpha)?;
    Ok(find_bad_tuples(&dedup(&records).kept))
}
