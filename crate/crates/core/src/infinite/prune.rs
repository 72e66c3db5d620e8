use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigUint;

use super::{find_bad_tuples, find_bad_tuples_filtered, BadTuple, Catalog, ElementRecord};
use crate::precision::DyadicRational;
use crate::{Error, Result};

/// Records split into first occurrences of each `a` and later repeats.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dedup {
    pub kept: Vec<ElementRecord>,
    pub duplicates: Vec<ElementRecord>,
}

/// Keeps, for every repeated `a`, the record with the smallest `p`.
/// Order of the kept records follows the input.
pub fn dedup(records: &[ElementRecord]) -> Dedup {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&x, &y| records[x].a().cmp(records[y].a()).then(records[x].p().cmp(&records[y].p())));
    let mut repeat = alloc::vec![false; records.len()];
    for w in order.windows(2) {
        if records[w[0]].a() == records[w[1]].a() {
            repeat[w[1]] = true;
        }
    }
    let mut out = Dedup::default();
    for (r, dup) in records.iter().zip(repeat) {
        if dup {
            out.duplicates.push(r.clone());
        } else {
            out.kept.push(r.clone());
        }
    }
    out
}

/// The pruned set: sorted element values and the records behind them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SidonSet {
    pub elements: Vec<BigUint>,
    pub members: Vec<ElementRecord>,
    pub removed: Vec<ElementRecord>,
}

/// Drops repeated `a` values and the largest member `a_p` of every bad
/// tuple. One pass suffices: each violated equation loses its largest term.
pub fn prune(records: &[ElementRecord], bad: &[BadTuple]) -> SidonSet {
    let Dedup { kept, duplicates } = dedup(records);
    let doomed: BTreeSet<u64> = bad.iter().map(|t| t.p).collect();
    let mut set = SidonSet { removed: duplicates, ..SidonSet::default() };
    for r in kept {
        if doomed.contains(&r.p()) {
            set.removed.push(r);
        } else {
            set.members.push(r);
        }
    }
    set.members.sort_by(|x, y| x.a().cmp(y.a()));
    set.elements = set.members.iter().map(|r| r.a().clone()).collect();
    set
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructOptions {
    pub prune: bool,
    /// Use the certified necessary-condition filters in the tuple search.
    pub filtered: bool,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions { prune: true, filtered: true }
    }
}

/// One full run at a fixed `α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Construction {
    pub alpha: DyadicRational,
    pub records: Vec<ElementRecord>,
    pub duplicates: Vec<ElementRecord>,
    pub bad_tuples: Vec<BadTuple>,
    pub removed: Vec<ElementRecord>,
    /// Output values, ascending: the pruned set, or every `a` when pruning
    /// is off.
    pub elements: Vec<BigUint>,
}

/// generate → dedup → bad tuples → prune.
pub fn construct(catalog: &Catalog, alpha: DyadicRational, opts: ConstructOptions) -> Result<Construction> {
    let records = catalog.elements(alpha)?;
    let Dedup { kept, duplicates } = dedup(&records);
    let bad_tuples = if opts.filtered {
        let angles = catalog.angles_for(&kept).ok_or_else(|| Error::invalid("record missing from catalog"))?;
        find_bad_tuples_filtered(&kept, &angles)
    } else {
        find_bad_tuples(&kept)
    };
    let (removed, elements) = if opts.prune {
        let set = prune(&records, &bad_tuples);
        (set.removed, set.elements)
    } else {
        let mut all: Vec<BigUint> = records.iter().map(|r| r.a().clone()).collect();
        all.sort();
        (Vec::new(), all)
    };
    Ok(Construction { alpha, records, duplicates, bad_tuples, removed, elements })
}

/// `S(x) = #{a ∈ set : a ≤ x}` for an ascending `set`.
pub fn counting(set: &[BigUint], x: &BigUint) -> usize {
    set.partition_point(|a| a <= x)
}

/// `log₂ S(x) / log₂ x` at `x = 2^((K+2)²)`, the first power of two above
/// every class-`K` element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeRow {
    pub k: u32,
    pub x_log2: u32,
    pub count: usize,
    /// `None` while `S(x) = 0`.
    pub slope: Option<f64>,
}

pub fn slope_at(set: &[BigUint], k: u32) -> SlopeRow {
    let x_log2 = (k + 2) * (k + 2);
    let x = BigUint::from(1u32) << x_log2;
    let count = counting(set, &x);
    let slope = (count > 0).then(|| libm::log2(count as f64) / x_log2 as f64);
    SlopeRow { k, x_log2, count, slope }
}
