//! Exact Sidon certification.
//!
//! Pair sums are bucketed by a fingerprint made of two residues, modulo
//! `2^61 − 1` and `2^64 − 59`. Equal fingerprints are confirmed with exact
//! big-integer sums, so a report never rests on the hash. The pair space is
//! cut into passes by fingerprint so memory stays under a budget; passes are
//! independent and may run on any number of workers.
//!
//! The reported witness is canonical: the smallest colliding sum, realized
//! by the two lexicographically smallest index pairs of the sorted input.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::infinite::ElementRecord;

const P1: u64 = (1 << 61) - 1;
const P2: u64 = u64::MAX - 58;

/// Pair entries held in memory at once, per pass.
pub const DEFAULT_PAIR_BUDGET: usize = 1 << 23;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    /// The input lists a value twice.
    Duplicate,
    SumCollision,
}

/// `x₁ + x₂ = y₁ + y₂` with `{x₁, x₂} ≠ {y₁, y₂}` as index pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Witness {
    pub x1: BigUint,
    pub x2: BigUint,
    pub y1: BigUint,
    pub y2: BigUint,
    pub kind: WitnessKind,
}

impl Witness {
    /// Re-checks the equation with exact arithmetic.
    pub fn holds(&self) -> bool {
        &self.x1 + &self.x2 == &self.y1 + &self.y2
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{} = {}+{}", self.x1, self.x2, self.y1, self.y2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SidonReport {
    pub ok: bool,
    pub witness: Option<Witness>,
    pub pairs_checked: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub pair_budget: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { pair_budget: DEFAULT_PAIR_BUDGET }
    }
}

/// Collision found inside one pass, in sorted-index form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collision {
    sum: BigUint,
    first: (u32, u32),
    second: (u32, u32),
}

impl Collision {
    fn key(&self) -> (&BigUint, (u32, u32), (u32, u32)) {
        (&self.sum, self.first, self.second)
    }
}

impl PartialOrd for Collision {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Collision {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PassOutcome {
    pub pairs: u64,
    pub best: Option<Collision>,
}

/// A set prepared for pass-wise checking.
pub struct SumIndex {
    sorted: Vec<BigUint>,
    residues: Vec<(u64, u64)>,
    passes: u32,
    duplicate: Option<BigUint>,
}

impl SumIndex {
    pub fn new(set: &[BigUint], opts: VerifyOptions) -> Self {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        let duplicate = sorted.windows(2).find(|w| w[0] == w[1]).map(|w| w[0].clone());
        let residues = sorted
            .iter()
            .map(|x| {
                let r1 = (x % P1).to_u64().expect("residue fits");
                let r2 = (x % P2).to_u64().expect("residue fits");
                (r1, r2)
            })
            .collect();
        let n = sorted.len() as u64;
        let pairs = n * (n + 1) / 2;
        let budget = opts.pair_budget.max(1) as u64;
        let passes = pairs.div_ceil(budget).clamp(1, u32::MAX as u64) as u32;
        SumIndex { sorted, residues, passes, duplicate }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn pass_count(&self) -> u32 {
        if self.duplicate.is_some() {
            0
        } else {
            self.passes
        }
    }

    fn fingerprint(&self, i: usize, j: usize) -> (u64, u64) {
        let (a1, a2) = self.residues[i];
        let (b1, b2) = self.residues[j];
        let f1 = ((a1 as u128 + b1 as u128) % P1 as u128) as u64;
        let f2 = ((a2 as u128 + b2 as u128) % P2 as u128) as u64;
        (f1, f2)
    }

    /// Checks the pairs whose fingerprint falls in pass `k`.
    pub fn run_pass(&self, k: u32) -> PassOutcome {
        let n = self.sorted.len();
        let passes = self.passes as u64;
        let mut entries: Vec<(u64, u64, u32, u32)> = Vec::new();
        for i in 0..n {
            for j in i..n {
                let (f1, f2) = self.fingerprint(i, j);
                if (f1 ^ f2.rotate_left(17)) % passes == k as u64 {
                    entries.push((f1, f2, i as u32, j as u32));
                }
            }
        }
        entries.sort_unstable();
        let mut best: Option<Collision> = None;
        let mut start = 0;
        while start < entries.len() {
            let mut end = start + 1;
            while end < entries.len() && entries[end].0 == entries[start].0 && entries[end].1 == entries[start].1 {
                end += 1;
            }
            if end - start > 1 {
                if let Some(c) = self.confirm(&entries[start..end]) {
                    if best.as_ref().is_none_or(|b| c < *b) {
                        best = Some(c);
                    }
                }
            }
            start = end;
        }
        PassOutcome { pairs: entries.len() as u64, best }
    }

    // entries share a fingerprint and are sorted by index pair
    fn confirm(&self, group: &[(u64, u64, u32, u32)]) -> Option<Collision> {
        let mut sums: Vec<(BigUint, (u32, u32))> =
            group.iter().map(|&(_, _, i, j)| (&self.sorted[i as usize] + &self.sorted[j as usize], (i, j))).collect();
        sums.sort();
        sums.windows(2)
            .filter(|w| w[0].0 == w[1].0)
            .map(|w| Collision { sum: w[0].0.clone(), first: w[0].1, second: w[1].1 })
            .min()
    }

    /// Merges pass outcomes, in any order, into the final report.
    pub fn finish(&self, outcomes: impl IntoIterator<Item = PassOutcome>) -> SidonReport {
        if let Some(v) = &self.duplicate {
            let witness =
                Witness { x1: v.clone(), x2: v.clone(), y1: v.clone(), y2: v.clone(), kind: WitnessKind::Duplicate };
            return SidonReport { ok: false, witness: Some(witness), pairs_checked: 0 };
        }
        let mut pairs_checked = 0;
        let mut best: Option<Collision> = None;
        for o in outcomes {
            pairs_checked += o.pairs;
            if let Some(c) = o.best {
                if best.as_ref().is_none_or(|b| c < *b) {
                    best = Some(c);
                }
            }
        }
        let witness = best.map(|c| {
            let at = |i: u32| self.sorted[i as usize].clone();
            Witness {
                x1: at(c.first.0),
                x2: at(c.first.1),
                y1: at(c.second.0),
                y2: at(c.second.1),
                kind: WitnessKind::SumCollision,
            }
        });
        debug_assert!(witness.as_ref().is_none_or(Witness::holds));
        SidonReport { ok: witness.is_none(), witness, pairs_checked }
    }
}

/// Checks that all sums `x + y`, `x ≤ y`, are distinct.
pub fn check_sidon(set: &[BigUint]) -> SidonReport {
    check_sidon_with(set, VerifyOptions::default())
}

pub fn check_sidon_with(set: &[BigUint], opts: VerifyOptions) -> SidonReport {
    let index = SumIndex::new(set, opts);
    let outcomes = (0..index.pass_count()).map(|k| index.run_pass(k));
    index.finish(outcomes)
}

/// Convenience wrapper for machine-word inputs.
pub fn check_sidon_u64(set: &[u64]) -> SidonReport {
    let big: Vec<BigUint> = set.iter().map(|&x| BigUint::from(x)).collect();
    check_sidon(&big)
}

/// Blockwise test for a candidate bad tuple: `Δ_ip + Δ_iq = Δ_ir + Δ_is`
/// for every block index, with missing blocks read as zero, and
/// `t_p + t_q = t_r + t_s`.
pub fn classify_tuple(p: &ElementRecord, q: &ElementRecord, r: &ElementRecord, s: &ElementRecord) -> bool {
    if p.t() + q.t() != r.t() + s.t() {
        return false;
    }
    let len = [p, q, r, s].iter().map(|e| e.blocks().len()).max().unwrap_or(0);
    let block = |e: &ElementRecord, i: usize| e.blocks().get(i).copied().unwrap_or(0) as u128;
    (0..len).all(|i| block(p, i) + block(q, i) == block(r, i) + block(s, i))
}
