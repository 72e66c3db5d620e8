use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;

use super::*;
use crate::precision::DyadicRational;
use crate::primes::primes_1mod4_upto;
use crate::verifier::{check_sidon, classify_tuple};

fn params(k_max: u32) -> ConstructionParams {
    ConstructionParams::new(DyadicRational::ONE, k_max).unwrap()
}

fn synthetic() -> Vec<ElementRecord> {
    vec![
        ElementRecord::from_blocks(1, vec![1, 3]).unwrap(),
        ElementRecord::from_blocks(2, vec![0, 1]).unwrap(),
        ElementRecord::from_blocks(3, vec![1, 2]).unwrap(),
        ElementRecord::from_blocks(4, vec![0, 2]).unwrap(),
    ]
}

#[test]
fn class_indices() {
    let pr = params(6);
    assert_eq!(k_index(5, &pr).unwrap(), 4);
    assert_eq!(k_index(13, &pr).unwrap(), 4);
    assert_eq!(k_index(17, &pr).unwrap(), 5);
    assert_eq!(k_index(41, &pr).unwrap(), 5);
    assert!(k_index(7, &pr).is_err());
    assert!(k_index(21, &pr).is_err());
}

#[test]
fn params_reject_small_k_max_and_bad_alpha() {
    assert!(ConstructionParams::new(DyadicRational::ONE, 2).is_err());
    assert!(ConstructionParams::new(DyadicRational::new(1, 1).unwrap(), 5).is_err());
}

#[test]
fn beta_enclosure_is_root() {
    let pr = params(4);
    let b = &pr.beta;
    let two = crate::BigInt::from(2);
    let q = b.mul(b).sub(&b.mul_int(&two)).sub(&FixedReal::from_int(1));
    assert!(q.contains_int(&crate::BigInt::from(0)));
    assert!(q.width_at_most(60));
}

#[test]
fn class_members_partition_the_range() {
    let pr = params(6);
    let four = class_members(4, &pr).unwrap();
    assert_eq!(four.primes(), &[5, 13]);
    assert!(class_members(3, &pr).unwrap().is_empty());
    let mut union = Vec::new();
    for k in 3..=6 {
        union.extend(class_members(k, &pr).unwrap().iter());
    }
    let expect: Vec<u64> =
        primes_1mod4_upto(class_bound(6).unwrap()).iter().filter(|&p| k_index(p, &pr).unwrap() <= 6).collect();
    assert_eq!(union, expect);
    assert!(class_members(2, &pr).is_err());
}

#[test]
fn m_values() {
    let pr = params(6);
    assert_eq!(m_value(5, &pr).unwrap(), BigUint::from(9672u32));
    let three_halves = pr.clone().with_alpha(DyadicRational::alpha(3, 1).unwrap()).unwrap();
    assert_eq!(m_value(13, &three_halves).unwrap(), BigUint::from(18399u32));
    assert_eq!(m_value(13, &pr).unwrap(), BigUint::from(12266u32));
    for p in class_members(6, &pr).unwrap().iter() {
        let m = m_value(p, &pr).unwrap();
        assert!(m < BigUint::from(1u64 << 34));
    }
}

#[test]
fn element_of_five() {
    let e = element(5, &params(6)).unwrap();
    assert_eq!(e.class(), 4);
    assert_eq!(e.m(), &BigUint::from(9672u32));
    assert_eq!(e.a().bits(), 31);
    assert_eq!(e, element(5, &params(6)).unwrap());
}

#[test]
fn catalog_elements_match_direct_chain() {
    let pr = params(6);
    let cat = Catalog::build(&pr).unwrap();
    let recs = cat.elements(pr.alpha).unwrap();
    assert_eq!(recs.len(), cat.len());
    for r in &recs {
        assert_eq!(r, &element(r.p(), &pr).unwrap());
        assert!(r.t() < r.a() && r.a() < &(r.t() << 1u32));
    }
    let alpha = DyadicRational::alpha(45, 5).unwrap();
    let pa = pr.clone().with_alpha(alpha).unwrap();
    for r in cat.elements(alpha).unwrap().iter().take(20) {
        assert_eq!(r, &element(r.p(), &pa).unwrap());
    }
}

#[test]
fn generate_small_k_max() {
    let recs = generate(&params(4)).unwrap();
    let ps: Vec<u64> = recs.iter().map(ElementRecord::p).collect();
    assert_eq!(ps, vec![5, 13]);
    assert!(generate(&params(3)).unwrap().is_empty());
}

#[test]
fn element_bit_lengths() {
    // a_p has exactly K²+3K+3 bits, so log₂ a_p / log₂ p falls toward β
    // only as K grows; at these sizes it is still far above β + 1
    let pr = params(7);
    let mut last_class = 0;
    for p in primes_1mod4_upto(10_000).iter() {
        let e = element(p, &pr).unwrap();
        let k = e.class();
        assert_eq!(e.a().bits(), (k * k + 3 * k + 3) as u64, "p = {p}");
        assert!(k >= last_class);
        last_class = k;
    }
    assert_eq!(last_class, 7);
}

#[test]
fn synthetic_bad_tuple() {
    let recs = synthetic();
    let a: Vec<u32> = recs.iter().map(|r| u32::try_from(r.a()).unwrap()).collect();
    assert_eq!(a, vec![4488, 4224, 4360, 4352]);
    let bad = find_bad_tuples(&recs);
    assert_eq!(bad, vec![BadTuple { k: 2, l: 2, p: 1, q: 2, r: 3, s: 4 }]);
    assert!(classify_tuple(&recs[0], &recs[1], &recs[2], &recs[3]));
    let set = prune(&recs, &bad);
    assert_eq!(set.removed.len(), 1);
    assert_eq!(set.removed[0].a(), &BigUint::from(4488u32));
    assert!(check_sidon(&set.elements).ok);
}

#[test]
fn small_inputs_have_no_tuples() {
    let recs = synthetic();
    assert!(find_bad_tuples(&recs[..3]).is_empty());
    assert!(find_bad_tuples(&[]).is_empty());
}

#[test]
fn classify_identical_records() {
    let r = ElementRecord::from_blocks(9, vec![1, 5, 17]).unwrap();
    assert!(classify_tuple(&r, &r, &r, &r));
    let recs = synthetic();
    assert!(!classify_tuple(&recs[0], &recs[1], &recs[2], &recs[1]));
}

#[test]
fn dedup_keeps_smallest_prime() {
    let a = ElementRecord::from_blocks(7, vec![1, 3]).unwrap();
    let b = ElementRecord::from_blocks(3, vec![1, 3]).unwrap();
    let c = ElementRecord::from_blocks(5, vec![0, 3]).unwrap();
    let d = dedup(&[a.clone(), b.clone(), c.clone()]);
    assert_eq!(d.kept, vec![b.clone(), c.clone()]);
    assert_eq!(d.duplicates, vec![a.clone()]);
    let set = prune(&[a, b, c], &[]);
    assert_eq!(set.elements.len(), 2);
    assert_eq!(set.removed.len(), 1);
}

#[test]
fn gate_values() {
    assert!(class_gate(4, 3));
    assert!(class_gate(6, 4));
    assert!(class_gate(5, 4));
    assert!(!class_gate(4, 4));
    assert!(!class_gate(8, 7));
    assert!(!class_gate(6, 6));
    assert!(class_gate(2, 2));
}

#[test]
fn angle_window() {
    let f = |n: i64| FixedReal::from_int(n).mul_pow2(-20);
    // Σ = 3·2^-20 against c = 4·2^-9
    assert!(angle_window_admits(&f(5), &f(1), &f(2), &f(1), 3));
    // Σ = 2^-4 is far outside
    assert!(!angle_window_admits(&f(1 << 16), &f(0), &f(0), &f(0), 3));
    // boundary: Σ = c exactly is rejected
    assert!(!angle_window_admits(&f(1 << 13), &f(0), &f(0), &f(0), 3));
}

#[test]
fn full_runs_are_sidon() {
    let pr = params(6);
    let cat = Catalog::build(&pr).unwrap();
    for num in [32u64, 40, 47, 63] {
        let alpha = DyadicRational::alpha(num, 5).unwrap();
        let run = construct(&cat, alpha, ConstructOptions::default()).unwrap();
        assert!(check_sidon(&run.elements).ok, "α = {alpha}");
        let raw = construct(&cat, alpha, ConstructOptions { prune: true, filtered: false }).unwrap();
        assert_eq!(run.bad_tuples, raw.bad_tuples);
        for t in &run.bad_tuples {
            let get = |p| run.records.iter().find(|r| r.p() == p).unwrap();
            let shift = t.k * t.k - t.l * t.l;
            assert_eq!(get(t.p).m() + (get(t.q).m() << shift), get(t.r).m() + (get(t.s).m() << shift));
        }
    }
}

#[test]
fn counting_and_slope() {
    let set: Vec<BigUint> = [3u32, 10, 200].iter().map(|&x| BigUint::from(x)).collect();
    assert_eq!(counting(&set, &BigUint::from(2u32)), 0);
    assert_eq!(counting(&set, &BigUint::from(200u32)), 3);
    assert_eq!(counting(&set, &BigUint::from(10u32)), 2);
    let row = slope_at(&set, 1);
    assert_eq!((row.x_log2, row.count), (9, 3));
    assert!(slope_at(&[], 4).slope.is_none());
}
