use proptest::prelude::*;
use sidon_core::gaussian::{phi_of, two_squares};
use sidon_core::infinite::{
    assemble, blocks_of, construct, digits_value, Catalog, ConstructOptions, ConstructionParams,
};
use sidon_core::precision::{floor_scaled, DyadicRational};
use sidon_core::primes::is_prime;
use sidon_core::verifier::{check_sidon_u64, check_sidon_with, VerifyOptions};
use sidon_core::{BigInt, BigUint};

fn naive_sidon(set: &[u64]) -> bool {
    let mut sums = Vec::new();
    for (i, &x) in set.iter().enumerate() {
        for &y in &set[i..] {
            sums.push(x as u128 + y as u128);
        }
    }
    sums.sort_unstable();
    sums.windows(2).all(|w| w[0] != w[1])
}

proptest! {
    #[test]
    fn verifier_matches_naive(set in prop::collection::vec(0u64..400, 0..40)) {
        let report = check_sidon_u64(&set);
        prop_assert_eq!(report.ok, naive_sidon(&set));
        if let Some(w) = report.witness {
            prop_assert!(w.holds());
        }
    }

    #[test]
    fn witness_ignores_pass_count(set in prop::collection::vec(0u64..2000, 2..60), budget in 1usize..200) {
        let big: Vec<BigUint> = set.iter().map(|&x| BigUint::from(x)).collect();
        let one = check_sidon_with(&big, VerifyOptions { pair_budget: usize::MAX });
        let many = check_sidon_with(&big, VerifyOptions { pair_budget: budget });
        prop_assert_eq!(one.witness, many.witness);
    }

    #[test]
    fn blocks_round_trip(k in 1u32..=8, seed in any::<u64>()) {
        let m = BigUint::from(seed) % (BigUint::from(1u32) << (k * k));
        let blocks = blocks_of(&m, k).unwrap();
        prop_assert_eq!(digits_value(&blocks), m);
        let (a, t) = assemble(&blocks).unwrap();
        prop_assert_eq!(a.bits(), (k * k + 3 * k + 3) as u64);
        prop_assert!(t <= a);
    }

    #[test]
    fn phi_floors_agree_across_precisions(idx in 0usize..200, shift in 1i64..40) {
        let p = (5u64..).filter(|&p| p % 4 == 1 && is_prime(p)).nth(idx).unwrap();
        let lo = floor_scaled(phi_of(p, 96).unwrap().enclosure(), shift).unwrap();
        let hi = floor_scaled(phi_of(p, 192).unwrap().enclosure(), shift).unwrap();
        prop_assert_eq!(&lo, &hi);
        let d = two_squares(p).unwrap();
        let approx = (d.b() as f64).atan2(d.a() as f64) / std::f64::consts::PI;
        let f = (approx * (shift as f64).exp2()).floor();
        // a float can only disagree right at an integer boundary
        prop_assert!((BigInt::from(f as i64) - &lo).magnitude() <= &BigUint::from(1u32));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pruned_runs_are_sidon(bits in 0u32..10, frac in any::<u64>()) {
        let num = (1u64 << bits) + frac % (1u64 << bits);
        let alpha = DyadicRational::alpha(num, bits).unwrap();
        let params = ConstructionParams::new(alpha, 6).unwrap();
        let catalog = Catalog::build(&params).unwrap();
        let run = construct(&catalog, alpha, ConstructOptions::default()).unwrap();
        prop_assert!(sidon_core::verifier::check_sidon(&run.elements).ok);
        prop_assert!(run.elements.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn two_squares_small_exhaustive() {
    for p in (5..20_000u64).filter(|&p| p % 4 == 1 && is_prime(p)) {
        let d = two_squares(p).unwrap();
        let brute = (1..p).find(|&b| {
            let r = p - b * b;
            let a = (r as f64).sqrt() as u64;
            b * b < p && a * a == r && a > b
        });
        assert_eq!(Some(d.b()), brute, "p = {p}");
    }
}
