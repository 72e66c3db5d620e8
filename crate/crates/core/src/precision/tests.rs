use std::string::ToString;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn contains_decimal(x: &FixedReal, s: &str) -> bool {
    // s is a decimal with enough digits that its truncation error is below
    // the enclosure width; compare as a ratio
    let (int, frac) = s.split_once('.').unwrap();
    let num: BigInt = (int.to_string() + frac).parse().unwrap();
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    x.contains_ratio(&num, &den)
}

// --- independent slow evaluators -------------------------------------------

const ORACLE_SCALE: u32 = 420;
// accumulated truncation error of the oracles, in 2^-ORACLE_SCALE units,
// is far below this
const ORACLE_SLACK: u32 = 1 << 20;

/// arctan(num/den) via Euler's series
/// Σ 2^2k (k!)² / (2k+1)! · x^(2k+1) / (1+x²)^(k+1), at scale ORACLE_SCALE.
fn oracle_arctan(num: u64, den: u64) -> BigInt {
    let n = BigInt::from(num);
    let d = BigInt::from(den);
    let q = &n * &n + &d * &d;
    let mut term = ((&n * &d) << ORACLE_SCALE) / &q;
    let mut sum = BigInt::from(0);
    let mut k = 0u64;
    while term > BigInt::from(0) {
        sum += &term;
        term = term * BigInt::from(2 * k + 2) * (&n * &n) / (BigInt::from(2 * k + 3) * &q);
        k += 1;
    }
    sum
}

/// ln 2 = Σ 1/(k·2^k), at scale ORACLE_SCALE.
fn oracle_ln2() -> BigInt {
    let mut sum = BigInt::from(0);
    for k in 1..(ORACLE_SCALE as u64 + 40) {
        sum += (BigInt::one() << ORACLE_SCALE) / (BigInt::from(k) << k as u32);
    }
    sum
}

/// exp(x) for x = xm·2^-ORACLE_SCALE ≥ 0 via halving and Taylor series.
fn oracle_exp(xm: &BigInt) -> BigInt {
    let s = 12u32;
    let r = xm >> s;
    let one = BigInt::one() << ORACLE_SCALE;
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut k = 1u64;
    loop {
        term = ((&term * &r) >> ORACLE_SCALE) / BigInt::from(k);
        if term == BigInt::from(0) {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..s {
        sum = (&sum * &sum) >> ORACLE_SCALE;
    }
    sum
}

fn to_oracle_scale(m: &BigInt, scale: u32) -> BigInt {
    if scale <= ORACLE_SCALE {
        m << (ORACLE_SCALE - scale)
    } else {
        m >> (scale - ORACLE_SCALE)
    }
}

fn consistent_with(x: &FixedReal, oracle: &BigInt) -> bool {
    let slack = BigInt::from(ORACLE_SLACK);
    let lo = to_oracle_scale(x.lo(), x.scale_bits());
    let hi = to_oracle_scale(x.hi(), x.scale_bits()) + 1;
    lo <= oracle + &slack && oracle - &slack <= hi
}

// --- pi ----------------------------------------------------------------------

#[test]
fn pi_at_8_bits() {
    let pi = pi_const(8);
    // π ∈ enclosure ⊂ [3.14159, 3.14160]
    let bracket = FixedReal::new(BigInt::from(314159), BigInt::from(314160), 0);
    let scaled = pi.mul_int(&BigInt::from(100000));
    assert!(bracket.contains(&scaled));
    assert!(pi.width_at_most(8));
}

#[test]
fn pi_at_64_bits() {
    let pi = pi_const(64);
    assert!(pi.width_at_most(64));
    assert!(contains_decimal(&pi, "3.14159265358979323846264338327950288419716939937510"));
}

#[test]
fn pi_endpoints_ordered_for_many_precisions() {
    for bits in 8..200 {
        let pi = pi_const(bits);
        assert!(pi.lo() <= pi.hi());
        assert!(pi.width_at_most(bits), "bits={bits}");
    }
}

// --- arctan ------------------------------------------------------------------

#[test]
fn arctan_one_half() {
    let x = arctan_ratio(1u32, 2u32, 64).unwrap();
    assert!(x.width_at_most(64));
    assert!(contains_decimal(&x, "0.46364760900080611621425623146121440202853705428612"));
}

#[test]
fn arctan_tiny_argument() {
    let x = arctan_ratio(1u32, 1_000_000u32, 32).unwrap();
    assert!(x.width_at_most(32));
    // arctan x = x − x³/3 + …, so 10^-6 is within 2^-32
    let slack = FixedReal::new(BigInt::from(-1), BigInt::from(1), 32);
    assert!(x.add(&slack).contains_ratio(&BigInt::one(), &BigInt::from(1_000_000)));
}

#[test]
fn arctan_rejects_num_not_below_den() {
    assert!(arctan_ratio(1u32, 1u32, 32).is_err());
    assert!(arctan_ratio(5u32, 3u32, 32).is_err());
    assert!(arctan_ratio(1u32, 0u32, 32).is_err());
}

#[test]
fn arctan_containment_against_euler_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let den: u64 = rng.gen_range(2..1u64 << 40);
        let num: u64 = rng.gen_range(1..den);
        let bits = rng.gen_range(16..160);
        let x = arctan_ratio(num, den, bits).unwrap();
        assert!(x.width_at_most(bits));
        assert!(consistent_with(&x, &oracle_arctan(num, den)), "arctan({num}/{den}) at {bits}");
    }
}

#[test]
fn arctan_near_one() {
    // the largest arguments a > b > 0 can produce
    for (num, den) in [(999_999u64, 1_000_000u64), (2, 3), (99, 100)] {
        let x = arctan_ratio(num, den, 128).unwrap();
        assert!(x.width_at_most(128));
        assert!(consistent_with(&x, &oracle_arctan(num, den)));
    }
}

// --- logarithms --------------------------------------------------------------

#[test]
fn log2_of_power_of_two_is_exact() {
    for bits in [8, 64, 300] {
        let x = log_of(8, LogBase::Two, bits).unwrap();
        assert!(x.contains_int(&BigInt::from(3)));
        assert!(x.is_exact());
    }
}

#[test]
fn ln_100() {
    let x = log_of(100, LogBase::Natural, 64).unwrap();
    assert!(x.width_at_most(64));
    assert!(contains_decimal(&x, "4.60517018598809136803598290936872841520220297725754"));
}

#[test]
fn log2_5() {
    let x = log_of(5, LogBase::Two, 64).unwrap();
    assert!(x.width_at_most(64));
    assert!(contains_decimal(&x, "2.32192809488736234787031942948939017586483139302458"));
}

#[test]
fn log_rejects_small_arguments() {
    assert!(log_of(0, LogBase::Natural, 64).is_err());
    assert!(log_of(1, LogBase::Two, 64).is_err());
}

#[test]
fn ln_containment_against_exp() {
    // exp(lo) ≤ n ≤ exp(hi) checked with an independent exponential
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let one = BigInt::one() << ORACLE_SCALE;
    for _ in 0..300 {
        let n: u64 = rng.gen_range(2..u64::MAX);
        let bits = rng.gen_range(16..128);
        let x = log_of(n, LogBase::Natural, bits).unwrap();
        assert!(x.width_at_most(bits));
        let n_scaled = BigInt::from(n) * &one;
        let lo = to_oracle_scale(x.lo(), x.scale_bits());
        let hi = to_oracle_scale(x.hi(), x.scale_bits()) + 1;
        let rel = &n_scaled >> 300u32;
        assert!(oracle_exp(&lo) <= &n_scaled + &rel, "ln {n} lower");
        assert!(oracle_exp(&hi) >= &n_scaled - &rel, "ln {n} upper");
    }
}

#[test]
fn log2_containment_against_exp() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let one = BigInt::one() << ORACLE_SCALE;
    let ln2 = oracle_ln2();
    for _ in 0..300 {
        let n: u64 = rng.gen_range(2..1u64 << 50);
        let x = log_of(n, LogBase::Two, 64).unwrap();
        let n_scaled = BigInt::from(n) * &one;
        let rel = &n_scaled >> 300u32;
        let lo = to_oracle_scale(x.lo(), x.scale_bits());
        let hi = to_oracle_scale(x.hi(), x.scale_bits()) + 1;
        let e_lo = oracle_exp(&((&lo * &ln2) >> ORACLE_SCALE));
        let e_hi = oracle_exp(&((&hi * &ln2) >> ORACLE_SCALE));
        assert!(e_lo <= &n_scaled + &rel, "log2 {n} lower");
        assert!(e_hi >= &n_scaled - &rel, "log2 {n} upper");
    }
}

// --- refinement and determinism ---------------------------------------------

#[test]
fn doubling_bits_never_widens() {
    let width = |x: &FixedReal| x.width_mantissa() << (4096 - x.scale_bits());
    for bits in [16u32, 32, 64, 128, 256] {
        let a = pi_const(bits);
        let b = pi_const(bits * 2);
        assert!(width(&b) <= width(&a));
        let a = arctan_ratio(3u32, 7u32, bits).unwrap();
        let b = arctan_ratio(3u32, 7u32, bits * 2).unwrap();
        assert!(width(&b) <= width(&a));
        let a = log_of(1_000_003, LogBase::Two, bits).unwrap();
        let b = log_of(1_000_003, LogBase::Two, bits * 2).unwrap();
        assert!(width(&b) <= width(&a));
    }
}

#[test]
fn identical_inputs_identical_enclosures() {
    assert_eq!(arctan_ratio(12u32, 345u32, 99).unwrap(), arctan_ratio(12u32, 345u32, 99).unwrap());
    assert_eq!(log_of(77, LogBase::Natural, 77).unwrap(), log_of(77, LogBase::Natural, 77).unwrap());
    assert_eq!(pi_const(200), pi_const(200));
}

// --- floors ------------------------------------------------------------------

fn dec(lo: i64, hi: i64, scale: u32) -> FixedReal {
    FixedReal::new(BigInt::from(lo), BigInt::from(hi), scale)
}

#[test]
fn floor_determined_interval() {
    // [0.51, 0.52] at 10 bits: 522/1024 .. 533/1024
    let x = dec(522, 533, 10);
    assert_eq!(floor_scaled(&x, 1).unwrap(), BigInt::from(1));
}

#[test]
fn floor_straddling_integer_needs_precision() {
    // [0.999, 1.001]
    let x = dec(1022, 1026, 10);
    assert!(matches!(floor_scaled(&x, 0), Err(Error::NeedsMorePrecision { .. })));
}

#[test]
fn floor_of_negative_values_rounds_down() {
    let x = dec(-1536, -1536, 10); // -1.5
    assert_eq!(floor_scaled(&x, 0).unwrap(), BigInt::from(-2));
    assert_eq!(floor_scaled(&x, 1).unwrap(), BigInt::from(-3));
}

#[test]
fn floor_of_exact_powers_of_two() {
    for k in 0..70u32 {
        let x = log_of(1u64 << k.min(63), LogBase::Two, 32).unwrap_or_else(|_| FixedReal::from_int(0));
        if k == 0 || k > 63 {
            continue;
        }
        assert_eq!(floor_scaled(&x, 0).unwrap(), BigInt::from(k));
        assert_eq!(floor_scaled(&x, 3).unwrap(), BigInt::from(8 * k));
    }
}

#[test]
fn floor_scaled_phi5() {
    // ⌊2^16·arctan(1/2)/π⌋
    let phi = arctan_ratio(1u32, 2u32, 128).unwrap().div(&pi_const(128)).unwrap();
    assert_eq!(floor_scaled(&phi, 16).unwrap(), BigInt::from(9672));
}

#[test]
fn escalation_stops_at_cap() {
    let p = Precision::new(8, 64).unwrap();
    let mut seen = std::vec::Vec::new();
    let r = p.floor(0, |bits| {
        seen.push(bits);
        Ok(dec(-1, 1, bits))
    });
    assert_eq!(r, Err(Error::PrecisionCapExceeded { cap: 64 }));
    assert_eq!(seen, [8, 16, 32, 64]);
}

#[test]
fn escalation_returns_first_determined_floor() {
    let p = Precision::default();
    let n = p
        .floor(10, |bits| {
            let pi = pi_const(bits);
            Ok(pi)
        })
        .unwrap();
    assert_eq!(n, BigInt::from(3216)); // ⌊1024π⌋
}

// --- interval operations -----------------------------------------------------

#[test]
fn beta_solves_its_quadratic() {
    let beta = beta_const(128);
    let two = BigInt::from(2);
    let q = beta.mul(&beta).sub(&beta.mul_int(&two)).sub(&FixedReal::from_int(1));
    assert!(q.contains_int(&BigInt::from(0)));
    assert!(q.width_at_most(60));
}

#[test]
fn division_and_decimal_rendering() {
    let third = FixedReal::from_int(1).div(&FixedReal::from_int(3)).unwrap();
    assert!(third.contains_ratio(&BigInt::one(), &BigInt::from(3)));
    let (lo, hi) = FixedReal::from_int(-7).mul_pow2(-1).to_decimal(3);
    assert_eq!((lo.as_str(), hi.as_str()), ("-3.500", "-3.500"));
    let (lo, hi) = pi_const(64).to_decimal(10);
    assert_eq!((lo.as_str(), hi.as_str()), ("3.1415926535", "3.1415926536"));
}

#[test]
fn alpha_must_be_in_unit_dilation_range() {
    assert!(DyadicRational::alpha(1, 0).is_ok());
    assert!(DyadicRational::alpha(3, 1).is_ok());
    assert!(DyadicRational::alpha(2, 0).is_err());
    assert!(DyadicRational::alpha(3, 2).is_err());
    assert!(DyadicRational::alpha(63, 5).is_ok());
}

#[test]
fn width_log2() {
    assert_eq!(dec(0, 1, 10).width_log2_ceil(), Some(-10));
    assert_eq!(dec(0, 3, 10).width_log2_ceil(), Some(-8));
    assert_eq!(dec(5, 5, 10).width_log2_ceil(), None);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn interval_ops_contain_exact_rationals(a in -1000i64..1000, b in -1000i64..1000,
                                                 c in 1i64..1000, sa in 0u32..20, sb in 0u32..20) {
            // exact dyadics x = a/2^sa, y = b/2^sb, z = c/2^sb (positive)
            let x = FixedReal::new(BigInt::from(a), BigInt::from(a), sa);
            let y = FixedReal::new(BigInt::from(b), BigInt::from(b), sb);
            let z = FixedReal::new(BigInt::from(c), BigInt::from(c), sb);
            let den = |s: u32| BigInt::one() << s;
            let xy_num = BigInt::from(a) * BigInt::from(b);
            prop_assert!(x.mul(&y).contains_ratio(&xy_num, &den(sa + sb)));
            // x / z = a·2^sb / (c·2^sa)
            let q = x.div(&z).unwrap();
            prop_assert!(q.contains_ratio(&(BigInt::from(a) << sb), &(BigInt::from(c) << sa)));
            let s = x.add(&y);
            prop_assert!(s.contains_ratio(&((BigInt::from(a) << sb) + (BigInt::from(b) << sa)), &den(sa + sb)));
        }

        #[test]
        fn rescaling_keeps_containment(lo in -100000i64..100000, w in 0i64..1000, s in 0u32..30, t in 0u32..30) {
            let x = FixedReal::new(BigInt::from(lo), BigInt::from(lo + w), s);
            prop_assert!(x.with_scale(t).contains(&x));
        }
    }
}
