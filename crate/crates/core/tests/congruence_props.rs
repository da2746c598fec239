mod common;

use num_bigint::BigUint;
use proptest::prelude::*;

use moebius::arith::{gcd, is_prime};
use moebius::congruence::{
    closure_generators, generator_images, level_data, member_of_closure, quotient_image,
    reduce_mod, sl2_order, subgroup_closure, surjects_mod_p, DEFAULT_CLOSURE_CAP,
};
use moebius::exact::{GeneratorAssignment, GroupWord, UniModularMatrix};

fn ab_word(max_len: usize) -> impl Strategy<Value = GroupWord> {
    prop::collection::vec((0usize..2, -3i64..4), 0..max_len)
        .prop_map(|syl| GroupWord::from_syllables(syl.into_iter().map(|(g, e)| (["A", "B"][g], e))))
}

fn moebius_assignment(a: u64, b: u64) -> GeneratorAssignment {
    let (ma, mb) = moebius::exact::make_moebius_generators(a, b).unwrap();
    let mut asg = GeneratorAssignment::new();
    asg.insert("A", ma);
    asg.insert("B", mb);
    asg
}

fn coprime_pair() -> impl Strategy<Value = (u64, u64)> {
    (1u64..12, 2u64..12).prop_filter("coprime", |(a, b)| gcd(*a, *b) == 1)
}

#[test]
fn sl2_order_matches_counting() {
    for n in 1..=12 {
        assert_eq!(
            sl2_order(n),
            BigUint::from(common::brute_sl2_order(n)),
            "n = {n}"
        );
    }
}

#[test]
fn level_and_index_formula() {
    for (a, b) in [
        (1u64, 2u64),
        (3, 2),
        (5, 3),
        (7, 4),
        (9, 5),
        (5, 9),
        (11, 7),
    ] {
        let d = level_data(a, b).unwrap();
        assert_eq!(d.level, a * a);
        assert_eq!(
            d.expected_index,
            BigUint::from(a * common::brute_sl2_order(a))
        );
    }
}

#[test]
fn prime_power_closures() {
    // image mod p^(2e) is C_{p^e} x C_{p^e}
    for (p, e, b) in [
        (2u64, 1u32, 3u64),
        (2, 2, 5),
        (3, 1, 2),
        (3, 2, 2),
        (5, 1, 3),
        (7, 1, 2),
    ] {
        let a = p.pow(e);
        let img = quotient_image(a, b, DEFAULT_CLOSURE_CAP).unwrap().unwrap();
        assert_eq!(img.order(), a * a, "p={p} e={e}");
        assert!(img.is_abelian());
        assert_eq!(img.exponent(), a);
    }
    // A(a/b) and B(a/b) are trivial modulo any divisor of a
    let img = subgroup_closure(&generator_images(4, 3, 2).unwrap(), 2, 100).unwrap();
    assert_eq!(img.order(), 1);
}

#[test]
fn level_generators_lie_in_principal_subgroup() {
    for (a, b) in [(3u64, 2u64), (5, 3), (7, 4), (4, 9)] {
        for g in &closure_generators(a, b).unwrap()[2..] {
            assert!(reduce_mod(g, a * a).unwrap().is_identity(), "{a}/{b}: {g}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reduction_is_multiplicative(w in ab_word(12), v in ab_word(12), n in 2u64..60) {
        let asg = moebius_assignment(3, 2);
        prop_assume!(n % 2 == 1);
        let m = asg.evaluate(&w).unwrap();
        let k = asg.evaluate(&v).unwrap();
        let lhs = reduce_mod(&(&m * &k), n).unwrap();
        let rhs = reduce_mod(&m, n).unwrap().mul(&reduce_mod(&k, n).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(reduce_mod(&m.inverse(), n).unwrap(), reduce_mod(&m, n).unwrap().inverse());
    }

    #[test]
    fn surjection_primes_are_those_of_a((a, b) in coprime_pair(), p in 2u64..24) {
        prop_assume!(is_prime(p) && b % p != 0);
        prop_assert_eq!(surjects_mod_p(a, b, p).unwrap(), a % p != 0);
    }

    #[test]
    fn subgroup_elements_pass_closure_test((a, b) in coprime_pair(), w in ab_word(16)) {
        let g = moebius_assignment(a, b).evaluate(&w).unwrap();
        prop_assert!(member_of_closure(&g, a, b, DEFAULT_CLOSURE_CAP).unwrap());
    }

    /// `G(a/b) <= G(a/(kb))`, so elements of the former never fail the latter's closure test.
    #[test]
    fn closure_is_monotone_in_b((a, b) in coprime_pair(), k in 2u64..4, w in ab_word(16)) {
        prop_assume!(gcd(a, k * b) == 1);
        let g = moebius_assignment(a, b).evaluate(&w).unwrap();
        prop_assert!(member_of_closure(&g, a, k * b, DEFAULT_CLOSURE_CAP).unwrap());
    }

    #[test]
    fn subgroup_words_are_torsion_free(a in 2u64..12, b in 2u64..12, w in ab_word(20)) {
        prop_assume!(gcd(a, b) == 1);
        let g = moebius_assignment(a, b).evaluate(&w).unwrap();
        prop_assert!(g.is_identity() || g.finite_order().is_none(), "{} has finite order", g);
    }
}

#[test]
fn integral_torsion_is_detected() {
    let s: UniModularMatrix = "[[0,1],[-1,0]]".parse().unwrap();
    let st: UniModularMatrix = "[[0,1],[-1,1]]".parse().unwrap();
    assert_eq!(s.finite_order(), Some(4));
    assert_eq!(st.finite_order(), Some(6));
    assert!(!member_of_closure(&s, 3, 2, DEFAULT_CLOSURE_CAP).unwrap());
}
