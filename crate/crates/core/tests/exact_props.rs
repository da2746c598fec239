use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use moebius::exact::{GeneratorAssignment, GroupWord, LocalizedScalar, UniModularMatrix};
use moebius::modular::{decompose_st, st_assignment};

fn scalar() -> impl Strategy<Value = (i64, u32)> {
    // numerator over 2^i 3^j
    (-10_000i64..10_000, 0u32..16)
}

fn den(code: u32) -> i64 {
    2i64.pow(code % 4) * 3i64.pow(code / 4)
}

fn both(n: i64, code: u32) -> (LocalizedScalar, BigRational) {
    let d = den(code);
    (
        LocalizedScalar::new(n, d).unwrap(),
        BigRational::new(BigInt::from(n), BigInt::from(d)),
    )
}

fn agrees(x: &LocalizedScalar, r: &BigRational) -> bool {
    x.numerator() == r.numer() && x.denominator() == r.denom()
}

fn word(max_len: usize) -> impl Strategy<Value = GroupWord> {
    prop::collection::vec((0usize..2, prop::bool::ANY), 0..max_len).prop_map(|letters| {
        GroupWord::from_syllables(
            letters
                .into_iter()
                .map(|(g, inv)| (["s", "t"][g], if inv { -1 } else { 1 })),
        )
    })
}

fn q(n: i64, d: i64) -> LocalizedScalar {
    LocalizedScalar::new(n, d).unwrap()
}

fn sample_matrices() -> GeneratorAssignment {
    let mut asg = GeneratorAssignment::new();
    asg.insert(
        "s",
        UniModularMatrix::new(q(0, 1), q(1, 6), q(-6, 1), q(0, 1)).unwrap(),
    );
    asg.insert(
        "t",
        UniModularMatrix::new(q(1, 1), q(0, 1), q(5, 4), q(1, 1)).unwrap(),
    );
    asg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scalar_field_ops_match_rationals((a, ca) in scalar(), (b, cb) in scalar()) {
        let (x, rx) = both(a, ca);
        let (y, ry) = both(b, cb);
        prop_assert!(agrees(&(&x + &y), &(&rx + &ry)));
        prop_assert!(agrees(&(&x - &y), &(&rx - &ry)));
        prop_assert!(agrees(&(&x * &y), &(&rx * &ry)));
        prop_assert!(agrees(&(-&x), &(-rx.clone())));
        prop_assert_eq!(x == y, rx == ry);
        if b != 0 {
            prop_assert!(agrees(&x.checked_div(&y).unwrap(), &(&rx / &ry)));
            let in_z6 = |r: &BigRational| {
                let mut d = r.denom().clone();
                for p in [2, 3] {
                    while (&d % p) == BigInt::from(0) {
                        d /= p;
                    }
                }
                d == BigInt::from(1)
            };
            let quotient = x.checked_div(&y).unwrap();
            prop_assert_eq!(quotient.in_localization(&BigInt::from(6)), in_z6(&(&rx / &ry)));
        } else {
            prop_assert!(x.checked_div(&y).is_none());
        }
        let m = 1_000_003u64;
        if let (Some(r1), Some(r2)) = (x.residue(m), y.residue(m)) {
            prop_assert_eq!((&x * &y).residue(m), Some(r1 * r2 % m));
            prop_assert_eq!((&x + &y).residue(m), Some((r1 + r2) % m));
        }
    }

    #[test]
    fn scalar_text_round_trip((a, ca) in scalar()) {
        let (x, _) = both(a, ca);
        let back: LocalizedScalar = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn products_stay_unimodular(w in word(40), v in word(40)) {
        let asg = sample_matrices();
        let m = asg.evaluate(&w).unwrap();
        let n = asg.evaluate(&v).unwrap();
        prop_assert!((&m * &n).determinant().is_one());
        prop_assert!((&m * &m.inverse()).is_identity());
        prop_assert!((&m.inverse() * &m).is_identity());
        let back: UniModularMatrix = m.to_string().parse().unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn evaluation_is_a_homomorphism(w in word(30), v in word(30), k in -3i64..4) {
        let asg = sample_matrices();
        let m = asg.evaluate(&w).unwrap();
        let n = asg.evaluate(&v).unwrap();
        prop_assert_eq!(asg.evaluate(&w.concat(&v)).unwrap(), &m * &n);
        prop_assert_eq!(asg.evaluate(&w.inverse()).unwrap(), m.inverse());
        prop_assert_eq!(asg.evaluate(&w.pow(k)).unwrap(), m.pow(k));
        prop_assert!(asg.evaluate(&w.concat(&w.inverse())).unwrap().is_identity());
    }

    #[test]
    fn words_are_freely_reduced(w in word(40), v in word(40)) {
        let c = w.concat(&v);
        for pair in c.syllables().windows(2) {
            prop_assert!(pair[0].0 != pair[1].0);
        }
        prop_assert!(c.syllables().iter().all(|(_, e)| *e != 0));
        let back: GroupWord = c.to_string().parse().unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn st_decomposition_round_trip(w in word(60)) {
        let asg = st_assignment();
        let m = asg.evaluate(&w).unwrap();
        let d = decompose_st(&m).unwrap();
        prop_assert_eq!(asg.evaluate(&d).unwrap(), m);
    }
}
