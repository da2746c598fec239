use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use moebius::arith::prime_divisors;
use moebius::exact::{GeneratorAssignment, GroupWord, LocalizedScalar, UniModularMatrix};
use moebius::presentation::{
    amalgam_matrices, build_presentation, express_in_gamma, gamma0_schreier_generators,
    upper_unipotent_word, verify_presentation_soundness, x_symbol, y_symbol, Presentation,
};

const BASES: [u64; 12] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 25, 35, 49];

#[test]
fn presentations_are_sound() {
    for b in BASES {
        let p = build_presentation(b).unwrap();
        assert!(verify_presentation_soundness(&p), "b = {b}");
        assert_eq!(p.generators().len(), 2 + 2 * prime_divisors(b).len());
        for piece in p.pieces() {
            assert!(piece.matching.len() as u64 <= piece.prime + 2);
        }
    }
}

#[test]
fn unsound_relator_is_caught() {
    let p = build_presentation(5).unwrap();
    let mut rels = p.relators().to_vec();
    rels.push("s^2".parse().unwrap());
    assert!(!verify_presentation_soundness(&Presentation::new(
        p.generators().to_vec(),
        rels
    )));
}

/// Orbit of `(1 : 0)` under the integer images of `x`, `y`, by brute force.
fn projective_orbit(p: i64) -> usize {
    let norm = |(u, v): (i64, i64)| -> (i64, i64) {
        let (u, v) = (u.rem_euclid(p), v.rem_euclid(p));
        if u == 0 {
            (0, 1)
        } else {
            let inv = (1..p).find(|i| i * u % p == 1).unwrap();
            (1, v * inv % p)
        }
    };
    let mut seen = HashSet::from([(1, 0)]);
    let mut stack = vec![(1, 0)];
    while let Some((u, v)) = stack.pop() {
        for m in [[0, 1, -1, 0], [1, -1, 0, 1]] {
            let next = norm((u * m[0] + v * m[2], u * m[1] + v * m[3]));
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    seen.len()
}

#[test]
fn schreier_generators_lie_in_gamma0() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        assert_eq!(projective_orbit(p as i64), p as usize + 1);
        let words = gamma0_schreier_generators(p).unwrap();
        assert!(!words.is_empty() && words.len() as u64 <= p + 2, "p = {p}");
        let (xm, ym) = amalgam_matrices(p);
        let mut asg = GeneratorAssignment::new();
        asg.insert(x_symbol(p), xm);
        asg.insert(y_symbol(p), ym);
        for w in &words {
            let m = asg.evaluate(w).unwrap();
            assert!(m.is_integral(), "p = {p}: {w} -> {m}");
            let c = m.e21().to_integer().unwrap();
            assert!((c % BigInt::from(p)).is_zero(), "p = {p}: {w} -> {m}");
            assert!(!m.is_identity());
        }
    }
}

#[test]
fn text_and_json_round_trip() {
    for b in [5u64, 35] {
        let p = build_presentation(b).unwrap();
        let t = Presentation::from_text(&p.to_text()).unwrap();
        assert_eq!(t.generators(), p.generators());
        assert_eq!(t.relators(), p.relators());
        let j = Presentation::from_json(&p.to_json()).unwrap();
        assert_eq!(j.relators(), p.relators());
        assert!(j.is_sound());
    }
}

fn in_gamma(b: u64) -> impl Strategy<Value = UniModularMatrix> {
    // products of unipotents with entries in Z[1/b] and diagonal units
    let primes = prime_divisors(b);
    let den = move |k: u32| -> i64 { (b as i64).pow(k) };
    (
        prop::collection::vec((-40i64..40, 0u32..3, prop::bool::ANY), 1..6),
        prop::sample::select(primes),
        -2i32..3,
    )
        .prop_map(move |(steps, p, k)| {
            let mut m = UniModularMatrix::identity();
            for (n, e, upper) in steps {
                let x = LocalizedScalar::new(n, den(e)).unwrap();
                let u = if upper {
                    UniModularMatrix::upper_unipotent(x)
                } else {
                    UniModularMatrix::lower_unipotent(x)
                };
                m = &m * &u;
            }
            let unit = LocalizedScalar::new(p as i64, 1).unwrap().pow_i32(k);
            &m * &UniModularMatrix::diagonal(&unit).unwrap()
        })
}

trait PowI32 {
    fn pow_i32(&self, k: i32) -> Self;
}

impl PowI32 for LocalizedScalar {
    fn pow_i32(&self, k: i32) -> Self {
        let mut acc = LocalizedScalar::one();
        let base = if k < 0 {
            self.recip().unwrap()
        } else {
            self.clone()
        };
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elements_of_gamma_are_expressed(
        (b, g) in prop::sample::select(vec![2u64, 6, 9, 35]).prop_flat_map(|b| (Just(b), in_gamma(b)))
    ) {
        let p = build_presentation(b).unwrap();
        let w = express_in_gamma(&g, &p.primes()).unwrap();
        prop_assert_eq!(p.assignment().evaluate(&w).unwrap(), g);
    }

    #[test]
    fn unipotent_words_evaluate(b in prop::sample::select(vec![2u64, 4, 6, 12, 35]), n in -500i64..500, e in 0u32..4) {
        let q = LocalizedScalar::new(n, (b as i64).pow(e)).unwrap();
        let p = build_presentation(b).unwrap();
        let w: GroupWord = upper_unipotent_word(&q, &p.primes()).unwrap();
        prop_assert_eq!(p.assignment().evaluate(&w).unwrap(), UniModularMatrix::upper_unipotent(q));
    }
}
