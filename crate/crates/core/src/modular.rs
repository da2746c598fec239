//! Words in `s = [[0,1],[-1,0]]` and `t = [[1,0],[1,1]]` for integer matrices of
//! determinant 1.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{GeneratorAssignment, GroupWord, Symbol, UniModularMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModularError {
    #[error("matrix {0} has non-integer entries")]
    NotIntegral(String),
}

pub const S: &str = "s";
pub const T: &str = "t";

/// The matrices `s` and `t`.
pub fn st_matrices() -> (UniModularMatrix, UniModularMatrix) {
    (
        UniModularMatrix::from_integers(0, 1, -1, 0).expect("det 1"),
        UniModularMatrix::from_integers(1, 0, 1, 1).expect("det 1"),
    )
}

/// Assignment `s -> s`, `t -> t`.
pub fn st_assignment() -> GeneratorAssignment {
    let (s, t) = st_matrices();
    let mut asg = GeneratorAssignment::new();
    asg.insert(S, s);
    asg.insert(T, t);
    asg
}

fn integer_entries(m: &UniModularMatrix) -> Result<[BigInt; 4], ModularError> {
    let mut out: [BigInt; 4] = Default::default();
    for (slot, x) in out.iter_mut().zip(m.entries()) {
        *slot = x
            .to_integer()
            .ok_or_else(|| ModularError::NotIntegral(m.to_string()))?
            .clone();
    }
    Ok(out)
}

/// Quotient `q` minimizing `|c - q*a|`; ties go to the smaller `|q|`.
fn nearest_quotient(c: &BigInt, a: &BigInt) -> BigInt {
    let q0 = c.div_floor(a);
    let q1: BigInt = &q0 + 1;
    let r0: BigInt = (c - &q0 * a).abs();
    let r1: BigInt = (c - &q1 * a).abs();
    if r1 < r0 || (r1 == r0 && q1.abs() < q0.abs()) {
        q1
    } else {
        q0
    }
}

fn small(x: &BigInt) -> i64 {
    i64::try_from(x).expect("exponent fits in i64")
}

/// Writes an integer unimodular matrix as a word in `s`, `t`.
///
/// Euclidean reduction of the first column: left multiplication by `t^k` replaces `c` by
/// `c + k*a`, left multiplication by `s` maps the column `(a, c)` to `(c, -a)`. The loop
/// ends at `+-[[1, x], [0, 1]] = +-s t^-x s^-1`; a trailing `s^2` carries the sign.
pub fn decompose_st(m: &UniModularMatrix) -> Result<GroupWord, ModularError> {
    let [mut a, mut b, mut c, mut d] = integer_entries(m)?;
    // Left multipliers in the order they were applied.
    let mut applied: Vec<(&str, i64)> = Vec::new();
    while !c.is_zero() {
        if a.is_zero() {
            // s [[0, b], [c, d]] = [[c, d], [0, -b]]
            (a, b, c, d) = (c, d, -a, -b);
            applied.push((S, 1));
            continue;
        }
        let k = -nearest_quotient(&c, &a);
        if !k.is_zero() {
            c += &k * &a;
            d += &k * &b;
            applied.push((T, small(&k)));
        }
        if c.is_zero() {
            break;
        }
        (a, b, c, d) = (c, d, -a, -b);
        applied.push((S, 1));
    }
    debug_assert!(a.abs().is_one() && a == d);
    let sign_negative = a.is_negative();
    let shift = &a * &b;

    let mut syllables: Vec<(Symbol, i64)> = applied
        .iter()
        .map(|(sym, e)| (Symbol::from(*sym), -e))
        .collect();
    syllables.push((S.into(), 1));
    syllables.push((T.into(), -small(&shift)));
    syllables.push((S.into(), -1));
    if sign_negative {
        syllables.push((S.into(), 2));
    }
    Ok(word_length_reduce(&GroupWord::from_syllables(syllables)))
}

/// Free reduction plus `s^4 = 1` and centrality of `s^2`; the value is unchanged.
///
/// Every `s`-exponent is reduced mod 4 to one of `s`, `s^-1`, `s^2`; each `s^2` is
/// pulled out and their parity re-attached as a single trailing `s^2`.
pub fn word_length_reduce(w: &GroupWord) -> GroupWord {
    let s = Symbol::from(S);
    let mut current = w.clone();
    let mut central = 0u32;
    loop {
        let mut changed = false;
        let mut kept: Vec<(Symbol, i64)> = Vec::with_capacity(current.syllable_count());
        for (sym, e) in current.syllables() {
            if *sym != s {
                kept.push((sym.clone(), *e));
                continue;
            }
            match e.rem_euclid(4) {
                0 => {
                    changed = true;
                }
                1 => {
                    changed |= *e != 1;
                    kept.push((sym.clone(), 1));
                }
                2 => {
                    central += 1;
                    changed = true;
                }
                _ => {
                    changed |= *e != -1;
                    kept.push((sym.clone(), -1));
                }
            }
        }
        current = GroupWord::from_syllables(kept);
        if !changed {
            break;
        }
    }
    if central % 2 == 1 {
        current = current.concat(&GroupWord::power(S, 2));
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &UniModularMatrix) -> GroupWord {
        let w = decompose_st(m).unwrap();
        assert_eq!(&st_assignment().evaluate(&w).unwrap(), m, "word {w}");
        w
    }

    #[test]
    fn identity_is_empty() {
        assert!(check(&UniModularMatrix::identity()).is_identity());
    }

    #[test]
    fn minus_identity_is_s_squared() {
        assert_eq!(
            check(&UniModularMatrix::minus_identity()).to_string(),
            "s^2"
        );
    }

    #[test]
    fn worked_examples() {
        let m = UniModularMatrix::from_integers(2, 1, -5, -2).unwrap();
        let w = check(&m);
        let known: GroupWord = "t^-2 s t^2".parse().unwrap();
        assert_eq!(st_assignment().evaluate(&known).unwrap(), m, "{w}");

        let y5 = UniModularMatrix::from_integers(1, -1, 0, 1).unwrap();
        check(&y5);
        let tst_inv: GroupWord = "t s t".parse::<GroupWord>().unwrap().inverse();
        assert_eq!(st_assignment().evaluate(&tst_inv).unwrap(), y5);

        check(&UniModularMatrix::from_integers(1, 0, 5, 1).unwrap());
        check(&UniModularMatrix::from_integers(0, -1, 1, 0).unwrap());
        check(&UniModularMatrix::from_integers(-3, 7, 2, -5).unwrap());
        check(&UniModularMatrix::from_integers(1000, 999, 1001, 1000).unwrap());
    }

    #[test]
    fn rejects_rational_entries() {
        let m: UniModularMatrix = "[[1,1/2],[0,1]]".parse().unwrap();
        assert!(matches!(
            decompose_st(&m),
            Err(ModularError::NotIntegral(_))
        ));
    }

    #[test]
    fn length_reduction_rules() {
        let reduce = |text: &str| word_length_reduce(&text.parse().unwrap());
        assert!(reduce("s^4").is_identity());
        assert!(reduce("s^2 t s^2 t^-1").is_identity());
        assert!(reduce("t^3 t^-3").is_identity());
        assert_eq!(reduce("s^3"), "s^-1".parse::<GroupWord>().unwrap());
        assert_eq!(reduce("s^2 t").to_string(), "t s^2");
        assert_eq!(reduce("s t s^2 t").to_string(), "s t^2 s^2");
    }
}
