//! Congruence images in `SL(2, Z_n)`: reduction maps, group orders, subgroup
//! closures, and the level / index / quotient data of `G(a/b)`.
//!
//! For `G = G(a/b)` the arithmetic closure `cl(G) = G * Gamma_{a^2}` has level `a^2`,
//! index `a * |SL(2, Z_a)|` in `SL(2, Z[1/b])`, and `cl(G) / Gamma_{a^2}` is
//! `C_a x C_a`. Everything here is computable at the level of finite quotients.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::arith::{factorize, is_prime, lcm, prime_divisors};
use crate::exact::{
    check_parameters, make_moebius_generators, ExactError, LocalizedScalar, UniModularMatrix,
};

/// Default element cap for materialized closures.
pub const DEFAULT_CLOSURE_CAP: usize = 2_000_000;

/// Largest supported modulus; keeps `a*b + c*d` inside `u64`.
const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CongruenceError {
    #[error("modulus {0} out of range (need 2 <= n < 2^31)")]
    BadModulus(u64),
    #[error("entry {entry} has a denominator that is not invertible mod {modulus}")]
    NonInvertibleDenominator { entry: String, modulus: u64 },
    #[error("residues do not have determinant 1 mod {0}")]
    DeterminantNotOne(u64),
    #[error("generators have mixed moduli")]
    MixedModuli,
    #[error("closure exceeded the cap of {0} elements")]
    Overflow(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {p} divides b = {b}")]
    PrimeDividesBase { p: u64, b: u64 },
    #[error("{0} is not an element of SL(2, Z[1/{1}])")]
    NotInGamma(String, u64),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A matrix over `Z_n` with determinant `1 mod n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueMatrix {
    modulus: u64,
    e: [u64; 4],
}

impl ResidueMatrix {
    pub fn new(modulus: u64, entries: [i64; 4]) -> Result<Self, CongruenceError> {
        check_modulus(modulus)?;
        let n = modulus as i64;
        let e = entries.map(|x| x.rem_euclid(n) as u64);
        let m = Self { modulus, e };
        if m.det() == 1 % modulus {
            Ok(m)
        } else {
            Err(CongruenceError::DeterminantNotOne(modulus))
        }
    }

    pub fn identity(modulus: u64) -> Result<Self, CongruenceError> {
        Self::new(modulus, [1, 0, 0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn entries(&self) -> [u64; 4] {
        self.e
    }

    fn det(&self) -> u64 {
        let n = self.modulus;
        let [a, b, c, d] = self.e;
        (a * d % n + n - b * c % n) % n
    }

    pub fn is_identity(&self) -> bool {
        let one = 1 % self.modulus;
        self.e == [one, 0, 0, one]
    }

    pub fn mul(&self, other: &ResidueMatrix) -> ResidueMatrix {
        debug_assert_eq!(self.modulus, other.modulus);
        let n = self.modulus;
        let [a, b, c, d] = self.e;
        let [p, q, r, s] = other.e;
        ResidueMatrix {
            modulus: n,
            e: [
                (a * p + b * r) % n,
                (a * q + b * s) % n,
                (c * p + d * r) % n,
                (c * q + d * s) % n,
            ],
        }
    }

    pub fn inverse(&self) -> ResidueMatrix {
        let n = self.modulus;
        let [a, b, c, d] = self.e;
        ResidueMatrix {
            modulus: n,
            e: [d, (n - b) % n, (n - c) % n, a],
        }
    }

    /// Multiplicative order (always finite).
    pub fn order(&self) -> u64 {
        let mut k = 1;
        let mut p = *self;
        while !p.is_identity() {
            p = p.mul(self);
            k += 1;
        }
        k
    }

    fn packed_key(&self) -> u64 {
        let [a, b, c, d] = self.e;
        (a << 48) | (b << 32) | (c << 16) | d
    }
}

impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]] mod {}", self.modulus)
    }
}

impl fmt::Debug for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn check_modulus(n: u64) -> Result<(), CongruenceError> {
    if (2..MAX_MODULUS).contains(&n) {
        Ok(())
    } else {
        Err(CongruenceError::BadModulus(n))
    }
}

/// The congruence homomorphism `phi_n` applied to one matrix.
pub fn reduce_mod(m: &UniModularMatrix, n: u64) -> Result<ResidueMatrix, CongruenceError> {
    check_modulus(n)?;
    let mut e = [0u64; 4];
    for (slot, x) in e.iter_mut().zip(m.entries()) {
        *slot = x
            .residue(n)
            .ok_or_else(|| CongruenceError::NonInvertibleDenominator {
                entry: x.to_string(),
                modulus: n,
            })?;
    }
    Ok(ResidueMatrix { modulus: n, e })
}

/// `|SL(2, Z_n)| = n^3 * prod_{p | n} (1 - p^-2)`.
pub fn sl2_order(n: u64) -> BigUint {
    let mut order = BigUint::from(1u32);
    for (p, e) in factorize(n) {
        let p = BigUint::from(p);
        order *= p.pow(3 * e - 2) * (&p * &p - 1u32);
    }
    order
}

/// Membership store keyed compactly; moduli below `2^16` pack into one `u64`.
enum ElementSet {
    Packed(FxHashSet<u64>),
    Wide(FxHashSet<[u64; 4]>),
}

impl ElementSet {
    fn new(modulus: u64) -> Self {
        if modulus < (1 << 16) {
            Self::Packed(FxHashSet::default())
        } else {
            Self::Wide(FxHashSet::default())
        }
    }

    fn insert(&mut self, m: &ResidueMatrix) -> bool {
        match self {
            Self::Packed(s) => s.insert(m.packed_key()),
            Self::Wide(s) => s.insert(m.e),
        }
    }

    fn contains(&self, m: &ResidueMatrix) -> bool {
        match self {
            Self::Packed(s) => s.contains(&m.packed_key()),
            Self::Wide(s) => s.contains(&m.e),
        }
    }
}

/// A finite subgroup of `SL(2, Z_n)` given by generators and fully materialized.
pub struct SubgroupImage {
    modulus: u64,
    order: u64,
    elements: Vec<ResidueMatrix>,
    index: ElementSet,
    is_abelian: bool,
    exponent: u64,
}

impl SubgroupImage {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_abelian(&self) -> bool {
        self.is_abelian
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn elements(&self) -> &[ResidueMatrix] {
        &self.elements
    }

    pub fn contains(&self, m: &ResidueMatrix) -> bool {
        m.modulus == self.modulus && self.index.contains(m)
    }

    /// `|SL(2, Z_n) : image|`.
    pub fn index_in_sl2(&self) -> BigUint {
        sl2_order(self.modulus) / BigUint::from(self.order)
    }
}

impl fmt::Debug for SubgroupImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubgroupImage")
            .field("modulus", &self.modulus)
            .field("order", &self.order)
            .field("is_abelian", &self.is_abelian)
            .field("exponent", &self.exponent)
            .finish()
    }
}

/// Breadth-first closure of `gens` under right multiplication in `SL(2, Z_n)`.
pub fn subgroup_closure(
    gens: &[ResidueMatrix],
    n: u64,
    cap: usize,
) -> Result<SubgroupImage, CongruenceError> {
    check_modulus(n)?;
    if gens.iter().any(|g| g.modulus != n) {
        return Err(CongruenceError::MixedModuli);
    }
    let identity = ResidueMatrix::identity(n)?;
    let mut index = ElementSet::new(n);
    let mut elements = vec![identity];
    index.insert(&identity);
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g);
            if index.insert(&y) {
                if elements.len() >= cap {
                    return Err(CongruenceError::Overflow(cap));
                }
                elements.push(y);
                queue.push_back(y);
            }
        }
    }
    let is_abelian = gens
        .iter()
        .enumerate()
        .all(|(i, g)| gens[i + 1..].iter().all(|h| g.mul(h) == h.mul(g)));
    let exponent = if is_abelian {
        gens.iter().map(ResidueMatrix::order).fold(1, lcm)
    } else {
        elements.iter().map(ResidueMatrix::order).fold(1, lcm)
    };
    Ok(SubgroupImage {
        modulus: n,
        order: elements.len() as u64,
        elements,
        index,
        is_abelian,
        exponent,
    })
}

/// `phi_n(A(a/b))`, `phi_n(B(a/b))`.
pub fn generator_images(a: u64, b: u64, n: u64) -> Result<[ResidueMatrix; 2], CongruenceError> {
    let (ma, mb) = make_moebius_generators(a, b)?;
    Ok([reduce_mod(&ma, n)?, reduce_mod(&mb, n)?])
}

/// Whether `G(a/b)` maps onto `SL(2, p)`; by the prime-set law this holds iff `p` does not divide `a`.
pub fn surjects_mod_p(a: u64, b: u64, p: u64) -> Result<bool, CongruenceError> {
    if !is_prime(p) {
        return Err(CongruenceError::NotPrime(p));
    }
    if b.is_multiple_of(p) {
        return Err(CongruenceError::PrimeDividesBase { p, b });
    }
    let full = sl2_order(p);
    let cap = usize::try_from(&full)
        .unwrap_or(usize::MAX)
        .saturating_add(1);
    let image = subgroup_closure(&generator_images(a, b, p)?, p, cap)?;
    Ok(BigUint::from(image.order()) == full)
}

/// Level, expected index and prime data for `G(a/b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelData {
    pub a: u64,
    pub level: u64,
    pub expected_index: BigUint,
    /// Primes modulo which `G` fails to surject; equals the prime divisors of `a`.
    pub prime_set: Vec<u64>,
    /// Primes dividing `b`.
    pub s_primes: Vec<u64>,
}

pub fn level_data(a: u64, b: u64) -> Result<LevelData, CongruenceError> {
    check_parameters(a, b)?;
    Ok(LevelData {
        a,
        level: a * a,
        expected_index: BigUint::from(a) * sl2_order(a),
        prime_set: prime_divisors(a),
        s_primes: prime_divisors(b),
    })
}

/// Abelian invariants of `cl(G) / Gamma_{a^2}`: `(a, a)`, or empty for `a = 1`.
pub fn closure_quotient_structure(a: u64) -> Vec<u64> {
    if a <= 1 {
        Vec::new()
    } else {
        vec![a, a]
    }
}

/// The image `phi_{a^2}(G(a/b))`; `None` when `a = 1` (the image is trivial).
pub fn quotient_image(
    a: u64,
    b: u64,
    cap: usize,
) -> Result<Option<SubgroupImage>, CongruenceError> {
    check_parameters(a, b)?;
    if a == 1 {
        return Ok(None);
    }
    let n = a * a;
    subgroup_closure(&generator_images(a, b, n)?, n, cap).map(Some)
}

/// `x m x` for the reflection `x = [[-1, 1], [0, 1]]` (an involution of determinant -1).
pub fn conjugate_by_reflection(m: &UniModularMatrix) -> UniModularMatrix {
    let [p, q, r, s] = m.entries();
    UniModularMatrix::new(p - r, &(&(r - p) - q) + s, -r, r + s)
        .expect("conjugation preserves the determinant")
}

/// `[A(m), B(m), A(am), B(am), B(am)^x]` with `m = a/b`: the first two generate `G`,
/// the last three generate `Gamma_{a^2}`.
pub fn closure_generators(a: u64, b: u64) -> Result<Vec<UniModularMatrix>, CongruenceError> {
    check_parameters(a, b)?;
    let m = LocalizedScalar::new(a, b)?;
    let am = &m * &LocalizedScalar::from(a as i64);
    let b_am = UniModularMatrix::lower_unipotent(am.clone());
    let b_am_x = conjugate_by_reflection(&b_am);
    Ok(vec![
        UniModularMatrix::upper_unipotent(m.clone()),
        UniModularMatrix::lower_unipotent(m),
        UniModularMatrix::upper_unipotent(am),
        b_am,
        b_am_x,
    ])
}

/// Tests `phi_{a^2}(g) in phi_{a^2}(G)`. Necessary for `g in G`; sufficient once `G` is
/// known to be S-arithmetic.
pub fn member_of_closure(
    g: &UniModularMatrix,
    a: u64,
    b: u64,
    cap: usize,
) -> Result<bool, CongruenceError> {
    check_parameters(a, b)?;
    if !g.in_localization(&BigInt::from(b)) {
        return Err(CongruenceError::NotInGamma(g.to_string(), b));
    }
    match quotient_image(a, b, cap)? {
        None => Ok(true),
        Some(image) => Ok(image.contains(&reduce_mod(g, a * a)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> LocalizedScalar {
        LocalizedScalar::new(n, d).unwrap()
    }

    #[test]
    fn reduction_examples() {
        let id = reduce_mod(&UniModularMatrix::identity(), 9).unwrap();
        assert!(id.is_identity());
        let a = UniModularMatrix::upper_unipotent(q(1, 2));
        assert_eq!(reduce_mod(&a, 5).unwrap().entries(), [1, 3, 0, 1]);
        assert!(matches!(
            reduce_mod(&a, 4),
            Err(CongruenceError::NonInvertibleDenominator { .. })
        ));
        assert!(reduce_mod(&a, 1).is_err());
    }

    #[test]
    fn residue_matrix_checks_determinant() {
        assert!(ResidueMatrix::new(5, [1, 1, 1, 1]).is_err());
        assert!(ResidueMatrix::new(5, [2, 0, 0, 3]).is_ok());
    }

    #[test]
    fn sl2_orders() {
        assert_eq!(sl2_order(1), BigUint::from(1u32));
        assert_eq!(sl2_order(3), BigUint::from(24u32));
        assert_eq!(sl2_order(5), BigUint::from(120u32));
        assert_eq!(sl2_order(9), BigUint::from(648u32));
    }

    #[test]
    fn closure_examples() {
        let id = ResidueMatrix::identity(7).unwrap();
        assert_eq!(subgroup_closure(&[id], 7, 10).unwrap().order(), 1);

        let img = subgroup_closure(&generator_images(3, 2, 9).unwrap(), 9, 1000).unwrap();
        assert_eq!(
            (img.order(), img.is_abelian(), img.exponent()),
            (9, true, 3)
        );

        let img = subgroup_closure(&generator_images(1, 2, 5).unwrap(), 5, 1000).unwrap();
        assert_eq!(img.order(), 120);
        assert!(!img.is_abelian());

        assert!(matches!(
            subgroup_closure(&generator_images(1, 2, 5).unwrap(), 5, 50),
            Err(CongruenceError::Overflow(50))
        ));
    }

    #[test]
    fn surjection_examples() {
        assert!(!surjects_mod_p(3, 2, 3).unwrap());
        assert!(surjects_mod_p(3, 2, 5).unwrap());
        assert!(matches!(
            surjects_mod_p(3, 2, 2),
            Err(CongruenceError::PrimeDividesBase { .. })
        ));
        assert!(matches!(
            surjects_mod_p(3, 2, 9),
            Err(CongruenceError::NotPrime(9))
        ));
    }

    #[test]
    fn level_examples() {
        let d = level_data(1, 2).unwrap();
        assert_eq!(
            (d.level, d.expected_index.clone()),
            (1, BigUint::from(1u32))
        );
        let d = level_data(3, 2).unwrap();
        assert_eq!(
            (d.level, d.expected_index.clone()),
            (9, BigUint::from(72u32))
        );
        assert_eq!(d.prime_set, vec![3]);
        assert_eq!(d.s_primes, vec![2]);
        let d = level_data(5, 3).unwrap();
        assert_eq!((d.level, d.expected_index), (25, BigUint::from(600u32)));
        assert!(level_data(2, 4).is_err());
    }

    #[test]
    fn quotient_structure() {
        assert!(closure_quotient_structure(1).is_empty());
        assert_eq!(closure_quotient_structure(3), vec![3, 3]);
        let img = quotient_image(3, 2, 1000).unwrap().unwrap();
        assert_eq!(img.order(), 9);
        let img = quotient_image(4, 3, 1000).unwrap().unwrap();
        assert_eq!(
            (img.order(), img.exponent(), img.is_abelian()),
            (16, 4, true)
        );
        assert!(quotient_image(1, 5, 10).unwrap().is_none());
    }

    #[test]
    fn closure_generator_list() {
        let gens = closure_generators(1, 2).unwrap();
        assert_eq!(gens[0], UniModularMatrix::upper_unipotent(q(1, 2)));
        assert_eq!(gens[1], UniModularMatrix::lower_unipotent(q(1, 2)));

        let gens = closure_generators(3, 2).unwrap();
        assert_eq!(gens[2], UniModularMatrix::upper_unipotent(q(9, 2)));
        assert_eq!(gens[3], UniModularMatrix::lower_unipotent(q(9, 2)));
        // x B(y) x = [[1-y, y], [-y, 1+y]]
        let expected = UniModularMatrix::new(q(-7, 2), q(9, 2), q(-9, 2), q(11, 2)).unwrap();
        assert_eq!(gens[4], expected);

        let gens = closure_generators(2, 3).unwrap();
        assert_eq!(gens[2].to_string(), "[[1,4/3],[0,1]]");
    }

    #[test]
    fn membership_examples() {
        assert!(member_of_closure(&UniModularMatrix::identity(), 3, 2, 1000).unwrap());
        let s = UniModularMatrix::from_integers(0, 1, -1, 0).unwrap();
        assert!(!member_of_closure(&s, 3, 2, 1000).unwrap());
        assert!(member_of_closure(&s, 1, 2, 1000).unwrap());
        let outside = UniModularMatrix::upper_unipotent(q(1, 5));
        assert!(matches!(
            member_of_closure(&outside, 3, 2, 1000),
            Err(CongruenceError::NotInGamma(..))
        ));
    }
}
