//! Exact 2x2 rational matrices of determinant 1.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;

use super::{ExactError, LocalizedScalar};

/// A 2x2 matrix `[[e11, e12], [e21, e22]]` over the rationals with determinant exactly 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniModularMatrix {
    e: [LocalizedScalar; 4],
}

impl UniModularMatrix {
    /// Builds a matrix, rejecting anything whose determinant is not exactly 1.
    pub fn new(
        e11: LocalizedScalar,
        e12: LocalizedScalar,
        e21: LocalizedScalar,
        e22: LocalizedScalar,
    ) -> Result<Self, ExactError> {
        let m = Self {
            e: [e11, e12, e21, e22],
        };
        let det = m.determinant();
        if det.is_one() {
            Ok(m)
        } else {
            Err(ExactError::DeterminantNotOne(format!(
                "{m} has determinant {det}"
            )))
        }
    }

    /// Integer matrix shorthand.
    pub fn from_integers(e11: i64, e12: i64, e21: i64, e22: i64) -> Result<Self, ExactError> {
        Self::new(e11.into(), e12.into(), e21.into(), e22.into())
    }

    fn from_entries_unchecked(e: [LocalizedScalar; 4]) -> Self {
        Self { e }
    }

    pub fn identity() -> Self {
        Self::from_entries_unchecked([
            LocalizedScalar::one(),
            LocalizedScalar::zero(),
            LocalizedScalar::zero(),
            LocalizedScalar::one(),
        ])
    }

    pub fn minus_identity() -> Self {
        Self::from_entries_unchecked([
            -LocalizedScalar::one(),
            LocalizedScalar::zero(),
            LocalizedScalar::zero(),
            -LocalizedScalar::one(),
        ])
    }

    /// `A(x) = [[1, x], [0, 1]]`.
    pub fn upper_unipotent(x: LocalizedScalar) -> Self {
        Self::from_entries_unchecked([
            LocalizedScalar::one(),
            x,
            LocalizedScalar::zero(),
            LocalizedScalar::one(),
        ])
    }

    /// `B(x) = [[1, 0], [x, 1]]`.
    pub fn lower_unipotent(x: LocalizedScalar) -> Self {
        Self::from_entries_unchecked([
            LocalizedScalar::one(),
            LocalizedScalar::zero(),
            x,
            LocalizedScalar::one(),
        ])
    }

    /// `diag(u, 1/u)` for non-zero `u`.
    pub fn diagonal(u: &LocalizedScalar) -> Option<Self> {
        let inv = u.recip()?;
        Some(Self::from_entries_unchecked([
            u.clone(),
            LocalizedScalar::zero(),
            LocalizedScalar::zero(),
            inv,
        ]))
    }

    pub fn e11(&self) -> &LocalizedScalar {
        &self.e[0]
    }
    pub fn e12(&self) -> &LocalizedScalar {
        &self.e[1]
    }
    pub fn e21(&self) -> &LocalizedScalar {
        &self.e[2]
    }
    pub fn e22(&self) -> &LocalizedScalar {
        &self.e[3]
    }

    pub fn entries(&self) -> &[LocalizedScalar; 4] {
        &self.e
    }

    pub fn determinant(&self) -> LocalizedScalar {
        &(&self.e[0] * &self.e[3]) - &(&self.e[1] * &self.e[2])
    }

    pub fn trace(&self) -> LocalizedScalar {
        &self.e[0] + &self.e[3]
    }

    pub fn is_identity(&self) -> bool {
        self.e[1].is_zero() && self.e[2].is_zero() && self.e[0].is_one() && self.e[3].is_one()
    }

    pub fn is_minus_identity(&self) -> bool {
        *self == Self::minus_identity()
    }

    pub fn is_integral(&self) -> bool {
        self.e.iter().all(LocalizedScalar::is_integer)
    }

    /// True iff every entry lies in `Z[1/base]`.
    pub fn in_localization(&self, base: &BigInt) -> bool {
        self.e.iter().all(|x| x.in_localization(base))
    }

    /// Least common multiple of the entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.e
            .iter()
            .fold(BigInt::from(1), |acc, x| acc.lcm(x.denominator()))
    }

    pub fn inverse(&self) -> Self {
        Self::from_entries_unchecked([
            self.e[3].clone(),
            -&self.e[1],
            -&self.e[2],
            self.e[0].clone(),
        ])
    }

    pub fn negate(&self) -> Self {
        Self::from_entries_unchecked([-&self.e[0], -&self.e[1], -&self.e[2], -&self.e[3]])
    }

    /// Integer power; negative exponents invert. Unipotent matrices take the shortcut
    /// `A(x)^k = A(kx)`.
    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return Self::identity();
        }
        let diag_one = self.e[0].is_one() && self.e[3].is_one();
        if diag_one && self.e[2].is_zero() {
            return Self::upper_unipotent(&self.e[1] * &LocalizedScalar::from(k));
        }
        if diag_one && self.e[1].is_zero() {
            return Self::lower_unipotent(&self.e[2] * &LocalizedScalar::from(k));
        }
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut n = k.unsigned_abs();
        let mut acc = Self::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Order of the matrix if it is finite.
    ///
    /// Over the rationals a determinant-1 matrix has finite order iff it is `±1` or its
    /// trace is `-1`, `0` or `1`; the possible orders all divide 12.
    pub fn finite_order(&self) -> Option<u32> {
        let trace = self.trace();
        let small_trace = trace.is_integer()
            && [-1i64, 0, 1]
                .iter()
                .any(|t| trace == LocalizedScalar::from(*t));
        if !(small_trace || self.is_identity() || self.is_minus_identity()) {
            return None;
        }
        let mut power = self.clone();
        for order in 1..=12u32 {
            if power.is_identity() {
                return Some(order);
            }
            power = &power * self;
        }
        None
    }
}

impl Mul for &UniModularMatrix {
    type Output = UniModularMatrix;

    fn mul(self, rhs: &UniModularMatrix) -> UniModularMatrix {
        let [a, b, c, d] = &self.e;
        let [p, q, r, s] = &rhs.e;
        UniModularMatrix::from_entries_unchecked([
            &(a * p) + &(b * r),
            &(a * q) + &(b * s),
            &(c * p) + &(d * r),
            &(c * q) + &(d * s),
        ])
    }
}

impl Mul for UniModularMatrix {
    type Output = UniModularMatrix;
    fn mul(self, rhs: UniModularMatrix) -> UniModularMatrix {
        &self * &rhs
    }
}

impl fmt::Display for UniModularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.e;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

impl fmt::Debug for UniModularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `[[p/q,r/s],[t/u,v/w]]`; whitespace is ignored and integer entries may omit `/1`.
impl FromStr for UniModularMatrix {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || ExactError::Parse(format!("expected [[a,b],[c,d]], got {s:?}"));
        let inner = compact
            .strip_prefix("[[")
            .and_then(|t| t.strip_suffix("]]"))
            .ok_or_else(bad)?;
        let (row1, row2) = inner.split_once("],[").ok_or_else(bad)?;
        let mut entries = Vec::with_capacity(4);
        for row in [row1, row2] {
            let cells: Vec<&str> = row.split(',').collect();
            if cells.len() != 2 || cells.iter().any(|c| c.contains(['[', ']'])) {
                return Err(bad());
            }
            for cell in cells {
                entries.push(cell.parse::<LocalizedScalar>()?);
            }
        }
        let [a, b, c, d]: [LocalizedScalar; 4] = entries.try_into().map_err(|_| bad())?;
        Self::new(a, b, c, d)
    }
}
