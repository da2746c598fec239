//! Exact elements of the localization `Z[1/b]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ExactError;

/// A rational number kept as a fully reduced fraction with positive denominator.
///
/// Membership in a particular localization `Z[1/b]` is not a property of the
/// value alone; it is checked against a base with [`LocalizedScalar::in_localization`]
/// or enforced at construction with [`LocalizedScalar::with_base`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LocalizedScalar {
    num: BigInt,
    den: BigInt,
}

impl LocalizedScalar {
    /// Builds `num/den` in lowest terms.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, ExactError> {
        let (num, den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(Self::normalized(num, den))
    }

    /// Builds `num/den` and checks that every prime of the reduced denominator divides `base`.
    pub fn with_base(
        num: impl Into<BigInt>,
        den: impl Into<BigInt>,
        base: &BigInt,
    ) -> Result<Self, ExactError> {
        let value = Self::new(num, den)?;
        if value.in_localization(base) {
            Ok(value)
        } else {
            Err(ExactError::NotInLocalization {
                value: value.to_string(),
                base: base.clone(),
            })
        }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self {
            num: n.into(),
            den: BigInt::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    fn normalized(mut num: BigInt, mut den: BigInt) -> Self {
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if !g.is_one() && !g.is_zero() {
            num /= &g;
            den /= &g;
        }
        if num.is_zero() {
            den = BigInt::one();
        }
        Self { num, den }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    /// The value as an integer, when the denominator is 1.
    pub fn to_integer(&self) -> Option<&BigInt> {
        self.is_integer().then_some(&self.num)
    }

    /// True iff every prime dividing the denominator divides `base`.
    pub fn in_localization(&self, base: &BigInt) -> bool {
        let mut rest = self.den.clone();
        let base = base.abs();
        if base.is_zero() {
            return rest.is_one();
        }
        loop {
            if rest.is_one() {
                return true;
            }
            let g = rest.gcd(&base);
            if g.is_one() {
                return false;
            }
            while (&rest % &g).is_zero() {
                rest /= &g;
            }
        }
    }

    /// Multiplicative inverse, absent for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::normalized(self.den.clone(), self.num.clone()))
        }
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|r| self * &r)
    }

    /// Reduction modulo `n`, defined when the denominator is a unit mod `n`.
    pub fn residue(&self, n: u64) -> Option<u64> {
        let modulus = BigInt::from(n);
        let num = self.num.mod_floor(&modulus);
        let den = self.den.mod_floor(&modulus);
        let inv = mod_inverse(&den, &modulus)?;
        let r = (num * inv).mod_floor(&modulus);
        Some(r.try_into().expect("residue below a u64 modulus"))
    }
}

/// Inverse of `x` modulo `m` by the extended Euclidean algorithm.
pub(crate) fn mod_inverse(x: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let egcd = x.mod_floor(m).extended_gcd(m);
    if egcd.gcd.is_one() {
        Some(egcd.x.mod_floor(m))
    } else {
        None
    }
}

impl From<i64> for LocalizedScalar {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for LocalizedScalar {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl Add for &LocalizedScalar {
    type Output = LocalizedScalar;
    fn add(self, rhs: &LocalizedScalar) -> LocalizedScalar {
        if self.den == rhs.den {
            return LocalizedScalar::normalized(&self.num + &rhs.num, self.den.clone());
        }
        LocalizedScalar::normalized(
            &self.num * &rhs.den + &rhs.num * &self.den,
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &LocalizedScalar {
    type Output = LocalizedScalar;
    fn sub(self, rhs: &LocalizedScalar) -> LocalizedScalar {
        self + &(-rhs)
    }
}

impl Mul for &LocalizedScalar {
    type Output = LocalizedScalar;
    fn mul(self, rhs: &LocalizedScalar) -> LocalizedScalar {
        if self.is_zero() || rhs.is_zero() {
            return LocalizedScalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return LocalizedScalar::from_integer(&self.num * &rhs.num);
        }
        // Cross-cancel first so the product is already reduced.
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        LocalizedScalar {
            num: (&self.num / &g1) * (&rhs.num / &g2),
            den: (&self.den / &g2) * (&rhs.den / &g1),
        }
    }
}

impl Neg for &LocalizedScalar {
    type Output = LocalizedScalar;
    fn neg(self) -> LocalizedScalar {
        LocalizedScalar {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for LocalizedScalar {
            type Output = LocalizedScalar;
            fn $method(self, rhs: LocalizedScalar) -> LocalizedScalar {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LocalizedScalar {
    type Output = LocalizedScalar;
    fn neg(self) -> LocalizedScalar {
        -&self
    }
}

impl fmt::Display for LocalizedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for LocalizedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_integer(text: &str) -> Result<BigInt, ExactError> {
    let t = text.trim();
    let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return Err(ExactError::Parse(format!("not an integer: {text:?}")));
    }
    t.parse::<BigInt>()
        .map_err(|e| ExactError::Parse(format!("{text:?}: {e}")))
}

/// Accepts `p` or `p/q` with integer `p`, `q`; decimals are rejected.
impl FromStr for LocalizedScalar {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('/') {
            Some((p, q)) => Self::new(parse_integer(p)?, parse_integer(q)?),
            None => Ok(Self::from_integer(parse_integer(s)?)),
        }
    }
}
