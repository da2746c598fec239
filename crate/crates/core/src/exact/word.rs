//! Freely reduced words over named generators, and their evaluation as matrices.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExactError, UniModularMatrix};

/// Name of an abstract generator: an ASCII letter followed by letters, digits or `_`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Result<Self, ExactError> {
        let mut chars = name.chars();
        let valid = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if valid {
            Ok(Self(Arc::from(name)))
        } else {
            Err(ExactError::Parse(format!(
                "invalid generator name {name:?}"
            )))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Panics on an invalid name; meant for literals.
impl From<&str> for Symbol {
    fn from(name: &str) -> Self {
        Self::new(name).expect("valid generator name")
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A freely reduced word `g1^e1 g2^e2 ...`: adjacent syllables have distinct symbols
/// and no exponent is zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupWord {
    syllables: Vec<(Symbol, i64)>,
}

impl GroupWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(sym: impl Into<Symbol>) -> Self {
        Self::power(sym, 1)
    }

    pub fn power(sym: impl Into<Symbol>, exponent: i64) -> Self {
        let mut w = Self::identity();
        w.push(sym.into(), exponent);
        w
    }

    /// Freely reduces an arbitrary syllable sequence.
    pub fn from_syllables<I, S>(syllables: I) -> Self
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<Symbol>,
    {
        let mut w = Self::identity();
        for (s, e) in syllables {
            w.push(s.into(), e);
        }
        w
    }

    /// Appends one syllable, reducing against the current tail.
    fn push(&mut self, sym: Symbol, exponent: i64) {
        if exponent == 0 {
            return;
        }
        match self.syllables.last_mut() {
            Some((last, e)) if *last == sym => {
                *e += exponent;
                if *e == 0 {
                    self.syllables.pop();
                }
            }
            _ => self.syllables.push((sym, exponent)),
        }
    }

    pub fn syllables(&self) -> &[(Symbol, i64)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllable_count(&self) -> usize {
        self.syllables.len()
    }

    /// Number of letters, i.e. the sum of absolute exponents.
    pub fn length(&self) -> u64 {
        self.syllables.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    /// Product `self * other`, reducing only at the seam.
    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut w = self.clone();
        for (s, e) in &other.syllables {
            w.push(s.clone(), *e);
        }
        w
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|(s, e)| (s.clone(), -e))
                .collect(),
        }
    }

    pub fn pow(&self, k: i64) -> GroupWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = GroupWord::identity();
        for _ in 0..k.unsigned_abs() {
            acc = acc.concat(&base);
        }
        acc
    }

    /// `g^-1 * self * g`.
    pub fn conjugate(&self, g: &GroupWord) -> GroupWord {
        g.inverse().concat(self).concat(g)
    }

    /// Removes matching first/last syllables, producing a cyclic conjugate.
    pub fn cyclically_reduced(&self) -> GroupWord {
        let mut syl = self.syllables.clone();
        loop {
            if syl.len() < 2 {
                break;
            }
            let n = syl.len();
            if syl[0].0 != syl[n - 1].0 {
                break;
            }
            let merged = syl[0].1 + syl[n - 1].1;
            let sym = syl[0].0.clone();
            syl.pop();
            syl[0] = (sym, merged);
            if merged == 0 {
                syl.remove(0);
            }
        }
        GroupWord::from_syllables(syl)
    }

    /// Replaces every symbol by a word; symbols missing from `map` are an error.
    pub fn substitute(&self, map: &HashMap<Symbol, GroupWord>) -> Result<GroupWord, ExactError> {
        let mut out = GroupWord::identity();
        for (s, e) in &self.syllables {
            let image = map
                .get(s)
                .ok_or_else(|| ExactError::UnknownSymbol(s.to_string()))?;
            out = out.concat(&image.pow(*e));
        }
        Ok(out)
    }

    /// Distinct symbols in order of first appearance.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut seen: Vec<Symbol> = Vec::new();
        for (s, _) in &self.syllables {
            if !seen.contains(s) {
                seen.push(s.clone());
            }
        }
        seen
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        for (i, (s, e)) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupWord({self})")
    }
}

/// Whitespace-separated syllables `g` or `g^e`; `1` (or an empty string) is the identity.
/// The parse result is freely reduced.
impl FromStr for GroupWord {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut w = GroupWord::identity();
        for token in s.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (name, exponent) = match token.split_once('^') {
                Some((name, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| ExactError::Parse(format!("bad exponent in {token:?}")))?;
                    (name, e)
                }
                None => (token, 1),
            };
            w.push(Symbol::new(name)?, exponent);
        }
        Ok(w)
    }
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Matrices assigned to generator symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorAssignment {
    mapping: BTreeMap<Symbol, UniModularMatrix>,
}

impl GeneratorAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, sym: impl Into<Symbol>, m: UniModularMatrix) {
        self.mapping.insert(sym.into(), m);
    }

    pub fn get(&self, sym: &Symbol) -> Option<&UniModularMatrix> {
        self.mapping.get(sym)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.mapping.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &UniModularMatrix)> {
        self.mapping.iter()
    }

    /// Left-to-right product of the assigned matrices raised to the syllable exponents.
    pub fn evaluate(&self, w: &GroupWord) -> Result<UniModularMatrix, ExactError> {
        let mut acc = UniModularMatrix::identity();
        for (s, e) in w.syllables() {
            let m = self
                .mapping
                .get(s)
                .ok_or_else(|| ExactError::UnknownSymbol(s.to_string()))?;
            acc = &acc * &m.pow(*e);
        }
        Ok(acc)
    }
}

/// Evaluates `w` under `asg`.
pub fn evaluate_word(
    w: &GroupWord,
    asg: &GeneratorAssignment,
) -> Result<UniModularMatrix, ExactError> {
    asg.evaluate(w)
}
