//! Finite presentations of `SL(2, Z[1/b])` built from Ihara's amalgam
//! `SL(2, Z[1/p]) = SL(2, Z) *_{Gamma_0(p)} SL(2, Z)`, one piece per prime of `b`.
//!
//! The first copy of `SL(2, Z)` is generated by `s`, `t`; the copy attached at `p` by
//! `x_p = [[0, 1/p], [-p, 0]]` and `y_p = [[1, -1/p], [0, 1]]`, which are the
//! `diag(1, p)`-conjugates of `[[0, 1], [-1, 0]]` and `[[1, -1], [0, 1]]`. Each piece
//! contributes the two defining relators of its copy plus one matching relator
//! `w(x_p, y_p) * w'(s, t)^-1` per Schreier generator `w` of `Gamma_0(p)`. When `b` has
//! several primes, each pair of pieces is joined by three bridge relators.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_prime, prime_divisors};
use crate::exact::{
    mod_inverse, ExactError, GeneratorAssignment, GroupWord, LocalizedScalar, Symbol,
    UniModularMatrix,
};
use crate::modular::{decompose_st, st_matrices, word_length_reduce, ModularError, S, T};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("b must exceed 1, got {0}")]
    BadBase(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("presentation text: {0}")]
    Format(String),
    #[error("{0} is not an element of this SL(2, Z[1/b])")]
    NotInGamma(String),
    #[error("exponent too large for a word syllable: {0}")]
    ExponentOverflow(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Modular(#[from] ModularError),
}

pub fn x_symbol(p: u64) -> Symbol {
    Symbol::from(format!("x{p}").as_str())
}

pub fn y_symbol(p: u64) -> Symbol {
    Symbol::from(format!("y{p}").as_str())
}

/// `(x_p, y_p)`.
pub fn amalgam_matrices(p: u64) -> (UniModularMatrix, UniModularMatrix) {
    let p = p as i64;
    let x = UniModularMatrix::new(
        LocalizedScalar::zero(),
        LocalizedScalar::new(1, p).expect("p > 0"),
        LocalizedScalar::from(-p),
        LocalizedScalar::zero(),
    )
    .expect("det 1");
    let y = UniModularMatrix::upper_unipotent(LocalizedScalar::new(-1, p).expect("p > 0"));
    (x, y)
}

/// The prime (if any) encoded by a generator name `x<p>` / `y<p>`.
fn amalgam_prime(sym: &Symbol) -> Option<(char, u64)> {
    let name = sym.as_str();
    let kind = name.chars().next()?;
    if kind != 'x' && kind != 'y' {
        return None;
    }
    let p: u64 = name[1..].parse().ok()?;
    (is_prime(p) && name[1..] == p.to_string()).then_some((kind, p))
}

/// Matrices for every generator name the builder uses; unknown names get none.
fn standard_assignment(generators: &[Symbol]) -> GeneratorAssignment {
    let (s, t) = st_matrices();
    let mut asg = GeneratorAssignment::new();
    for g in generators {
        match g.as_str() {
            "s" => asg.insert(g.clone(), s.clone()),
            "t" => asg.insert(g.clone(), t.clone()),
            _ => {
                if let Some((kind, p)) = amalgam_prime(g) {
                    let (x, y) = amalgam_matrices(p);
                    asg.insert(g.clone(), if kind == 'x' { x } else { y });
                }
            }
        }
    }
    asg
}

/// One amalgam piece: the generators `x_p`, `y_p` and the matching pairs `(w, w')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamPiece {
    pub prime: u64,
    pub x: Symbol,
    pub y: Symbol,
    pub matching: Vec<(GroupWord, GroupWord)>,
}

/// Generators, relators, and the matrices the relators are checked against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<Symbol>,
    relators: Vec<GroupWord>,
    assignment: GeneratorAssignment,
    pieces: Vec<AmalgamPiece>,
}

impl Presentation {
    /// An abstract presentation. Generator names `s`, `t`, `x<p>`, `y<p>` receive their
    /// standard matrices; others are left unassigned.
    pub fn new(generators: Vec<Symbol>, relators: Vec<GroupWord>) -> Self {
        let assignment = standard_assignment(&generators);
        Self {
            generators,
            relators,
            assignment,
            pieces: Vec::new(),
        }
    }

    pub fn generators(&self) -> &[Symbol] {
        &self.generators
    }

    pub fn relators(&self) -> &[GroupWord] {
        &self.relators
    }

    pub fn assignment(&self) -> &GeneratorAssignment {
        &self.assignment
    }

    pub fn pieces(&self) -> &[AmalgamPiece] {
        &self.pieces
    }

    /// Primes of the amalgam pieces, i.e. `pi(b)`.
    pub fn primes(&self) -> Vec<u64> {
        self.pieces.iter().map(|p| p.prime).collect()
    }

    /// Every relator evaluates to the identity under the assignment.
    pub fn is_sound(&self) -> bool {
        verify_presentation_soundness(self)
    }

    /// `gen: ...` line followed by one `rel: ...` line per relator.
    pub fn to_text(&self) -> String {
        let mut out = String::from("gen:");
        for g in &self.generators {
            write!(out, " {g}").expect("write to string");
        }
        out.push('\n');
        for r in &self.relators {
            writeln!(out, "rel: {r}").expect("write to string");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, PresentationError> {
        let mut generators: Option<Vec<Symbol>> = None;
        let mut relators = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| PresentationError::Format(format!("line {}: {msg}", lineno + 1));
            if let Some(rest) = line.strip_prefix("gen:") {
                if generators.is_some() {
                    return Err(err("duplicate gen line"));
                }
                let gens = rest
                    .split_whitespace()
                    .map(Symbol::new)
                    .collect::<Result<Vec<_>, _>>()?;
                generators = Some(gens);
            } else if let Some(rest) = line.strip_prefix("rel:") {
                let gens = generators.as_ref().ok_or_else(|| err("rel before gen"))?;
                let word: GroupWord = rest.parse()?;
                if let Some(bad) = word.symbols().into_iter().find(|s| !gens.contains(s)) {
                    return Err(err(&format!("unknown generator {bad}")));
                }
                relators.push(word);
            } else {
                return Err(err("expected `gen:` or `rel:`"));
            }
        }
        let generators =
            generators.ok_or_else(|| PresentationError::Format("missing gen line".into()))?;
        let mut p = Self::new(generators, relators);
        p.pieces = recover_pieces(&p);
        Ok(p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PresentationJson {
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
            relators: self.relators.clone(),
        })
        .expect("presentation serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, PresentationError> {
        let raw: PresentationJson = serde_json::from_value(value.clone())
            .map_err(|e| PresentationError::Format(e.to_string()))?;
        let mut text = String::from("gen:");
        for g in &raw.generators {
            text.push(' ');
            text.push_str(g);
        }
        text.push('\n');
        for r in &raw.relators {
            writeln!(text, "rel: {r}").expect("write to string");
        }
        Self::from_text(&text)
    }

    /// A word in this presentation's generators whose value is `g`.
    pub fn express(&self, g: &UniModularMatrix) -> Result<GroupWord, PresentationError> {
        express_in_gamma(g, &self.primes())
    }
}

#[derive(Serialize, Deserialize)]
struct PresentationJson {
    generators: Vec<String>,
    relators: Vec<GroupWord>,
}

/// Rebuilds piece metadata (without matching pairs) from generator names.
fn recover_pieces(p: &Presentation) -> Vec<AmalgamPiece> {
    p.generators
        .iter()
        .filter_map(amalgam_prime)
        .filter(|(kind, _)| *kind == 'x')
        .map(|(_, prime)| AmalgamPiece {
            prime,
            x: x_symbol(prime),
            y: y_symbol(prime),
            matching: Vec::new(),
        })
        .collect()
}

/// True iff every relator evaluates to `1_2`; a relator with an unassigned symbol fails.
pub fn verify_presentation_soundness(p: &Presentation) -> bool {
    p.relators.iter().all(|r| {
        p.assignment
            .evaluate(r)
            .map(|m| m.is_identity())
            .unwrap_or(false)
    })
}

/// Points of the projective line over `F_p` under the right action on row vectors.
/// `(1 : v)` is point `v`, `(0 : 1)` is point `p`.
fn projective_index(u: u64, v: u64, p: u64) -> usize {
    if u.is_multiple_of(p) {
        p as usize
    } else {
        let inv = mod_inverse(&BigInt::from(u), &BigInt::from(p))
            .and_then(|i| i.to_u64())
            .expect("u is a unit mod p");
        (v * inv % p) as usize
    }
}

fn projective_point(index: usize, p: u64) -> (u64, u64) {
    if index as u64 == p {
        (0, 1)
    } else {
        (1, index as u64)
    }
}

/// Schreier generators of the stabilizer of `<(1, 0)>` in `SL(2, Z)` acting on the
/// projective line mod `p`, as words in `x_p`, `y_p`.
///
/// The action uses the integer matrices `[[0, 1], [-1, 0]]` and `[[1, -1], [0, 1]]`; a word
/// fixes `(1 : 0)` iff its upper-right entry vanishes mod `p`, which is exactly when its
/// value at `(x_p, y_p)` is integral and upper triangular mod `p`. Transversal words are
/// shortest in breadth-first order over `x, x^-1, y, y^-1`. Words that are freely trivial,
/// evaluate to `1_2`, or repeat an earlier value are dropped. Values that are merely
/// `-v` or `v^-1` for an earlier `v` are kept: the extra matching relators are redundant
/// but make coset enumeration much cheaper.
pub fn gamma0_schreier_generators(p: u64) -> Result<Vec<GroupWord>, PresentationError> {
    if !is_prime(p) {
        return Err(PresentationError::NotPrime(p));
    }
    let (xs, ys) = (x_symbol(p), y_symbol(p));
    let pm = p as i64;
    // integer images mod p, as (a, b, c, d)
    let action = |m: [i64; 4], point: usize| -> usize {
        let (u, v) = projective_point(point, p);
        let (u, v) = (u as i64, v as i64);
        let nu = (u * m[0] + v * m[2]).rem_euclid(pm) as u64;
        let nv = (u * m[1] + v * m[3]).rem_euclid(pm) as u64;
        projective_index(nu, nv, p)
    };
    let letters: [(Symbol, i64, [i64; 4]); 4] = [
        (xs.clone(), 1, [0, 1, -1, 0]),
        (xs.clone(), -1, [0, -1, 1, 0]),
        (ys.clone(), 1, [1, -1, 0, 1]),
        (ys.clone(), -1, [1, 1, 0, 1]),
    ];
    let npoints = p as usize + 1;
    let mut transversal: Vec<Option<GroupWord>> = vec![None; npoints];
    transversal[0] = Some(GroupWord::identity());
    let mut queue = VecDeque::from([0usize]);
    while let Some(pt) = queue.pop_front() {
        for (sym, e, m) in &letters {
            let next = action(*m, pt);
            if transversal[next].is_none() {
                let w = transversal[pt]
                    .as_ref()
                    .expect("visited")
                    .concat(&GroupWord::power(sym.clone(), *e));
                transversal[next] = Some(w);
                queue.push_back(next);
            }
        }
    }
    let transversal: Vec<GroupWord> = transversal
        .into_iter()
        .map(|w| w.expect("the projective line is a single orbit"))
        .collect();

    let (xm, ym) = amalgam_matrices(p);
    let mut asg = GeneratorAssignment::new();
    asg.insert(xs.clone(), xm);
    asg.insert(ys.clone(), ym);
    let mut candidates = Vec::new();
    for (pt, u) in transversal.iter().enumerate() {
        for (sym, _, m) in letters.iter().filter(|l| l.1 == 1) {
            let next = action(*m, pt);
            let w = u
                .concat(&GroupWord::generator(sym.clone()))
                .concat(&transversal[next].inverse());
            if !w.is_identity() {
                let value = asg.evaluate(&w)?;
                if !value.is_identity() {
                    candidates.push((w, value));
                }
            }
        }
    }
    let mut kept: Vec<UniModularMatrix> = Vec::new();
    let mut out = Vec::new();
    for (w, value) in candidates {
        if !kept.contains(&value) {
            kept.push(value);
            out.push(w);
        }
    }
    Ok(out)
}

/// The piece for prime `p`: Schreier generators paired with their `s, t` expressions.
pub fn amalgam_piece(p: u64) -> Result<AmalgamPiece, PresentationError> {
    let words = gamma0_schreier_generators(p)?;
    let (xm, ym) = amalgam_matrices(p);
    let mut asg = GeneratorAssignment::new();
    asg.insert(x_symbol(p), xm);
    asg.insert(y_symbol(p), ym);
    let matching = words
        .into_iter()
        .map(|w| {
            let value = asg.evaluate(&w)?;
            Ok((w, decompose_st(&value)?))
        })
        .collect::<Result<Vec<_>, PresentationError>>()?;
    Ok(AmalgamPiece {
        prime: p,
        x: x_symbol(p),
        y: y_symbol(p),
        matching,
    })
}

/// A presentation of `SL(2, Z[1/b])` on `2 + 2 |pi(b)|` generators.
pub fn build_presentation(b: u64) -> Result<Presentation, PresentationError> {
    if b <= 1 {
        return Err(PresentationError::BadBase(b));
    }
    let sl2z_relators = |g: &Symbol, h: &Symbol| -> Vec<GroupWord> {
        vec![
            GroupWord::power(g.clone(), 4),
            GroupWord::from_syllables([
                (g.clone(), 1),
                (h.clone(), 1),
                (g.clone(), 1),
                (h.clone(), 1),
                (g.clone(), 1),
                (h.clone(), 1),
                (g.clone(), -2),
            ]),
        ]
    };
    let (s, t) = (Symbol::from(S), Symbol::from(T));
    let mut generators = vec![s.clone(), t.clone()];
    let mut relators = sl2z_relators(&s, &t);
    let mut pieces = Vec::new();
    for p in prime_divisors(b) {
        let piece = amalgam_piece(p)?;
        generators.push(piece.x.clone());
        generators.push(piece.y.clone());
        relators.extend(sl2z_relators(&piece.x, &piece.y));
        for (w, w_st) in &piece.matching {
            relators.push(w.concat(&w_st.inverse()));
        }
        pieces.push(piece);
    }
    for (i, p) in pieces.iter().enumerate() {
        for q in &pieces[i + 1..] {
            relators.extend(bridge_relators(p.prime, q.prime));
        }
    }
    let assignment = standard_assignment(&generators);
    Ok(Presentation {
        generators,
        relators,
        assignment,
        pieces,
    })
}

/// Relators tying the pieces for `p` and `q` together: the diagonal elements `E_p`, `E_q`
/// commute, and `E_p^-1 y_q E_p = y_q^(p^2)`, `E_q^-1 y_p E_q = y_p^(q^2)`. Without them
/// the pieces only generate an amalgam over `SL(2, Z)` that maps onto the matrix group.
pub fn bridge_relators(p: u64, q: u64) -> Vec<GroupWord> {
    let (ep, eq) = (scaling_word(p), scaling_word(q));
    let commutator = ep.inverse().concat(&eq.inverse()).concat(&ep).concat(&eq);
    let normalizes = |e: &GroupWord, scale: u64, y: Symbol| {
        e.inverse()
            .concat(&GroupWord::generator(y.clone()))
            .concat(e)
            .concat(&GroupWord::power(y, -((scale * scale) as i64)))
    };
    vec![
        commutator,
        normalizes(&ep, p, y_symbol(q)),
        normalizes(&eq, q, y_symbol(p)),
    ]
}

fn to_exponent(x: &BigInt) -> Result<i64, PresentationError> {
    x.to_i64()
        .ok_or_else(|| PresentationError::ExponentOverflow(x.to_string()))
}

/// `E_p = x_p s^-1 = diag(1/p, p)`; conjugation `E_p A(q) E_p^-1 = A(q / p^2)`.
fn scaling_word(p: u64) -> GroupWord {
    GroupWord::from_syllables([(x_symbol(p), 1), (Symbol::from(S), -1)])
}

/// Word for `A(q)`, `q in Z[1/b]`: the integer part via `s t^-q s^-1`, and each partial
/// fraction `c / p^e` as `E_p^k A(c) E_p^-k` (`e = 2k`) or `E_p^k y_p^-c E_p^-k` (`e = 2k+1`).
pub fn upper_unipotent_word(
    q: &LocalizedScalar,
    primes: &[u64],
) -> Result<GroupWord, PresentationError> {
    let integer_word = |n: &BigInt| -> Result<GroupWord, PresentationError> {
        Ok(GroupWord::from_syllables([
            (Symbol::from(S), 1),
            (Symbol::from(T), -to_exponent(n)?),
            (Symbol::from(S), -1),
        ]))
    };
    let den = q.denominator().clone();
    if den.is_one() {
        return integer_word(q.numerator());
    }
    // den = prod p^e over primes of b
    let mut prime_powers: Vec<(u64, u32, BigInt)> = Vec::new();
    let mut rest = den.clone();
    for &p in primes {
        let pb = BigInt::from(p);
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e > 0 {
            prime_powers.push((p, e, pb.pow(e)));
        }
    }
    if !rest.is_one() {
        return Err(PresentationError::NotInGamma(q.to_string()));
    }
    // r/N = n0 + sum c_i / p_i^e_i, using c_i = r * (N/p_i^e_i)^-1 mod p_i^e_i
    let r = q.numerator();
    let mut remainder = LocalizedScalar::from(r.clone()) * LocalizedScalar::new(1, den.clone())?;
    let mut word = GroupWord::identity();
    for (p, e, pe) in &prime_powers {
        let cofactor = &den / pe;
        let inv = mod_inverse(&cofactor, pe).expect("coprime prime powers");
        let mut c = (r * inv).mod_floor(pe);
        if &c * 2 > *pe {
            c -= pe;
        }
        let term = LocalizedScalar::new(c.clone(), pe.clone())?;
        remainder = &remainder - &term;
        let inner = if e % 2 == 0 {
            integer_word(&c)?
        } else {
            GroupWord::power(y_symbol(*p), -to_exponent(&c)?)
        };
        let conj = scaling_word(*p).pow((e / 2) as i64);
        word = word.concat(&conj.concat(&inner).concat(&conj.inverse()));
    }
    let n0 = remainder
        .to_integer()
        .cloned()
        .expect("partial fractions leave an integer");
    if !n0.is_zero() {
        word = word.concat(&integer_word(&n0)?);
    }
    Ok(word_length_reduce(&word))
}

/// `B(q) = s A(-q) s^-1`.
pub fn lower_unipotent_word(
    q: &LocalizedScalar,
    primes: &[u64],
) -> Result<GroupWord, PresentationError> {
    let inner = upper_unipotent_word(&(-q), primes)?;
    Ok(word_length_reduce(
        &GroupWord::generator(S)
            .concat(&inner)
            .concat(&GroupWord::power(S, -1)),
    ))
}

/// Norm for the Euclidean algorithm in `Z[1/b]`: the numerator with the primes of `b`
/// removed.
fn euclid_norm(x: &LocalizedScalar, primes: &[u64]) -> BigInt {
    let mut n = x.numerator().abs();
    for &p in primes {
        let pb = BigInt::from(p);
        while !n.is_zero() && (&n % &pb).is_zero() {
            n /= &pb;
        }
    }
    n
}

/// Writes any `g in SL(2, Z[1/b])` as a word in `s, t, x_p, y_p` (`p` over `primes`).
///
/// Integer matrices go straight to the `s, t` decomposition. Otherwise the first column is
/// reduced by the Euclidean algorithm of `Z[1/b]` using left multiplication by `B(k)` and
/// `s`, leaving `diag(u, 1/u) A(x)` with `u` a unit; `diag(p^k, p^-k) = E_p^-k` and the sign
/// is `s^2`.
pub fn express_in_gamma(
    g: &UniModularMatrix,
    primes: &[u64],
) -> Result<GroupWord, PresentationError> {
    if g.is_integral() {
        return Ok(decompose_st(g)?);
    }
    let base: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
    if primes.is_empty() || !g.in_localization(&base) {
        return Err(PresentationError::NotInGamma(g.to_string()));
    }
    let [a0, b0, c0, d0] = g.entries().clone();
    let (mut a, mut b, mut c, mut d) = (a0, b0, c0, d0);
    let mut inverse_ops: Vec<GroupWord> = Vec::new();
    while !c.is_zero() {
        if a.is_zero() || euclid_norm(&a, primes) > euclid_norm(&c, primes) {
            (a, b, c, d) = (c, d, -a, -b);
            inverse_ops.push(GroupWord::power(S, -1));
            continue;
        }
        // c mod a: a = unit * n with n coprime to b, Z[1/b] / (n) = Z / n
        let n = euclid_norm(&a, primes);
        let rho = if n.is_one() {
            LocalizedScalar::zero()
        } else {
            let mut r = BigInt::from(
                c.residue(
                    n.to_u64()
                        .ok_or_else(|| PresentationError::ExponentOverflow(n.to_string()))?,
                )
                .expect("denominators are units mod n"),
            );
            if &r * 2 > n {
                r -= &n;
            }
            LocalizedScalar::from(r)
        };
        let k = (&rho - &c).checked_div(&a).expect("a is non-zero");
        // B(k) [[a, b], [c, d]] = [[a, b], [c + k a, d + k b]]
        c = &c + &(&k * &a);
        d = &d + &(&k * &b);
        inverse_ops.push(lower_unipotent_word(&(-&k), primes)?);
    }
    // [[u, b], [0, 1/u]] = diag(u, 1/u) A(b/u)
    let u = a;
    let shift = b.checked_div(&u).expect("unit");
    let mut diag_word = GroupWord::identity();
    if u.numerator().is_negative() {
        diag_word = GroupWord::power(S, 2);
    }
    for &p in primes {
        let pb = BigInt::from(p);
        let mut k: i64 = 0;
        let (mut num, mut den) = (u.numerator().abs(), u.denominator().clone());
        while (&num % &pb).is_zero() {
            num /= &pb;
            k += 1;
        }
        while (&den % &pb).is_zero() {
            den /= &pb;
            k -= 1;
        }
        if k != 0 {
            diag_word = diag_word.concat(&scaling_word(p).pow(-k));
        }
    }
    let mut word = GroupWord::identity();
    for op in &inverse_ops {
        word = word.concat(op);
    }
    word = word
        .concat(&diag_word)
        .concat(&upper_unipotent_word(&shift, primes)?);
    Ok(word_length_reduce(&word))
}

/// Counts generators of the expected shape `2 + 2|pi(b)|`.
pub fn expected_generator_count(b: u64) -> usize {
    2 + 2 * prime_divisors(b).len()
}

/// Index of each symbol in `generators`, for consumers that work with integer columns.
pub fn symbol_index(p: &Presentation) -> HashMap<Symbol, usize> {
    p.generators
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect()
}
