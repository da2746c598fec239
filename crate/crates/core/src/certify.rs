//! End-to-end certification of `G(a/b)`: generator words, coset enumeration, and
//! cross-checks against the congruence data.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_prime, primes_coprime_to};
use crate::congruence::{
    closure_generators, member_of_closure, quotient_image, sl2_order, surjects_mod_p,
    CongruenceError, DEFAULT_CLOSURE_CAP,
};
use crate::coset::{
    todd_coxeter, CosetError, CosetTable, EnumerationLimits, EnumerationOutcome, OverflowReason,
};
use crate::exact::{
    check_parameters, make_moebius_generators, ExactError, GeneratorAssignment, GroupWord,
    LocalizedScalar, Symbol, UniModularMatrix,
};
use crate::modular::S;
use crate::presentation::{
    build_presentation, express_in_gamma, lower_unipotent_word, upper_unipotent_word, y_symbol,
    Presentation, PresentationError,
};
use crate::relator::{find_relator, validate_relator, RelatorError, A, B, DEFAULT_RELATOR_BOUND};

/// Letter bound for the breadth-first generator word search.
pub const DEFAULT_WORD_SEARCH_LEN: usize = 10;
pub const TORSION_SAMPLES: usize = 100;
const TORSION_WORD_LEN: usize = 24;
/// Nodes stored per side of the bidirectional search before it gives up.
const SEARCH_NODE_CAP: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("no word of length <= {0} found for the generators")]
    NotFound(usize),
    #[error(
        "coset table index {found} differs from the expected index {expected} for {spec}; \
         generator words {word_a} | {word_b}"
    )]
    IndexMismatch {
        spec: MoebiusSpec,
        found: usize,
        expected: BigUint,
        word_a: GroupWord,
        word_b: GroupWord,
    },
    #[error("{0} is not an element of SL(2, Z[1/{1}])")]
    NotInGamma(String, u64),
    #[error("certificate: {0}")]
    Format(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error(transparent)]
    Relator(#[from] RelatorError),
}

/// The parameter `m = a/b` with `a >= 1`, `b > 1`, `gcd(a, b) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct MoebiusSpec {
    a: u64,
    b: u64,
}

#[derive(Deserialize)]
struct RawSpec {
    a: u64,
    b: u64,
}

impl TryFrom<RawSpec> for MoebiusSpec {
    type Error = ExactError;

    fn try_from(raw: RawSpec) -> Result<Self, ExactError> {
        MoebiusSpec::new(raw.a, raw.b)
    }
}

impl MoebiusSpec {
    pub fn new(a: u64, b: u64) -> Result<Self, ExactError> {
        check_parameters(a, b)?;
        Ok(Self { a, b })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn m(&self) -> LocalizedScalar {
        LocalizedScalar::new(self.a, self.b).expect("b > 1")
    }

    /// `(A(a/b), B(a/b))`.
    pub fn generators(&self) -> (UniModularMatrix, UniModularMatrix) {
        make_moebius_generators(self.a, self.b).expect("validated parameters")
    }

    pub fn level(&self) -> u64 {
        self.a * self.a
    }

    /// `a |SL(2, Z_a)|`.
    pub fn expected_index(&self) -> BigUint {
        BigUint::from(self.a) * sl2_order(self.a)
    }
}

impl fmt::Display for MoebiusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.b)
    }
}

impl FromStr for MoebiusSpec {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, ExactError> {
        let bad = || ExactError::Parse(format!("expected a/b with positive integers, got {s:?}"));
        let (a, b) = s.trim().split_once('/').ok_or_else(bad)?;
        let a = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim().parse().map_err(|_| bad())?;
        Self::new(a, b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Arithmetic,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Arithmetic => "Arithmetic",
            Self::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, passed: bool) -> Self {
        Self {
            name: name.to_string(),
            passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorWords {
    #[serde(rename = "A")]
    pub a: GroupWord,
    #[serde(rename = "B")]
    pub b: GroupWord,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resources {
    pub peak_cosets: usize,
    pub total_defined: u64,
    pub coincidences: u64,
    pub enumeration_ms: u64,
    pub wall_time_ms: u64,
}

/// Outcome of [`certify`]. Arithmetic means `[Gamma : G] = a |SL(2, Z_a)|`, hence `G`
/// is not free; Inconclusive makes no claim about `G` at all.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    spec: MoebiusSpec,
    status: Status,
    #[serde(with = "big_opt")]
    index: Option<BigUint>,
    level: u64,
    #[serde(with = "big")]
    expected_index: BigUint,
    words: GeneratorWords,
    witness: Option<GroupWord>,
    checks: Vec<Check>,
    resources: Resources,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

impl Certificate {
    pub fn spec(&self) -> MoebiusSpec {
        self.spec
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn index(&self) -> Option<&BigUint> {
        self.index.as_ref()
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn expected_index(&self) -> &BigUint {
        &self.expected_index
    }

    pub fn words(&self) -> &GeneratorWords {
        &self.words
    }

    pub fn witness(&self) -> Option<&GroupWord> {
        self.witness.as_ref()
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    /// Why the certificate is inconclusive.
    pub fn reason(&self) -> Option<&str> {
        self.reason.as_deref()
    }

    pub fn is_arithmetic(&self) -> bool {
        self.status == Status::Arithmetic
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, CertifyError> {
        serde_json::from_value(value.clone()).map_err(|e| CertifyError::Format(e.to_string()))
    }

    /// Multi-line human summary.
    pub fn summary(&self) -> String {
        let mut out = format!("spec: {}\nstatus: {}\n", self.spec, self.status);
        match &self.index {
            Some(i) => out.push_str(&format!("index: {i}\n")),
            None => out.push_str("index: unknown\n"),
        }
        out.push_str(&format!(
            "level: {}\nexpected_index: {}\nword A: {}\nword B: {}\n",
            self.level, self.expected_index, self.words.a, self.words.b
        ));
        if let Some(w) = &self.witness {
            out.push_str(&format!("witness: {w}\n"));
        }
        for c in &self.checks {
            out.push_str(&format!(
                "check {}: {}\n",
                c.name,
                if c.passed { "pass" } else { "FAIL" }
            ));
        }
        out.push_str(&format!(
            "peak cosets: {}\nwall time: {} ms\n",
            self.resources.peak_cosets, self.resources.wall_time_ms
        ));
        if let Some(r) = &self.reason {
            out.push_str(&format!("reason: {r}\n"));
        }
        if self.status == Status::Inconclusive {
            out.push_str("no claim is made about freeness or thinness of G\n");
        }
        out
    }
}

/// Integers are written as JSON numbers when they fit in `u64`, else as decimal strings.
mod big {
    use num_bigint::BigUint;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        match u64::try_from(v) {
            Ok(n) => s.serialize_u64(n),
            Err(_) => s.serialize_str(&v.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(super) enum Raw {
        Num(u64),
        Str(String),
    }

    impl Raw {
        pub(super) fn into_big<E: de::Error>(self) -> Result<BigUint, E> {
            match self {
                Raw::Num(n) => Ok(BigUint::from(n)),
                Raw::Str(s) => s.parse().map_err(E::custom),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        Raw::deserialize(d)?.into_big()
    }
}

mod big_opt {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::big::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        Option::<super::big::Raw>::deserialize(d)?
            .map(|r| r.into_big())
            .transpose()
    }
}

/// Options beyond the enumeration limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifyOptions {
    pub witness: bool,
    pub relator_bound: u64,
    pub word_search_len: usize,
    pub closure_cap: usize,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            witness: false,
            relator_bound: DEFAULT_RELATOR_BOUND,
            word_search_len: DEFAULT_WORD_SEARCH_LEN,
            closure_cap: DEFAULT_CLOSURE_CAP,
            seed: 0x6d6f_6562,
        }
    }
}

/// Words over `presentation`'s generators for `A(a/b)` and `B(a/b)`.
///
/// For prime `b = p` these are `y_p^-a` and `s y_p^a s^-1`; otherwise a bidirectional
/// breadth-first search over words of at most `max_len` letters.
pub fn express_generators(
    spec: MoebiusSpec,
    presentation: &Presentation,
    max_len: usize,
) -> Result<(GroupWord, GroupWord), CertifyError> {
    let (ma, mb) = spec.generators();
    let asg = presentation.assignment();
    if is_prime(spec.b) && presentation.generators().contains(&y_symbol(spec.b)) {
        let a = spec.a as i64;
        let y = y_symbol(spec.b);
        let wa = GroupWord::power(y.clone(), -a);
        let wb = GroupWord::from_syllables([(Symbol::from(S), 1), (y, a), (Symbol::from(S), -1)]);
        if asg.evaluate(&wa)? == ma && asg.evaluate(&wb)? == mb {
            return Ok((wa, wb));
        }
    }
    let wa = word_search(asg, presentation.generators(), &ma, max_len)
        .ok_or(CertifyError::NotFound(max_len))?;
    let wb = word_search(asg, presentation.generators(), &mb, max_len)
        .ok_or(CertifyError::NotFound(max_len))?;
    Ok((wa, wb))
}

/// Meet-in-the-middle search for a word of at most `max_len` letters with value `target`.
fn word_search(
    asg: &GeneratorAssignment,
    generators: &[Symbol],
    target: &UniModularMatrix,
    max_len: usize,
) -> Option<GroupWord> {
    let mut letters: Vec<(GroupWord, UniModularMatrix)> = Vec::new();
    for g in generators {
        let m = asg.get(g)?.clone();
        letters.push((GroupWord::power(g.clone(), -1), m.inverse()));
        letters.push((GroupWord::generator(g.clone()), m));
    }
    // forward: value -> word; backward: target * w^-1 -> w
    let mut fwd: HashMap<UniModularMatrix, GroupWord> = HashMap::new();
    let mut bwd: HashMap<UniModularMatrix, GroupWord> = HashMap::new();
    fwd.insert(UniModularMatrix::identity(), GroupWord::identity());
    bwd.insert(target.clone(), GroupWord::identity());
    if target.is_identity() {
        return Some(GroupWord::identity());
    }
    let mut fwd_frontier = vec![(UniModularMatrix::identity(), GroupWord::identity())];
    let mut bwd_frontier = vec![(target.clone(), GroupWord::identity())];
    let (mut fwd_len, mut bwd_len) = (0usize, 0usize);
    while fwd_len + bwd_len < max_len {
        let forward = fwd_frontier.len() <= bwd_frontier.len();
        let (frontier, mine, other) = if forward {
            (&mut fwd_frontier, &mut fwd, &bwd)
        } else {
            (&mut bwd_frontier, &mut bwd, &fwd)
        };
        let mut next = Vec::new();
        for (m, w) in frontier.iter() {
            for (lw, lm) in &letters {
                let (nm, nw) = if forward {
                    (m * lm, w.concat(lw))
                } else {
                    // extend the suffix on the left: target = value(u) * value(lw w)
                    (m * &lm.inverse(), lw.concat(w))
                };
                if nw.length() as usize != w.length() as usize + 1 || mine.contains_key(&nm) {
                    continue;
                }
                if let Some(ow) = other.get(&nm) {
                    let word = if forward {
                        nw.concat(ow)
                    } else {
                        ow.concat(&nw)
                    };
                    if asg.evaluate(&word).ok()? == *target {
                        return Some(word);
                    }
                }
                mine.insert(nm.clone(), nw.clone());
                next.push((nm, nw));
            }
        }
        if next.is_empty() || mine.len() > SEARCH_NODE_CAP {
            return None;
        }
        *frontier = next;
        if forward {
            fwd_len += 1;
        } else {
            bwd_len += 1;
        }
    }
    None
}

/// Words for `A(a/b)`, `B(a/b)`: [`express_generators`] when it succeeds, otherwise the
/// constructive partial-fraction words.
pub fn generator_words(
    spec: MoebiusSpec,
    presentation: &Presentation,
    max_len: usize,
) -> Result<(GroupWord, GroupWord), CertifyError> {
    match express_generators(spec, presentation, max_len) {
        Ok(w) => Ok(w),
        Err(CertifyError::NotFound(_)) => {
            let primes = presentation.primes();
            Ok((
                upper_unipotent_word(&spec.m(), &primes)?,
                lower_unipotent_word(&spec.m(), &primes)?,
            ))
        }
        Err(e) => Err(e),
    }
}

/// [`certify_with`] using default options (no relator witness).
pub fn certify(spec: MoebiusSpec, limits: &EnumerationLimits) -> Result<Certificate, CertifyError> {
    certify_with(spec, limits, &CertifyOptions::default()).map(|(c, _)| c)
}

/// Runs the full pipeline and also returns the completed coset table, if any.
///
/// A completed table whose index differs from `a |SL(2, Z_a)|` is an error, never a
/// certificate.
pub fn certify_with(
    spec: MoebiusSpec,
    limits: &EnumerationLimits,
    options: &CertifyOptions,
) -> Result<(Certificate, Option<CosetTable>), CertifyError> {
    let start = Instant::now();
    let presentation = build_presentation(spec.b)?;
    let (wa, wb) = generator_words(spec, &presentation, options.word_search_len)?;
    let outcome = todd_coxeter(&presentation, &[wa.clone(), wb.clone()], limits)?;
    let stats = *outcome.stats();
    let mut cert = Certificate {
        spec,
        status: Status::Inconclusive,
        index: None,
        level: spec.level(),
        expected_index: spec.expected_index(),
        words: GeneratorWords { a: wa, b: wb },
        witness: None,
        checks: Vec::new(),
        resources: Resources {
            peak_cosets: stats.peak,
            total_defined: stats.total_defined,
            coincidences: stats.coincidences,
            enumeration_ms: millis(stats.elapsed),
            wall_time_ms: 0,
        },
        reason: None,
    };
    let table = match outcome {
        EnumerationOutcome::Overflow(reason, _) => {
            cert.reason = Some(match reason {
                OverflowReason::CosetLimit => {
                    format!("coset limit of {} reached", limits.max_cosets)
                }
                OverflowReason::TimeLimit => format!(
                    "time limit of {} s reached",
                    limits.time_limit.map_or(0, |d| d.as_secs())
                ),
            });
            cert.resources.wall_time_ms = millis(start.elapsed());
            return Ok((cert, None));
        }
        EnumerationOutcome::Complete(table, _) => table,
    };
    if BigUint::from(table.index()) != cert.expected_index {
        return Err(CertifyError::IndexMismatch {
            spec,
            found: table.index(),
            expected: cert.expected_index.clone(),
            word_a: cert.words.a.clone(),
            word_b: cert.words.b.clone(),
        });
    }
    cert.index = Some(BigUint::from(table.index()));
    cert.checks.push(Check::new("index_formula", true));

    let closure = closure_checks(spec, options.closure_cap)?;
    cert.checks.extend(closure);

    let primes = presentation.primes();
    let level_words = closure_generators(spec.a, spec.b)?[2..]
        .iter()
        .map(|g| express_in_gamma(g, &primes))
        .collect::<Result<Vec<_>, _>>()?;
    let mut in_table = true;
    for w in &level_words {
        in_table &= table.word_stabilizes_one(w)?;
    }
    cert.checks
        .push(Check::new("level_generators_in_table", in_table));

    let mut surjective = true;
    for p in primes_coprime_to(spec.a * spec.b, 3) {
        surjective &= surjects_mod_p(spec.a, spec.b, p)?;
    }
    cert.checks.push(Check::new("surjects_mod_p", surjective));

    if spec.a > 1 {
        let sample = torsion_sample(spec, TORSION_SAMPLES, options.seed);
        cert.checks.push(Check::new("torsion_free", sample));
    }

    if options.witness {
        if let Some(r) = find_relator(
            &presentation,
            &cert.words.a,
            &cert.words.b,
            &table,
            options.relator_bound,
        )? {
            let (ma, mb) = spec.generators();
            cert.checks.push(Check::new(
                "witness_relator",
                validate_relator(&r, &ma, &mb)?,
            ));
            cert.witness = Some(r);
        }
    }

    if cert.checks.iter().all(|c| c.passed) {
        cert.status = Status::Arithmetic;
    } else {
        let failed: Vec<&str> = cert
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        cert.reason = Some(format!("failed checks: {}", failed.join(", ")));
    }
    cert.resources.wall_time_ms = millis(start.elapsed());
    Ok((cert, Some(table)))
}

fn millis(d: Duration) -> u64 {
    u64::try_from(d.as_millis()).unwrap_or(u64::MAX)
}

/// `closure_order` (`a^2`) and `closure_structure` (abelian of exponent `a`) for the image
/// of `G` modulo `a^2`.
fn closure_checks(spec: MoebiusSpec, cap: usize) -> Result<Vec<Check>, CertifyError> {
    Ok(match quotient_image(spec.a, spec.b, cap)? {
        None => vec![
            Check::new("closure_order", true),
            Check::new("closure_structure", true),
        ],
        Some(img) => vec![
            Check::new("closure_order", img.order() == spec.level()),
            Check::new(
                "closure_structure",
                img.is_abelian() && img.exponent() == spec.a,
            ),
        ],
    })
}

/// A reduced word of `len` letters in `A`, `B`.
pub fn random_word(rng: &mut impl Rng, len: usize) -> GroupWord {
    let letters = [(A, 1i64), (A, -1), (B, 1), (B, -1)];
    let mut syllables: Vec<(&str, i64)> = Vec::with_capacity(len);
    while syllables.len() < len {
        let l = letters[rng.gen_range(0..4)];
        if syllables
            .last()
            .is_some_and(|&(s, e)| s == l.0 && e == -l.1)
        {
            continue;
        }
        syllables.push(l);
    }
    GroupWord::from_syllables(syllables.into_iter().map(|(s, e)| (Symbol::from(s), e)))
}

/// True when none of `samples` random words in `A`, `B` evaluates to a nontrivial element
/// of finite order.
pub fn torsion_sample(spec: MoebiusSpec, samples: usize, seed: u64) -> bool {
    let (ma, mb) = spec.generators();
    let mut asg = GeneratorAssignment::new();
    asg.insert(A, ma);
    asg.insert(B, mb);
    let mut rng = StdRng::seed_from_u64(seed ^ (spec.a << 32) ^ spec.b);
    (0..samples).all(|_| {
        let len = rng.gen_range(1..=TORSION_WORD_LEN);
        let g = asg
            .evaluate(&random_word(&mut rng, len))
            .expect("A and B are assigned");
        g.is_identity() || g.finite_order().is_none()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    InG,
    NotInG,
    NotInClosure,
    Unknown,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::InG => "InG",
            Self::NotInG => "NotInG",
            Self::NotInClosure => "NotInClosure",
            Self::Unknown => "Unknown",
        })
    }
}

/// Decides `g in G(a/b)` as far as `cert` allows.
///
/// Failing the closure test modulo `a^2` gives NotInClosure. Otherwise an Arithmetic
/// certificate decides by tracing a word for `g` through the coset table (rebuilt from
/// the certificate's words when `table` is `None`); an Inconclusive one gives Unknown.
pub fn membership_report(
    spec: MoebiusSpec,
    g: &UniModularMatrix,
    cert: &Certificate,
    table: Option<&CosetTable>,
) -> Result<Membership, CertifyError> {
    if cert.spec != spec {
        return Err(CertifyError::Format(format!(
            "certificate is for {}, not {spec}",
            cert.spec
        )));
    }
    let base = num_bigint::BigInt::from(spec.b);
    if !g.in_localization(&base) {
        return Err(CertifyError::NotInGamma(g.to_string(), spec.b));
    }
    if !member_of_closure(g, spec.a, spec.b, DEFAULT_CLOSURE_CAP)? {
        return Ok(Membership::NotInClosure);
    }
    if cert.status != Status::Arithmetic {
        return Ok(Membership::Unknown);
    }
    let presentation = build_presentation(spec.b)?;
    let rebuilt;
    let table = match table {
        Some(t) => t,
        None => {
            let outcome = todd_coxeter(
                &presentation,
                &[cert.words.a.clone(), cert.words.b.clone()],
                &EnumerationLimits::default(),
            )?;
            match outcome.into_table() {
                Some(t) => {
                    rebuilt = t;
                    &rebuilt
                }
                None => return Ok(Membership::Unknown),
            }
        }
    };
    let word = presentation.express(g)?;
    Ok(if table.word_stabilizes_one(&word)? {
        Membership::InG
    } else {
        Membership::NotInG
    })
}

/// Certifies `a/b` for each `a` in `a_values`, in order, in parallel. Per-entry errors
/// (including `gcd(a, b) > 1`) are returned in place.
pub fn table_sweep(
    b: u64,
    a_values: &[u64],
    limits: &EnumerationLimits,
    options: &CertifyOptions,
) -> Vec<(u64, Result<Certificate, CertifyError>)> {
    a_values
        .par_iter()
        .map(|&a| {
            let cert = MoebiusSpec::new(a, b)
                .map_err(CertifyError::from)
                .and_then(|spec| certify_with(spec, limits, options).map(|(c, _)| c));
            (a, cert)
        })
        .collect()
}

/// Result of re-checking a certificate offline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub status: Status,
    pub failures: Vec<String>,
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-checks a certificate without enumerating: level and index formula, generator words
/// by exact evaluation, the closure modulo `a^2`, the witness relator, and consistency of
/// the status with the recorded checks.
pub fn verify(cert: &Certificate) -> Result<Verification, CertifyError> {
    let spec = MoebiusSpec::new(cert.spec.a, cert.spec.b)?;
    let mut failures = Vec::new();
    let mut expect = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };
    expect(cert.level == spec.level(), "level is not a^2");
    expect(
        cert.expected_index == spec.expected_index(),
        "expected_index is not a |SL(2, Z_a)|",
    );

    let presentation = build_presentation(spec.b)?;
    let (ma, mb) = spec.generators();
    let asg = presentation.assignment();
    let known = |w: &GroupWord| {
        w.symbols()
            .iter()
            .all(|s| presentation.generators().contains(s))
    };
    expect(
        known(&cert.words.a) && asg.evaluate(&cert.words.a).ok() == Some(ma.clone()),
        "word for A does not evaluate to A(a/b)",
    );
    expect(
        known(&cert.words.b) && asg.evaluate(&cert.words.b).ok() == Some(mb.clone()),
        "word for B does not evaluate to B(a/b)",
    );
    if let Some(w) = &cert.witness {
        expect(
            w.symbols()
                .iter()
                .all(|s| s.as_str() == A || s.as_str() == B)
                && validate_relator(w, &ma, &mb).unwrap_or(false),
            "witness is not a nontrivial relator of A(a/b), B(a/b)",
        );
    }
    let closure = closure_checks(spec, DEFAULT_CLOSURE_CAP)?;
    expect(
        closure.iter().all(|c| c.passed),
        "closure modulo a^2 is not C_a x C_a",
    );

    match cert.status {
        Status::Arithmetic => {
            expect(
                cert.index.as_ref() == Some(&cert.expected_index),
                "index differs from expected_index",
            );
            expect(
                cert.checks.iter().all(|c| c.passed),
                "a recorded check failed",
            );
            for name in [
                "index_formula",
                "closure_order",
                "level_generators_in_table",
            ] {
                expect(
                    cert.checks.iter().any(|c| c.name == name),
                    &format!("check {name} is missing"),
                );
            }
            if spec.a > 1 {
                expect(
                    torsion_sample(spec, TORSION_SAMPLES, CertifyOptions::default().seed),
                    "sampled torsion element",
                );
            }
        }
        Status::Inconclusive => {
            let complete_and_passing = cert.index.is_some()
                && !cert.checks.is_empty()
                && cert.checks.iter().all(|c| c.passed);
            expect(
                !complete_and_passing,
                "Inconclusive certificate records a complete passing run",
            );
        }
    }
    Ok(Verification {
        status: cert.status,
        failures,
    })
}
