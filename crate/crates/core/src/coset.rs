//! Todd-Coxeter coset enumeration.
//!
//! Tables are flat `u32` arrays, one row per coset and two columns per generator
//! (`2i` for `g_i`, `2i + 1` for `g_i^-1`). During enumeration cosets are numbered from 1
//! and 0 marks an undefined entry; coincidences are handled with a union-find forest.
//! Completed tables are standardized, so two strategies that finish on the same input
//! produce identical tables.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::exact::{GroupWord, Symbol};
use crate::presentation::Presentation;

pub const DEFAULT_MAX_COSETS: usize = 10_000_000;
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(30 * 60);

/// Pending deductions beyond this are discarded in HLT mode; relator scans recover them.
const MAX_HLT_DEDUCTIONS: usize = 1 << 18;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CosetError {
    #[error("generator {0} does not occur in the presentation")]
    UnknownGenerator(Symbol),
    #[error("max_cosets must be at least 1")]
    NoSpace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Relator-based (Haselgrove-Leech-Trotter) with lookahead; deductions are also
    /// scanned against relator conjugates, up to a bounded backlog.
    #[default]
    Hlt,
    /// Definition-based with a deduction stack.
    Felsch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_cosets: usize,
    pub strategy: Strategy,
    pub time_limit: Option<Duration>,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self {
            max_cosets: DEFAULT_MAX_COSETS,
            strategy: Strategy::Hlt,
            time_limit: Some(DEFAULT_TIME_LIMIT),
        }
    }
}

impl EnumerationLimits {
    pub fn with_max_cosets(max_cosets: usize) -> Self {
        Self {
            max_cosets,
            ..Self::default()
        }
    }

    pub fn strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverflowReason {
    CosetLimit,
    TimeLimit,
}

/// Counters reported during and after an enumeration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub live: usize,
    pub peak: usize,
    pub total_defined: u64,
    pub coincidences: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnumerationOutcome {
    Complete(CosetTable, EnumerationStats),
    Overflow(OverflowReason, EnumerationStats),
}

impl EnumerationOutcome {
    pub fn table(&self) -> Option<&CosetTable> {
        match self {
            Self::Complete(t, _) => Some(t),
            Self::Overflow(..) => None,
        }
    }

    pub fn into_table(self) -> Option<CosetTable> {
        match self {
            Self::Complete(t, _) => Some(t),
            Self::Overflow(..) => None,
        }
    }

    pub fn stats(&self) -> &EnumerationStats {
        match self {
            Self::Complete(_, s) | Self::Overflow(_, s) => s,
        }
    }
}

/// Converts a word to column letters, expanding powers.
pub(crate) fn word_letters(
    word: &GroupWord,
    index: &HashMap<Symbol, usize>,
) -> Result<Vec<u32>, CosetError> {
    let mut out = Vec::with_capacity(word.length() as usize);
    for (sym, e) in word.syllables() {
        let g = *index
            .get(sym)
            .ok_or_else(|| CosetError::UnknownGenerator(sym.clone()))?;
        let col = (2 * g + usize::from(*e < 0)) as u32;
        out.extend(std::iter::repeat_n(col, e.unsigned_abs() as usize));
    }
    Ok(out)
}

pub(crate) fn generator_index(gens: &[Symbol]) -> HashMap<Symbol, usize> {
    gens.iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect()
}

fn inverse_letters(w: &[u32]) -> Vec<u32> {
    w.iter().rev().map(|&x| x ^ 1).collect()
}

fn cyclically_reduce(w: &[u32]) -> Vec<u32> {
    let mut lo = 0;
    let mut hi = w.len();
    while hi - lo >= 2 && w[lo] == w[hi - 1] ^ 1 {
        lo += 1;
        hi -= 1;
    }
    w[lo..hi].to_vec()
}

/// A complete, standardized coset table. Cosets are numbered from 0 here; coset 0 is `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    generators: Vec<Symbol>,
    ncols: usize,
    rows: Vec<u32>,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.rows.len() / self.ncols
    }

    pub fn generators(&self) -> &[Symbol] {
        &self.generators
    }

    /// Image of `coset` under column `col` (`2i` for generator `i`, `2i + 1` for its inverse).
    pub fn action(&self, coset: usize, col: usize) -> usize {
        self.rows[coset * self.ncols + col] as usize
    }

    pub fn trace(&self, coset: usize, word: &GroupWord) -> Result<usize, CosetError> {
        let letters = word_letters(word, &generator_index(&self.generators))?;
        Ok(self.trace_letters(coset, &letters))
    }

    pub(crate) fn trace_letters(&self, coset: usize, letters: &[u32]) -> usize {
        letters
            .iter()
            .fold(coset, |c, &x| self.action(c, x as usize))
    }

    /// Whether `word` fixes the subgroup coset, i.e. lies in `H`.
    pub fn word_stabilizes_one(&self, word: &GroupWord) -> Result<bool, CosetError> {
        Ok(self.trace(0, word)? == 0)
    }

    /// One line per coset, 1-based, tab separated, columns `g1 g1^-1 g2 g2^-1 ...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.rows.chunks(self.ncols) {
            let cells: Vec<String> = row.iter().map(|c| (c + 1).to_string()).collect();
            writeln!(out, "{}", cells.join("\t")).expect("write to string");
        }
        out
    }

    /// The permutation of cosets induced by each generator.
    pub fn permutations(&self) -> Vec<Vec<u32>> {
        (0..self.generators.len())
            .map(|g| {
                (0..self.index())
                    .map(|c| self.action(c, 2 * g) as u32)
                    .collect()
            })
            .collect()
    }
}

/// Enumerates the cosets of `<subgroup>` in the group presented by `presentation`.
pub fn todd_coxeter(
    presentation: &Presentation,
    subgroup: &[GroupWord],
    limits: &EnumerationLimits,
) -> Result<EnumerationOutcome, CosetError> {
    todd_coxeter_with_progress(presentation, subgroup, limits, &mut |_| {})
}

/// As [`todd_coxeter`], calling `progress` every 65536 coset definitions.
pub fn todd_coxeter_with_progress(
    presentation: &Presentation,
    subgroup: &[GroupWord],
    limits: &EnumerationLimits,
    progress: &mut dyn FnMut(&EnumerationStats),
) -> Result<EnumerationOutcome, CosetError> {
    if limits.max_cosets == 0 {
        return Err(CosetError::NoSpace);
    }
    let index = generator_index(presentation.generators());
    let mut relators = Vec::new();
    for r in presentation.relators() {
        let w = cyclically_reduce(&word_letters(r, &index)?);
        if !w.is_empty() && !relators.contains(&w) {
            relators.push(w);
        }
    }
    let subgroup = subgroup
        .iter()
        .map(|w| word_letters(w, &index))
        .collect::<Result<Vec<_>, _>>()?;
    let mut e = Enumerator::new(2 * index.len(), relators, subgroup, limits, progress);
    let result = match limits.strategy {
        Strategy::Hlt => e.run_hlt(),
        Strategy::Felsch => e.run_felsch(),
    }
    .and_then(|()| e.finish());
    let stats = e.stats();
    Ok(match result {
        Ok(()) => EnumerationOutcome::Complete(
            CosetTable {
                generators: presentation.generators().to_vec(),
                ncols: e.ncols,
                rows: e.standardized(),
            },
            stats,
        ),
        Err(Stop::Overflow(reason)) => EnumerationOutcome::Overflow(reason, stats),
        Err(Stop::NeedSpace) => EnumerationOutcome::Overflow(OverflowReason::CosetLimit, stats),
    })
}

#[derive(Debug)]
enum Stop {
    NeedSpace,
    Overflow(OverflowReason),
}

struct Enumerator<'a> {
    ncols: usize,
    /// Row `k` occupies `table[k * ncols..]`; row 0 is unused.
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    queue: Vec<u32>,
    felsch: bool,
    deductions: Vec<(u32, u32)>,
    relators: Vec<Vec<u32>>,
    /// Cyclic conjugates of relators and their inverses, grouped by first letter.
    conjugates: Vec<Vec<Vec<u32>>>,
    subgroup: Vec<Vec<u32>>,
    max_cosets: usize,
    time_limit: Option<Duration>,
    start: Instant,
    peak: usize,
    total_defined: u64,
    coincidences: u64,
    progress: &'a mut dyn FnMut(&EnumerationStats),
}

impl<'a> Enumerator<'a> {
    fn new(
        ncols: usize,
        relators: Vec<Vec<u32>>,
        subgroup: Vec<Vec<u32>>,
        limits: &EnumerationLimits,
        progress: &'a mut dyn FnMut(&EnumerationStats),
    ) -> Self {
        let felsch = limits.strategy == Strategy::Felsch;
        let mut conjugates = vec![Vec::new(); ncols];
        for r in &relators {
            for w in [r.clone(), inverse_letters(r)] {
                for i in 0..w.len() {
                    let c: Vec<u32> = w[i..].iter().chain(&w[..i]).copied().collect();
                    let bucket: &mut Vec<Vec<u32>> = &mut conjugates[c[0] as usize];
                    if !bucket.contains(&c) {
                        bucket.push(c);
                    }
                }
            }
        }
        let mut e = Self {
            ncols,
            table: vec![0; 2 * ncols],
            parent: vec![0, 1],
            live: 1,
            queue: Vec::new(),
            felsch,
            deductions: Vec::new(),
            relators,
            conjugates,
            subgroup,
            max_cosets: limits.max_cosets,
            time_limit: limits.time_limit,
            start: Instant::now(),
            peak: 1,
            total_defined: 1,
            coincidences: 0,
            progress,
        };
        e.parent[0] = 0;
        e
    }

    fn stats(&self) -> EnumerationStats {
        EnumerationStats {
            live: self.live,
            peak: self.peak,
            total_defined: self.total_defined,
            coincidences: self.coincidences,
            elapsed: self.start.elapsed(),
        }
    }

    #[inline]
    fn get(&self, c: u32, x: u32) -> u32 {
        self.table[c as usize * self.ncols + x as usize]
    }

    #[inline]
    fn set(&mut self, c: u32, x: u32, v: u32) {
        self.table[c as usize * self.ncols + x as usize] = v;
    }

    #[inline]
    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn rows(&self) -> u32 {
        self.parent.len() as u32
    }

    fn link(&mut self, c: u32, x: u32, d: u32) {
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        if !self.felsch && self.deductions.len() >= MAX_HLT_DEDUCTIONS {
            self.deductions.clear();
        }
        self.deductions.push((c, x));
    }

    fn define(&mut self, c: u32, x: u32) -> Result<(), Stop> {
        if self.parent.len() > self.max_cosets {
            return Err(Stop::NeedSpace);
        }
        if self.total_defined.is_multiple_of(4096) {
            if let Some(limit) = self.time_limit {
                if self.start.elapsed() > limit {
                    return Err(Stop::Overflow(OverflowReason::TimeLimit));
                }
            }
        }
        let d = self.rows();
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(0, self.ncols));
        self.live += 1;
        self.peak = self.peak.max(self.live);
        self.total_defined += 1;
        if self.total_defined.is_multiple_of(65536) {
            let stats = self.stats();
            (self.progress)(&stats);
        }
        self.link(c, x, d);
        Ok(())
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut k = c;
        while self.parent[k as usize] != r {
            let next = self.parent[k as usize];
            self.parent[k as usize] = r;
            k = next;
        }
        r
    }

    fn merge(&mut self, k: u32, l: u32) {
        let (phi, psi) = (self.rep(k), self.rep(l));
        if phi != psi {
            let (mu, nu) = (phi.min(psi), phi.max(psi));
            self.parent[nu as usize] = mu;
            self.live -= 1;
            self.queue.push(nu);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.coincidences += 1;
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.ncols as u32 {
                let d = self.get(g, x);
                if d == 0 {
                    continue;
                }
                self.set(d, x ^ 1, 0);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mx = self.get(mu, x);
                if mx != 0 {
                    self.merge(nu, mx);
                } else {
                    let nx = self.get(nu, x ^ 1);
                    if nx != 0 {
                        self.merge(mu, nx);
                    } else {
                        self.link(mu, x, nu);
                    }
                }
            }
        }
        self.queue.clear();
    }

    /// Scans `w` at `a`, defining cosets to close gaps when `fill` is set.
    fn scan(&mut self, a: u32, w: &[u32], fill: bool) -> Result<(), Stop> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = a;
        let mut i = 0usize;
        let mut b = a;
        let mut j = w.len() - 1;
        loop {
            while i <= j {
                let n = self.get(f, w[i]);
                if n == 0 {
                    break;
                }
                f = n;
                i += 1;
            }
            if i > j {
                if f != a {
                    self.coincidence(f, a);
                }
                return Ok(());
            }
            while j >= i {
                let n = self.get(b, w[j] ^ 1);
                if n == 0 {
                    break;
                }
                b = n;
                if j == 0 {
                    // whole word traced backwards
                    if b != f {
                        self.coincidence(f, b);
                    }
                    return Ok(());
                }
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                self.link(f, w[i], b);
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    fn scan_subgroup(&mut self) -> Result<(), Stop> {
        for k in 0..self.subgroup.len() {
            let w = std::mem::take(&mut self.subgroup[k]);
            let one = self.rep(1);
            let r = self.scan(one, &w, true);
            self.subgroup[k] = w;
            r?;
        }
        Ok(())
    }

    fn scan_relators_at(&mut self, a: u32, fill: bool) -> Result<(), Stop> {
        for k in 0..self.relators.len() {
            if !self.is_live(a) {
                break;
            }
            let w = std::mem::take(&mut self.relators[k]);
            let r = self.scan(a, &w, fill);
            self.relators[k] = w;
            r?;
        }
        Ok(())
    }

    fn process_deductions(&mut self) {
        while let Some((a, x)) = self.deductions.pop() {
            if !self.is_live(a) {
                continue;
            }
            let bucket = std::mem::take(&mut self.conjugates[x as usize]);
            for w in &bucket {
                if !self.is_live(a) {
                    break;
                }
                self.scan(a, w, false)
                    .expect("scans without fill never define");
            }
            self.conjugates[x as usize] = bucket;
            let b = self.get(a, x);
            if b == 0 || !self.is_live(b) {
                continue;
            }
            let bucket = std::mem::take(&mut self.conjugates[(x ^ 1) as usize]);
            for w in &bucket {
                if !self.is_live(b) {
                    break;
                }
                self.scan(b, w, false)
                    .expect("scans without fill never define");
            }
            self.conjugates[(x ^ 1) as usize] = bucket;
        }
    }

    /// Renumbers live cosets in order, discarding dead rows; returns old -> new.
    fn compact(&mut self) -> Vec<u32> {
        let n = self.rows() as usize;
        let mut map = vec![0u32; n];
        let mut next = 1u32;
        for (c, slot) in map.iter_mut().enumerate().skip(1) {
            if self.parent[c] == c as u32 {
                *slot = next;
                next += 1;
            }
        }
        let mut table = vec![0u32; next as usize * self.ncols];
        for c in 1..n {
            if map[c] == 0 {
                continue;
            }
            let dst = map[c] as usize * self.ncols;
            for x in 0..self.ncols {
                let v = self.table[c * self.ncols + x];
                table[dst + x] = if v == 0 { 0 } else { map[v as usize] };
            }
        }
        self.table = table;
        self.parent = (0..next).collect();
        self.deductions = self
            .deductions
            .iter()
            .filter(|(c, _)| map[*c as usize] != 0)
            .map(|&(c, x)| (map[c as usize], x))
            .collect();
        map
    }

    /// Frees rows after running out; returns the new position of coset `a`
    /// (or of the next live coset after it).
    fn make_room(&mut self, a: u32) -> Result<u32, Stop> {
        if !self.felsch {
            // lookahead: close what can be closed without new definitions
            let mut c = 1;
            while c < self.rows() {
                if self.is_live(c) {
                    self.scan_relators_at(c, false)?;
                }
                c += 1;
            }
        }
        if self.live + 1 >= self.rows() as usize {
            return Err(Stop::Overflow(OverflowReason::CosetLimit));
        }
        let map = self.compact();
        let pos = (a as usize..map.len())
            .find(|&c| map[c] != 0)
            .map(|c| map[c])
            .unwrap_or(self.rows());
        Ok(pos)
    }

    fn run_hlt(&mut self) -> Result<(), Stop> {
        loop {
            match self.scan_subgroup() {
                Ok(()) => break,
                Err(Stop::NeedSpace) => {
                    self.make_room(1)?;
                }
                Err(e) => return Err(e),
            }
        }
        let mut a = 1u32;
        while a < self.rows() {
            let step = (|| {
                if self.is_live(a) {
                    self.scan_relators_at(a, true)?;
                }
                for x in 0..self.ncols as u32 {
                    if self.is_live(a) && self.get(a, x) == 0 {
                        self.define(a, x)?;
                    }
                }
                Ok(())
            })();
            match step {
                Ok(()) => {
                    self.process_deductions();
                    a += 1
                }
                Err(Stop::NeedSpace) => a = self.make_room(a)?,
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    fn run_felsch(&mut self) -> Result<(), Stop> {
        loop {
            match self.scan_subgroup() {
                Ok(()) => break,
                Err(Stop::NeedSpace) => {
                    self.process_deductions();
                    self.make_room(1)?;
                }
                Err(e) => return Err(e),
            }
        }
        self.process_deductions();
        let mut a = 1u32;
        while a < self.rows() {
            let mut x = 0u32;
            while x < self.ncols as u32 && self.is_live(a) {
                if self.get(a, x) == 0 {
                    match self.define(a, x) {
                        Ok(()) => self.process_deductions(),
                        Err(Stop::NeedSpace) => {
                            a = self.make_room(a)?;
                            x = 0;
                            if a >= self.rows() {
                                break;
                            }
                            continue;
                        }
                        Err(e) => return Err(e),
                    }
                }
                x += 1;
            }
            a += 1;
        }
        Ok(())
    }

    /// Re-checks every relator at every coset and the subgroup generators at coset 1,
    /// resolving any remaining coincidences, then compacts.
    fn finish(&mut self) -> Result<(), Stop> {
        loop {
            let before = self.coincidences;
            self.scan_subgroup()?;
            let mut c = 1;
            while c < self.rows() {
                if self.is_live(c) {
                    self.scan_relators_at(c, false)?;
                }
                c += 1;
            }
            self.process_deductions();
            if self.coincidences == before {
                break;
            }
        }
        self.compact();
        debug_assert!(self.table[self.ncols..].iter().all(|&v| v != 0));
        Ok(())
    }

    /// Breadth-first renumbering from coset 1 in column order, 0-based.
    fn standardized(&self) -> Vec<u32> {
        let n = self.rows() as usize - 1;
        let mut order = Vec::with_capacity(n);
        let mut new_of = vec![u32::MAX; n + 1];
        new_of[1] = 0;
        order.push(1u32);
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            i += 1;
            for x in 0..self.ncols as u32 {
                let d = self.get(c, x);
                if new_of[d as usize] == u32::MAX {
                    new_of[d as usize] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        let mut rows = Vec::with_capacity(n * self.ncols);
        for &c in &order {
            for x in 0..self.ncols as u32 {
                rows.push(new_of[self.get(c, x) as usize]);
            }
        }
        rows
    }
}
