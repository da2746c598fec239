//! Relators among the subgroup generators `A`, `B`, recovered from a labelled coset
//! enumeration.
//!
//! Every table entry `c --x--> d` carries a label `l` in the free group on `A`, `B` with
//! `u_c x = l u_d`, where `u_c` is the representative of coset `c`. Scanning a relator
//! around a closed loop, or merging a coset with itself, produces a word in `A`, `B`
//! that is trivial in the group. Labels are kept as a straight-line program so they stay
//! small while the enumeration runs; candidates are expanded, reduced and checked by exact
//! matrix evaluation.

use std::collections::HashSet;

use thiserror::Error;

use crate::coset::{generator_index, word_letters, CosetError, CosetTable};
use crate::exact::{ExactError, GeneratorAssignment, GroupWord, Symbol};
use crate::presentation::Presentation;

pub const A: &str = "A";
pub const B: &str = "B";

/// Default bound on relator length, in letters.
pub const DEFAULT_RELATOR_BOUND: u64 = 300;

/// Coset cap for the labelled enumeration.
const MAX_LABELLED_COSETS: usize = 4_000_000;
/// Raw label length above which a candidate is not expanded.
const MAX_EXPANSION: u64 = 1 << 20;
const MAX_CANDIDATES: usize = 200_000;
/// Total letters expanded while selecting a relator.
const EXPANSION_BUDGET: u64 = 1 << 28;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelatorError {
    #[error("coset table is not for <word_A, word_B>: {0} does not fix coset 1")]
    TableMismatch(String),
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

const ONE: u32 = 0;

#[derive(Clone)]
enum Node {
    One,
    /// 0: A, 1: A^-1, 2: B, 3: B^-1.
    Letter(u8),
    /// A freely reduced word, materialized when short.
    Word(Box<[u8]>),
    Mul(u32, u32),
    Inv(u32),
}

/// Products of operands this short are reduced on creation.
const EAGER: u64 = 256;

fn push_reduced(out: &mut Vec<u8>, l: u8) {
    if out.last() == Some(&(l ^ 1)) {
        out.pop();
    } else {
        out.push(l);
    }
}

struct Arena {
    nodes: Vec<Node>,
    lens: Vec<u64>,
}

impl Arena {
    fn new() -> Self {
        let mut a = Self {
            nodes: vec![Node::One],
            lens: vec![0],
        };
        for l in 0..4 {
            a.nodes.push(Node::Letter(l));
            a.lens.push(1);
        }
        a
    }

    fn letter(l: u8) -> u32 {
        1 + l as u32
    }

    fn len(&self, n: u32) -> u64 {
        self.lens[n as usize]
    }

    fn mul(&mut self, a: u32, b: u32) -> u32 {
        if a == ONE {
            return b;
        }
        if b == ONE {
            return a;
        }
        if self.len(a).saturating_add(self.len(b)) <= EAGER {
            let mut w = self.expand(a);
            for l in self.expand(b) {
                push_reduced(&mut w, l);
            }
            return self.word(w);
        }
        self.nodes.push(Node::Mul(a, b));
        self.lens.push(self.len(a).saturating_add(self.len(b)));
        (self.nodes.len() - 1) as u32
    }

    fn word(&mut self, w: Vec<u8>) -> u32 {
        match w.len() {
            0 => ONE,
            1 => Self::letter(w[0]),
            n => {
                self.nodes.push(Node::Word(w.into_boxed_slice()));
                self.lens.push(n as u64);
                (self.nodes.len() - 1) as u32
            }
        }
    }

    fn inv(&mut self, a: u32) -> u32 {
        match &self.nodes[a as usize] {
            Node::One => ONE,
            Node::Letter(l) => Self::letter(l ^ 1),
            Node::Inv(x) => *x,
            Node::Word(w) => {
                let w = w.iter().rev().map(|l| l ^ 1).collect();
                self.word(w)
            }
            Node::Mul(..) => {
                self.nodes.push(Node::Inv(a));
                self.lens.push(self.len(a));
                (self.nodes.len() - 1) as u32
            }
        }
    }

    /// Freely reduced expansion of `n`.
    fn expand(&self, n: u32) -> Vec<u8> {
        let mut out: Vec<u8> = Vec::new();
        let mut stack = vec![(n, false)];
        while let Some((n, inverted)) = stack.pop() {
            match &self.nodes[n as usize] {
                Node::One => {}
                Node::Letter(l) => push_reduced(&mut out, if inverted { l ^ 1 } else { *l }),
                Node::Word(w) => {
                    if inverted {
                        w.iter().rev().for_each(|l| push_reduced(&mut out, l ^ 1));
                    } else {
                        w.iter().for_each(|&l| push_reduced(&mut out, l));
                    }
                }
                Node::Inv(x) => stack.push((*x, !inverted)),
                Node::Mul(a, b) => {
                    if inverted {
                        stack.push((*a, true));
                        stack.push((*b, true));
                    } else {
                        stack.push((*b, false));
                        stack.push((*a, false));
                    }
                }
            }
        }
        out
    }
}

fn letters_to_word(letters: &[u8]) -> GroupWord {
    GroupWord::from_syllables(letters.iter().map(|&l| {
        let sym = if l < 2 { A } else { B };
        (Symbol::from(sym), if l % 2 == 0 { 1 } else { -1 })
    }))
}

struct Labelled {
    ncols: usize,
    felsch: bool,
    table: Vec<u32>,
    labels: Vec<u32>,
    parent: Vec<u32>,
    plabel: Vec<u32>,
    arena: Arena,
    queue: Vec<u32>,
    deductions: Vec<(u32, u32)>,
    candidates: Vec<u32>,
    live: usize,
}

enum Full {
    Full,
}

impl Labelled {
    fn new(ncols: usize, felsch: bool) -> Self {
        Self {
            ncols,
            felsch,
            table: vec![0; 2 * ncols],
            labels: vec![ONE; 2 * ncols],
            parent: vec![0, 1],
            plabel: vec![ONE, ONE],
            arena: Arena::new(),
            queue: Vec::new(),
            deductions: Vec::new(),
            candidates: Vec::new(),
            live: 1,
        }
    }

    fn rows(&self) -> u32 {
        self.parent.len() as u32
    }

    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn get(&self, c: u32, x: u32) -> (u32, u32) {
        let i = c as usize * self.ncols + x as usize;
        (self.table[i], self.labels[i])
    }

    fn put(&mut self, c: u32, x: u32, d: u32, label: u32) {
        let i = c as usize * self.ncols + x as usize;
        self.table[i] = d;
        self.labels[i] = label;
    }

    fn link(&mut self, c: u32, x: u32, d: u32, label: u32) {
        let back = self.arena.inv(label);
        self.put(c, x, d, label);
        self.put(d, x ^ 1, c, back);
        if self.felsch {
            self.deductions.push((c, x));
        }
    }

    fn process_deductions(&mut self, conjugates: &[Vec<Vec<u32>>]) {
        while let Some((c, x)) = self.deductions.pop() {
            if !self.is_live(c) {
                continue;
            }
            for w in &conjugates[x as usize] {
                if !self.is_live(c) {
                    break;
                }
                let _ = self.scan(c, w, ONE, false);
            }
            let d = self.get(c, x).0;
            if d == 0 || !self.is_live(d) {
                continue;
            }
            for w in &conjugates[(x ^ 1) as usize] {
                if !self.is_live(d) {
                    break;
                }
                let _ = self.scan(d, w, ONE, false);
            }
        }
    }

    fn define(&mut self, c: u32, x: u32) -> Result<(), Full> {
        if self.parent.len() > MAX_LABELLED_COSETS {
            return Err(Full::Full);
        }
        let d = self.rows();
        self.parent.push(d);
        self.plabel.push(ONE);
        self.table.extend(std::iter::repeat_n(0, self.ncols));
        self.labels.extend(std::iter::repeat_n(ONE, self.ncols));
        self.live += 1;
        self.link(c, x, d, ONE);
        Ok(())
    }

    /// `(root, l)` with `u_c = l u_root`.
    fn rep(&mut self, c: u32) -> (u32, u32) {
        let mut path = Vec::new();
        let mut r = c;
        while self.parent[r as usize] != r {
            path.push(r);
            r = self.parent[r as usize];
        }
        // compose from the node nearest the root outwards
        let mut acc = ONE;
        for &k in path.iter().rev() {
            acc = self.arena.mul(self.plabel[k as usize], acc);
            self.parent[k as usize] = r;
            self.plabel[k as usize] = acc;
        }
        (
            r,
            if path.is_empty() {
                ONE
            } else {
                self.plabel[c as usize]
            },
        )
    }

    fn record(&mut self, relator: u32) {
        let len = self.arena.len(relator);
        if len > 0 && len <= MAX_EXPANSION && self.candidates.len() < MAX_CANDIDATES {
            self.candidates.push(relator);
        }
    }

    /// Records `u_k = l u_m`.
    fn merge(&mut self, k: u32, m: u32, l: u32) {
        let (rk, lk) = self.rep(k);
        let (rm, lm) = self.rep(m);
        // u_rk = lk^-1 l lm u_rm
        let lk_inv = self.arena.inv(lk);
        let t = self.arena.mul(lk_inv, l);
        let rel = self.arena.mul(t, lm);
        if rk == rm {
            self.record(rel);
            return;
        }
        if rk > rm {
            self.parent[rk as usize] = rm;
            self.plabel[rk as usize] = rel;
            self.queue.push(rk);
        } else {
            self.parent[rm as usize] = rk;
            self.plabel[rm as usize] = self.arena.inv(rel);
            self.queue.push(rm);
        }
        self.live -= 1;
    }

    fn coincidence(&mut self, k: u32, m: u32, l: u32) {
        self.queue.clear();
        self.merge(k, m, l);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.ncols as u32 {
                let (d, lam) = self.get(g, x);
                if d == 0 {
                    continue;
                }
                self.put(d, x ^ 1, 0, ONE);
                let (mu, lg) = self.rep(g);
                let (nu, ld) = self.rep(d);
                // u_mu x = lg^-1 lam ld u_nu
                let lg_inv = self.arena.inv(lg);
                let t = self.arena.mul(lg_inv, lam);
                let kappa = self.arena.mul(t, ld);
                let (e, lam_e) = self.get(mu, x);
                if e != 0 {
                    // kappa u_nu = lam_e u_e
                    let k_inv = self.arena.inv(kappa);
                    let l = self.arena.mul(k_inv, lam_e);
                    self.merge(nu, e, l);
                    continue;
                }
                let (z, lam_z) = self.get(nu, x ^ 1);
                if z != 0 {
                    // u_mu = kappa lam_z u_z
                    let l = self.arena.mul(kappa, lam_z);
                    self.merge(mu, z, l);
                } else {
                    self.link(mu, x, nu, kappa);
                }
            }
        }
        self.queue.clear();
    }

    /// Scans `w` at `c`, where `u_c w = target u_c`.
    fn scan(&mut self, c: u32, w: &[u32], target: u32, fill: bool) -> Result<(), Full> {
        if w.is_empty() {
            return Ok(());
        }
        let (mut f, mut fl) = (c, ONE);
        let (mut b, mut bl) = (c, ONE);
        let mut i = 0usize;
        let mut j = w.len() as isize - 1;
        loop {
            while (i as isize) <= j {
                let (n, l) = self.get(f, w[i]);
                if n == 0 {
                    break;
                }
                fl = self.arena.mul(fl, l);
                f = n;
                i += 1;
            }
            while j >= i as isize {
                let (n, l) = self.get(b, w[j as usize] ^ 1);
                if n == 0 {
                    break;
                }
                bl = self.arena.mul(bl, l);
                b = n;
                j -= 1;
            }
            // u_f w[i..=j] = fl^-1 target bl u_b
            let fl_inv = self.arena.inv(fl);
            let t = self.arena.mul(fl_inv, target);
            let gap = self.arena.mul(t, bl);
            if j < i as isize {
                self.coincidence(f, b, gap);
                return Ok(());
            }
            if j == i as isize {
                self.link(f, w[i], b, gap);
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }
}

/// Shortest candidate of at most `bound` letters that evaluates to `1_2`.
fn select_relator(
    arena: &Arena,
    candidates: &[u32],
    bound: u64,
    asg: &GeneratorAssignment,
) -> Result<Option<GroupWord>, ExactError> {
    let mut order: Vec<u32> = candidates
        .iter()
        .copied()
        .filter(|&n| arena.len(n) <= MAX_EXPANSION)
        .collect();
    order.sort_by_key(|&n| arena.len(n));
    order.dedup();
    let mut budget = EXPANSION_BUDGET;
    let mut seen = HashSet::new();
    let mut best: Option<GroupWord> = None;
    for n in order {
        budget = match budget.checked_sub(arena.len(n)) {
            Some(b) => b,
            None => break,
        };
        let word = letters_to_word(&arena.expand(n)).cyclically_reduced();
        let len = word.length();
        if word.is_identity() || len > bound {
            continue;
        }
        if best.as_ref().is_some_and(|b| b.length() <= len) {
            continue;
        }
        if !seen.insert(word.to_string()) {
            continue;
        }
        if asg.evaluate(&word)?.is_identity() {
            best = Some(word);
        }
    }
    Ok(best)
}

/// Searches for a nonempty reduced word in `A`, `B` of at most `bound` letters that is a
/// relator under `A -> word_a`, `B -> word_b`. `table` must be the completed coset table
/// of `<word_a, word_b>` in `presentation`.
pub fn find_relator(
    presentation: &Presentation,
    word_a: &GroupWord,
    word_b: &GroupWord,
    table: &CosetTable,
    bound: u64,
) -> Result<Option<GroupWord>, RelatorError> {
    for w in [word_a, word_b] {
        if !table.word_stabilizes_one(w)? {
            return Err(RelatorError::TableMismatch(w.to_string()));
        }
    }
    let index = generator_index(presentation.generators());
    let relators = presentation
        .relators()
        .iter()
        .map(|r| word_letters(r, &index))
        .collect::<Result<Vec<_>, _>>()?;
    let subgroup = [
        (word_letters(word_a, &index)?, Arena::letter(0)),
        (word_letters(word_b, &index)?, Arena::letter(2)),
    ];
    let mut asg = GeneratorAssignment::new();
    asg.insert(A, presentation.assignment().evaluate(word_a)?);
    asg.insert(B, presentation.assignment().evaluate(word_b)?);

    let ncols = 2 * index.len();
    let mut best: Option<GroupWord> = None;
    for felsch in [true, false] {
        let e = labelled_run(ncols, &relators, &subgroup, felsch);
        if let Some(w) = select_relator(&e.arena, &e.candidates, bound, &asg)? {
            if best.as_ref().is_none_or(|b| w.length() < b.length()) {
                best = Some(w);
            }
        }
    }
    Ok(best)
}

/// Runs a labelled enumeration, Felsch-style or HLT-style, collecting candidates until
/// it completes or runs out of cosets.
fn labelled_run(
    ncols: usize,
    relators: &[Vec<u32>],
    subgroup: &[(Vec<u32>, u32)],
    felsch: bool,
) -> Labelled {
    let mut e = Labelled::new(ncols, felsch);
    let mut conjugates: Vec<Vec<Vec<u32>>> = vec![Vec::new(); ncols];
    for r in relators {
        let inv: Vec<u32> = r.iter().rev().map(|&x| x ^ 1).collect();
        for w in [r.clone(), inv] {
            for i in 0..w.len() {
                let c: Vec<u32> = w[i..].iter().chain(&w[..i]).copied().collect();
                if !conjugates[c[0] as usize].contains(&c) {
                    conjugates[c[0] as usize].push(c);
                }
            }
        }
    }
    let _ = (|| -> Result<(), Full> {
        for (w, label) in subgroup {
            e.scan(1, w, *label, true)?;
            e.process_deductions(&conjugates);
        }
        let mut c = 1;
        while c < e.rows() {
            if !felsch {
                for r in relators {
                    if !e.is_live(c) {
                        break;
                    }
                    e.scan(c, r, ONE, true)?;
                }
            }
            for x in 0..e.ncols as u32 {
                if e.is_live(c) && e.get(c, x).0 == 0 {
                    e.define(c, x)?;
                    e.process_deductions(&conjugates);
                }
            }
            c += 1;
        }
        // every relator loop in the finished table is a relation among the labels
        for c in 1..e.rows() {
            for r in relators {
                if e.is_live(c) {
                    e.scan(c, r, ONE, false)?;
                }
            }
        }
        Ok(())
    })();
    e
}

/// Whether `relator` (in `A`, `B`) is nontrivial and evaluates to `1_2` under the
/// given values of `A` and `B`.
pub fn validate_relator(
    relator: &GroupWord,
    a: &crate::exact::UniModularMatrix,
    b: &crate::exact::UniModularMatrix,
) -> Result<bool, ExactError> {
    if relator.is_identity() {
        return Ok(false);
    }
    let mut asg = GeneratorAssignment::new();
    asg.insert(A, a.clone());
    asg.insert(B, b.clone());
    Ok(asg.evaluate(relator)?.is_identity())
}
