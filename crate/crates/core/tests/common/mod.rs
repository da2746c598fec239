//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use moebius::exact::{GroupWord, Symbol};
use moebius::presentation::Presentation;

pub type Perm = Vec<u32>;

pub fn compose(p: &Perm, q: &Perm) -> Perm {
    // apply p, then q
    p.iter().map(|&i| q[i as usize]).collect()
}

pub fn invert(p: &Perm) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j as usize] = i as u32;
    }
    inv
}

pub fn identity(n: usize) -> Perm {
    (0..n as u32).collect()
}

/// Every element of the group generated by `gens` (all of degree `n`).
pub fn closure(gens: &[Perm], n: usize) -> HashSet<Perm> {
    let mut seen = HashSet::from([identity(n)]);
    let mut queue = VecDeque::from([identity(n)]);
    while let Some(g) = queue.pop_front() {
        for h in gens {
            let gh = compose(&g, h);
            if seen.insert(gh.clone()) {
                queue.push_back(gh);
            }
        }
    }
    seen
}

pub fn evaluate(word: &GroupWord, images: &HashMap<Symbol, Perm>, n: usize) -> Perm {
    let mut acc = identity(n);
    for (sym, e) in word.syllables() {
        let g = &images[sym];
        let g = if *e < 0 { invert(g) } else { g.clone() };
        for _ in 0..e.unsigned_abs() {
            acc = compose(&acc, &g);
        }
    }
    acc
}

/// Permutation from a cycle list on `n` points.
pub fn cycles(n: usize, cs: &[&[u32]]) -> Perm {
    let mut p = identity(n);
    for c in cs {
        for i in 0..c.len() {
            p[c[i] as usize] = c[(i + 1) % c.len()];
        }
    }
    p
}

/// The action of `[[a, b], [c, d]]` on row vectors of `Z_n^2`.
pub fn matrix_perm(m: [i64; 4], n: i64) -> Perm {
    let mut p = Vec::with_capacity((n * n) as usize);
    for u in 0..n {
        for v in 0..n {
            let nu = (u * m[0] + v * m[2]).rem_euclid(n);
            let nv = (u * m[1] + v * m[3]).rem_euclid(n);
            p.push((nu * n + nv) as u32);
        }
    }
    p
}

/// A finite group given both by a presentation and by a faithful permutation model.
pub struct Case {
    pub name: String,
    pub presentation: Presentation,
    pub subgroup: Vec<GroupWord>,
    pub images: HashMap<Symbol, Perm>,
    pub degree: usize,
}

impl Case {
    fn new(name: &str, gens: &[&str], rels: &[&str], subgroup: &[&str], perms: Vec<Perm>) -> Self {
        let presentation = Presentation::new(
            gens.iter().map(|g| Symbol::from(*g)).collect(),
            rels.iter().map(|r| r.parse().unwrap()).collect(),
        );
        let degree = perms[0].len();
        let images = gens.iter().map(|g| Symbol::from(*g)).zip(perms).collect();
        Self {
            name: name.to_string(),
            presentation,
            subgroup: subgroup.iter().map(|w| w.parse().unwrap()).collect(),
            images,
            degree,
        }
    }

    /// Whether the permutation model satisfies every relator, so the presented group
    /// maps onto it.
    pub fn model_satisfies_relators(&self) -> bool {
        self.presentation
            .relators()
            .iter()
            .all(|r| evaluate(r, &self.images, self.degree) == identity(self.degree))
    }

    /// `|G : H|` computed in the permutation model.
    pub fn oracle_index(&self) -> usize {
        let gens: Vec<Perm> = self.images.values().cloned().collect();
        let h: Vec<Perm> = self
            .subgroup
            .iter()
            .map(|w| evaluate(w, &self.images, self.degree))
            .collect();
        closure(&gens, self.degree).len() / closure(&h, self.degree).len()
    }
}

/// Presentations of groups of order at most 200 with permutation models in which the
/// relators hold and the orders agree with the presented groups.
pub fn corpus() -> Vec<Case> {
    let mut out = Vec::new();
    for n in [1u32, 6, 12] {
        let rot: Perm = (0..n).map(|i| (i + 1) % n).collect();
        out.push(Case::new(
            &format!("C{n}"),
            &["g"],
            &[&format!("g^{n}")],
            &[],
            vec![rot],
        ));
    }
    let rot: Perm = (0..12u32).map(|i| (i + 1) % 12).collect();
    out.push(Case::new(
        "C12 / <g^8>",
        &["g"],
        &["g^12"],
        &["g^8"],
        vec![rot],
    ));
    for n in [3u32, 5, 8, 100] {
        let r: Perm = (0..n).map(|i| (i + 1) % n).collect();
        let f: Perm = (0..n).map(|i| (n - i) % n).collect();
        out.push(Case::new(
            &format!("D{n}"),
            &["r", "f"],
            &[&format!("r^{n}"), "f^2", "r f r f"],
            &[],
            vec![r, f],
        ));
    }
    let r: Perm = (0..8u32).map(|i| (i + 1) % 8).collect();
    let f: Perm = (0..8u32).map(|i| (8 - i) % 8).collect();
    out.push(Case::new(
        "D8 / <f>",
        &["r", "f"],
        &["r^8", "f^2", "r f r f"],
        &["f"],
        vec![r, f],
    ));
    out.push(Case::new(
        "Q8",
        &["i", "j"],
        &["i^4", "i^2 j^-2", "j^-1 i j i"],
        &[],
        vec![matrix_perm([0, 1, -1, 0], 3), matrix_perm([1, 1, 1, -1], 3)],
    ));
    out.push(Case::new(
        "A4",
        &["a", "b"],
        &["a^2", "b^3", "a b a b a b"],
        &[],
        vec![cycles(4, &[&[0, 1], &[2, 3]]), cycles(4, &[&[0, 1, 2]])],
    ));
    out.push(Case::new(
        "S4 / <b>",
        &["a", "b"],
        &["a^2", "b^3", "a b a b a b a b"],
        &["b"],
        vec![cycles(4, &[&[0, 1]]), cycles(4, &[&[1, 2, 3]])],
    ));
    out.push(Case::new(
        "S4",
        &["a", "b"],
        &["a^2", "b^3", "a b a b a b a b"],
        &[],
        vec![cycles(4, &[&[0, 1]]), cycles(4, &[&[1, 2, 3]])],
    ));
    out.push(Case::new(
        "A5",
        &["a", "b"],
        &["a^2", "b^3", "a b a b a b a b a b"],
        &[],
        vec![cycles(5, &[&[0, 1], &[2, 3]]), cycles(5, &[&[0, 2, 4]])],
    ));
    out.push(Case::new(
        "A5 / A4",
        &["a", "b"],
        &["a^2", "b^3", "a b a b a b a b a b"],
        &["b", "a b a b^-1 a"],
        vec![cycles(5, &[&[0, 1], &[2, 3]]), cycles(5, &[&[0, 2, 4]])],
    ));
    out.push(Case::new(
        "C4 x C6",
        &["a", "b"],
        &["a^4", "b^6", "a b a^-1 b^-1"],
        &[],
        vec![
            cycles(10, &[&[0, 1, 2, 3]]),
            cycles(10, &[&[4, 5, 6, 7, 8, 9]]),
        ],
    ));
    for n in [2i64, 3, 4, 5] {
        let t_rel = format!("t^{n}");
        out.push(Case::new(
            &format!("SL(2, Z_{n})"),
            &["s", "t"],
            &["s^4", "s t s t s t s^-2", &t_rel],
            &[],
            vec![matrix_perm([0, 1, -1, 0], n), matrix_perm([1, 0, 1, 1], n)],
        ));
    }
    out.push(Case::new(
        "SL(2, Z_5) / <t, s^2>",
        &["s", "t"],
        &["s^4", "s t s t s t s^-2", "t^5"],
        &["t", "s^2"],
        vec![matrix_perm([0, 1, -1, 0], 5), matrix_perm([1, 0, 1, 1], 5)],
    ));
    out
}

/// `|SL(2, Z_n)|` by counting determinant-1 matrices.
pub fn brute_sl2_order(n: u64) -> u64 {
    let n = n as i64;
    let mut count = 0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if (a * d - b * c).rem_euclid(n) == 1 % n {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}
