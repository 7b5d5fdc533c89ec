//! Steiner triple systems: validation, direct constructions, random
//! embeddings, and the exhaustive enumeration oracle for tiny orders.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{discrepancy, pair_count, Colouring, Triple, TripleSystem, Vertex};
use crate::rng;

/// `n mod 6`; a system of order `n` exists iff the residue is 1 or 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StsOrderClass {
    pub n: usize,
    pub residue: usize,
}

impl StsOrderClass {
    pub fn of(n: usize) -> Self {
        StsOrderClass { n, residue: n % 6 }
    }

    pub fn constructible(&self) -> bool {
        self.residue == 1 || self.residue == 3
    }

    pub fn require(n: usize) -> Result<Self> {
        let class = Self::of(n);
        if !class.constructible() {
            return Err(Error::BadResidue { n, residue: class.residue });
        }
        Ok(class)
    }
}

/// A pair covered the wrong number of times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairViolation {
    pub pair: (Vertex, Vertex),
    pub coverage: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StsValidation {
    pub valid: bool,
    pub violation: Option<PairViolation>,
}

/// Checks that every pair of `[n]` lies in exactly one triple, reporting the
/// lexicographically first pair that does not.
pub fn validate_sts(s: &TripleSystem) -> StsValidation {
    let n = s.order();
    let mut cover = vec![0usize; n * n];
    for t in s.triples() {
        for (a, b) in t.pairs() {
            cover[(a as usize - 1) * n + (b as usize - 1)] += 1;
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let coverage = cover[a * n + b];
            if coverage != 1 {
                let violation = PairViolation { pair: (a as Vertex + 1, b as Vertex + 1), coverage };
                return StsValidation { valid: false, violation: Some(violation) };
            }
        }
    }
    StsValidation { valid: true, violation: None }
}

pub fn is_sts(s: &TripleSystem) -> bool {
    validate_sts(s).valid
}

/// A Steiner triple system of order `n`: Bose's construction for `n = 3 mod 6`,
/// Skolem's for `n = 1 mod 6`.
pub fn construct_sts(n: usize) -> Result<TripleSystem> {
    StsOrderClass::require(n)?;
    if n < 3 {
        return Err(Error::UnsupportedOrder { n, reason: "order must be at least 3" });
    }
    let triples = if n % 6 == 3 { bose(n / 3) } else { skolem((n - 1) / 3) };
    let s = TripleSystem::new(n, triples)?.sorted();
    debug_assert!(is_sts(&s));
    Ok(s)
}

// point (x, i) of Z_m x Z_3 maps to i*m + x + 1
fn point(m: usize, x: usize, i: usize) -> Vertex {
    ((i % 3) * m + x + 1) as Vertex
}

fn bose(m: usize) -> Vec<Triple> {
    // idempotent commutative quasigroup on Z_m, m odd: x o y = (x + y)(m + 1)/2
    let op = |x: usize, y: usize| (x + y) * (m + 1) / 2 % m;
    let mut out = Vec::new();
    for x in 0..m {
        out.push(Triple::from_distinct(point(m, x, 0), point(m, x, 1), point(m, x, 2)));
    }
    for x in 0..m {
        for y in x + 1..m {
            for i in 0..3 {
                out.push(Triple::from_distinct(point(m, x, i), point(m, y, i), point(m, op(x, y), i + 1)));
            }
        }
    }
    out
}

fn skolem(m: usize) -> Vec<Triple> {
    // half-idempotent commutative quasigroup on Z_m, m = 2k: relabel the
    // symbols of addition mod m by s -> s/2 (s even), k + (s-1)/2 (s odd)
    let k = m / 2;
    let op = |x: usize, y: usize| {
        let s = (x + y) % m;
        if s % 2 == 0 {
            s / 2
        } else {
            k + (s - 1) / 2
        }
    };
    let infinity = (3 * m + 1) as Vertex;
    let mut out = Vec::new();
    for x in 0..k {
        out.push(Triple::from_distinct(point(m, x, 0), point(m, x, 1), point(m, x, 2)));
        for i in 0..3 {
            out.push(Triple::from_distinct(infinity, point(m, x + k, i), point(m, x, i + 1)));
        }
    }
    for x in 0..m {
        for y in x + 1..m {
            for i in 0..3 {
                out.push(Triple::from_distinct(point(m, x, i), point(m, y, i), point(m, op(x, y), i + 1)));
            }
        }
    }
    out
}

/// A uniformly random permutation of `[n]`, as images `perm[v - 1]`.
pub fn random_permutation(n: usize, seed: u64) -> Vec<Vertex> {
    let mut perm: Vec<Vertex> = (1..=n as Vertex).collect();
    perm.shuffle(&mut rng::seeded(seed));
    perm
}

/// Relabels `s` by a uniformly random permutation of its points.
pub fn random_embedding(s: &TripleSystem, seed: u64) -> Result<TripleSystem> {
    s.relabel(&random_permutation(s.order(), seed))
}

const ENUMERABLE: [usize; 3] = [3, 7, 9];

fn check_enumerable(n: usize) -> Result<()> {
    if !ENUMERABLE.contains(&n) {
        return Err(Error::UnsupportedOrder { n, reason: "exhaustive enumeration covers n in {3, 7, 9}" });
    }
    Ok(())
}

/// Streams every labelled Steiner triple system of order `n` exactly once.
///
/// The search always branches on the lexicographically first uncovered pair
/// and tries third points in ascending order, so the stream order is canonical.
pub fn enumerate_all_sts(n: usize) -> Result<StsEnumerator> {
    check_enumerable(n)?;
    Ok(StsEnumerator::new(n))
}

pub fn count_all_sts(n: usize) -> Result<usize> {
    Ok(enumerate_all_sts(n)?.count())
}

#[derive(Debug)]
pub struct StsEnumerator {
    n: usize,
    covered: Vec<bool>,
    // (pair a, pair b, next third point to try) per depth
    stack: Vec<(usize, usize, usize)>,
    chosen: Vec<Triple>,
    target: usize,
    started: bool,
    done: bool,
}

impl StsEnumerator {
    fn new(n: usize) -> Self {
        StsEnumerator {
            n,
            covered: vec![false; n * n],
            stack: Vec::new(),
            chosen: Vec::new(),
            target: pair_count(n) / 3,
            started: false,
            done: false,
        }
    }

    fn is_covered(&self, a: usize, b: usize) -> bool {
        self.covered[a * self.n + b]
    }

    fn mark(&mut self, t: [usize; 3], value: bool) {
        let n = self.n;
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            self.covered[a * n + b] = value;
            self.covered[b * n + a] = value;
        }
    }

    fn first_uncovered(&self) -> Option<(usize, usize)> {
        (0..self.n).find_map(|a| (a + 1..self.n).find(|&b| !self.is_covered(a, b)).map(|b| (a, b)))
    }

    // Tries third points for the pair on top of the stack starting at its cursor.
    // Returns true when a triple was placed.
    fn advance_top(&mut self) -> bool {
        let (a, b, from) = *self.stack.last().expect("non-empty stack");
        for c in from..self.n {
            if c == a || c == b || self.is_covered(a, c) || self.is_covered(b, c) {
                continue;
            }
            self.stack.last_mut().unwrap().2 = c + 1;
            let mut t = [a, b, c];
            t.sort_unstable();
            self.mark(t, true);
            self.chosen.push(Triple::from_distinct(t[0] as Vertex + 1, t[1] as Vertex + 1, t[2] as Vertex + 1));
            return true;
        }
        false
    }

    fn pop_choice(&mut self) {
        if let Some(t) = self.chosen.pop() {
            let v = t.vertices().map(|x| x as usize - 1);
            self.mark(v, false);
        }
    }
}

impl Iterator for StsEnumerator {
    type Item = TripleSystem;

    fn next(&mut self) -> Option<TripleSystem> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            match self.first_uncovered() {
                Some((a, b)) => self.stack.push((a, b, 0)),
                None => {
                    self.done = true;
                    return Some(TripleSystem::empty(self.n));
                }
            }
        } else {
            // resume after the last emitted complete system
            self.pop_choice();
        }
        loop {
            if self.stack.is_empty() {
                self.done = true;
                return None;
            }
            if self.chosen.len() == self.stack.len() {
                // top pair currently has a triple placed; undo it before trying the next option
                self.pop_choice();
            }
            if !self.advance_top() {
                self.stack.pop();
                continue;
            }
            if self.chosen.len() == self.target {
                return Some(TripleSystem::new(self.n, self.chosen.clone()).expect("distinct triples"));
            }
            match self.first_uncovered() {
                Some((a, b)) => self.stack.push((a, b, 0)),
                None => unreachable!("all pairs covered before reaching the triple count"),
            }
        }
    }
}

/// Smallest and largest discrepancy of any labelled system under `chi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiscrepancyRange {
    pub min: Ratio<i64>,
    pub max: Ratio<i64>,
    pub systems: usize,
}

pub fn min_max_discrepancy_oracle(chi: &Colouring) -> Result<DiscrepancyRange> {
    let n = chi.order();
    if n != 7 && n != 9 {
        return Err(Error::UnsupportedOrder { n, reason: "discrepancy oracle covers n in {7, 9}" });
    }
    let mut range: Option<DiscrepancyRange> = None;
    for s in enumerate_all_sts(n)? {
        let d = discrepancy(&s, chi)?;
        range = Some(match range {
            None => DiscrepancyRange { min: d, max: d, systems: 1 },
            Some(r) => DiscrepancyRange { min: r.min.min(d), max: r.max.max(d), systems: r.systems + 1 },
        });
    }
    Ok(range.expect("n in {7, 9} has systems"))
}
