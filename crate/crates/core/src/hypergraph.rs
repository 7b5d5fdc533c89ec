//! Vertices, triples and their colex indexing, dense colourings of the
//! complete 3-graph, triple systems, and the discrepancy functional.
//!
//! Vertices are 1-based (`1..=n`) and colours are 1-based (`1..=r`) at every
//! public boundary.

use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = u32;
pub type Colour = u8;

/// Binomial coefficient `C(n, k)` for the small `k` used throughout.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of triples of `[n]`.
#[inline]
pub fn triple_count(n: usize) -> usize {
    binomial(n, 3)
}

/// Number of pairs of `[n]`.
#[inline]
pub fn pair_count(n: usize) -> usize {
    binomial(n, 2)
}

/// Colex rank of the pair `{a < b}` (1-based vertices).
#[inline]
pub fn pair_rank(a: Vertex, b: Vertex) -> usize {
    debug_assert!(0 < a && a < b);
    let (a, b) = (a as usize - 1, b as usize - 1);
    b * (b - 1) / 2 + a
}

/// A 3-subset of `[n]`, stored ascending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple([Vertex; 3]);

impl Triple {
    /// Builds a triple from three distinct positive vertices in any order.
    pub fn new(a: Vertex, b: Vertex, c: Vertex) -> Result<Self> {
        let mut v = [a, b, c];
        v.sort_unstable();
        if v[0] == 0 {
            return Err(Error::VertexOutOfRange { vertex: 0, n: 0 });
        }
        if v[0] == v[1] || v[1] == v[2] {
            return Err(Error::DegenerateTriple([a, b, c]));
        }
        Ok(Triple(v))
    }

    /// Sorts three vertices the caller guarantees are distinct and positive.
    #[inline]
    pub(crate) fn from_distinct(a: Vertex, b: Vertex, c: Vertex) -> Self {
        let mut v = [a, b, c];
        v.sort_unstable();
        debug_assert!(v[0] > 0 && v[0] < v[1] && v[1] < v[2]);
        Triple(v)
    }

    #[inline]
    pub fn vertices(&self) -> [Vertex; 3] {
        self.0
    }

    #[inline]
    pub fn max_vertex(&self) -> Vertex {
        self.0[2]
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(&v)
    }

    /// The three pairs covered by this triple, each ascending.
    pub fn pairs(&self) -> [(Vertex, Vertex); 3] {
        let [a, b, c] = self.0;
        [(a, b), (a, c), (b, c)]
    }

    pub fn check_order(&self, n: usize) -> Result<()> {
        if self.0[2] as usize > n {
            return Err(Error::VertexOutOfRange { vertex: self.0[2], n });
        }
        Ok(())
    }

    /// Colex rank among the triples of `[n]`.
    pub fn rank(&self, n: usize) -> Result<usize> {
        self.check_order(n)?;
        Ok(self.rank_unchecked())
    }

    #[inline]
    pub(crate) fn rank_unchecked(&self) -> usize {
        let [a, b, c] = self.0;
        let (a, b, c) = (a as usize - 1, b as usize - 1, c as usize - 1);
        c * (c - 1) * (c - 2) / 6 + b * (b - 1) / 2 + a
    }

    /// Inverse of [`Triple::rank`].
    pub fn unrank(k: usize, n: usize) -> Result<Self> {
        let size = triple_count(n);
        if k >= size {
            return Err(Error::RankOutOfRange { rank: k, size });
        }
        let mut rest = k;
        // largest c (0-based) with C(c, 3) <= rest, then b, then a
        let mut c = 2;
        while binomial(c + 1, 3) <= rest {
            c += 1;
        }
        rest -= binomial(c, 3);
        let mut b = 1;
        while binomial(b + 1, 2) <= rest {
            b += 1;
        }
        rest -= binomial(b, 2);
        let a = rest;
        Ok(Triple([a as Vertex + 1, b as Vertex + 1, c as Vertex + 1]))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.0[0], self.0[1], self.0[2])
    }
}

/// Free-function form of [`Triple::rank`].
pub fn triple_rank(t: &Triple, n: usize) -> Result<usize> {
    t.rank(n)
}

/// Free-function form of [`Triple::unrank`].
pub fn triple_unrank(k: usize, n: usize) -> Result<Triple> {
    Triple::unrank(k, n)
}

/// An `r`-colouring of all `C(n,3)` triples, stored densely in colex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Colouring {
    n: usize,
    r: usize,
    values: Vec<Colour>,
}

impl Colouring {
    pub fn monochromatic(n: usize, r: usize, colour: Colour) -> Result<Self> {
        check_palette(r)?;
        check_colour(colour, r)?;
        Ok(Colouring { n, r, values: vec![colour; triple_count(n)] })
    }

    /// Wraps a dense colex-ordered array of 1-based colour ids.
    pub fn from_values(n: usize, r: usize, values: Vec<Colour>) -> Result<Self> {
        check_palette(r)?;
        if values.len() != triple_count(n) {
            return Err(Error::InvalidInput(format!(
                "colouring of order {n} needs {} values, got {}",
                triple_count(n),
                values.len()
            )));
        }
        if let Some(&bad) = values.iter().find(|&&c| c == 0 || c as usize > r) {
            return Err(Error::ColourOutOfRange { colour: bad, r });
        }
        Ok(Colouring { n, r, values })
    }

    /// Builds a colouring by evaluating `f` on every triple in colex order.
    pub fn from_fn(n: usize, r: usize, mut f: impl FnMut(Triple) -> Colour) -> Result<Self> {
        let values = TripleIter::new(n).map(&mut f).collect();
        Self::from_values(n, r, values)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn colours(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn values(&self) -> &[Colour] {
        &self.values
    }

    #[inline]
    pub fn get(&self, t: &Triple) -> Colour {
        self.values[t.rank_unchecked()]
    }

    /// Colour of `{a, b, c}` given in any order.
    #[inline]
    pub fn colour_of(&self, a: Vertex, b: Vertex, c: Vertex) -> Colour {
        self.get(&Triple::from_distinct(a, b, c))
    }

    #[inline]
    pub fn get_rank(&self, k: usize) -> Colour {
        self.values[k]
    }

    pub fn set(&mut self, t: &Triple, colour: Colour) -> Result<()> {
        check_colour(colour, self.r)?;
        t.check_order(self.n)?;
        let k = t.rank_unchecked();
        self.values[k] = colour;
        Ok(())
    }

    /// Reinterprets the colouring in a palette of `r` colours (`r` at least the current one).
    pub fn with_palette(mut self, r: usize) -> Result<Self> {
        if r < self.r {
            return Err(Error::InvalidInput(format!("cannot shrink palette from {} to {r}", self.r)));
        }
        self.r = r;
        Ok(self)
    }

    /// Number of triples of each colour, indexed by `colour - 1`.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.r];
        for &c in &self.values {
            counts[c as usize - 1] += 1;
        }
        counts
    }

    /// Number of triples on which the two colourings differ.
    pub fn hamming_distance(&self, other: &Colouring) -> Result<usize> {
        if self.n != other.n {
            return Err(Error::OrderMismatch { left: self.n, right: other.n });
        }
        Ok(self.values.iter().zip(&other.values).filter(|(a, b)| a != b).count())
    }

    /// Applies the vertex relabelling `v -> perm[v - 1]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Result<Colouring> {
        check_permutation(perm, self.n)?;
        let mut values = vec![0; self.values.len()];
        for (k, t) in TripleIter::new(self.n).enumerate() {
            let [a, b, c] = t.vertices();
            let image = Triple::from_distinct(
                perm[a as usize - 1],
                perm[b as usize - 1],
                perm[c as usize - 1],
            );
            values[image.rank_unchecked()] = self.values[k];
        }
        Ok(Colouring { n: self.n, r: self.r, values })
    }
}

fn check_palette(r: usize) -> Result<()> {
    if r < 2 {
        return Err(Error::TooFewColours(r));
    }
    if r > Colour::MAX as usize {
        return Err(Error::InvalidInput(format!("at most {} colours supported", Colour::MAX)));
    }
    Ok(())
}

pub(crate) fn check_colour(colour: Colour, r: usize) -> Result<()> {
    if colour == 0 || colour as usize > r {
        return Err(Error::ColourOutOfRange { colour, r });
    }
    Ok(())
}

pub(crate) fn check_permutation(perm: &[Vertex], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidInput(format!("permutation of length {} for order {n}", perm.len())));
    }
    let mut seen = vec![false; n];
    for &v in perm {
        if v == 0 || v as usize > n || std::mem::replace(&mut seen[v as usize - 1], true) {
            return Err(Error::InvalidInput(format!("not a permutation of [{n}]")));
        }
    }
    Ok(())
}

/// Iterates the triples of `[n]` in colex order.
#[derive(Clone, Debug)]
pub struct TripleIter {
    n: Vertex,
    next: Option<[Vertex; 3]>,
}

impl TripleIter {
    pub fn new(n: usize) -> Self {
        let next = (n >= 3).then_some([1, 2, 3]);
        TripleIter { n: n as Vertex, next }
    }

    /// Continues colex iteration from `t` inclusive.
    pub fn starting_at(t: Triple, n: usize) -> Self {
        TripleIter { n: n as Vertex, next: Some(t.vertices()) }
    }
}

impl Iterator for TripleIter {
    type Item = Triple;

    fn next(&mut self) -> Option<Triple> {
        let cur = self.next?;
        let [a, b, c] = cur;
        self.next = if a + 1 < b {
            Some([a + 1, b, c])
        } else if b + 1 < c {
            Some([1, b + 1, c])
        } else if c < self.n {
            Some([1, 2, c + 1])
        } else {
            None
        };
        Some(Triple(cur))
    }
}

/// A dense `n x n x n` colour lookup used by the hot enumeration loops.
/// Vertices are 0-based here.
#[derive(Clone, Debug)]
pub struct ColourCube {
    n: usize,
    cells: Vec<Colour>,
}

impl ColourCube {
    pub fn new(chi: &Colouring) -> Self {
        let n = chi.order();
        let mut cells = vec![0; n * n * n];
        for (k, t) in TripleIter::new(n).enumerate() {
            let [a, b, c] = t.vertices().map(|v| v as usize - 1);
            let colour = chi.get_rank(k);
            for (x, y, z) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                cells[(x * n + y) * n + z] = colour;
            }
        }
        ColourCube { n, cells }
    }

    #[inline(always)]
    pub fn get(&self, a: usize, b: usize, c: usize) -> Colour {
        self.cells[(a * self.n + b) * self.n + c]
    }
}

/// A set of triples on `[n]`. Triples are pairwise distinct; no pair-coverage
/// property is implied (see [`crate::sts::validate_sts`]).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleSystem {
    n: usize,
    triples: Vec<Triple>,
}

impl TripleSystem {
    pub fn new(n: usize, triples: Vec<Triple>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(triples.len());
        for t in &triples {
            t.check_order(n)?;
            if !seen.insert(*t) {
                return Err(Error::DuplicateTriple(t.vertices()));
            }
        }
        Ok(TripleSystem { n, triples })
    }

    pub fn empty(n: usize) -> Self {
        TripleSystem { n, triples: Vec::new() }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn into_triples(self) -> Vec<Triple> {
        self.triples
    }

    /// The triples sorted ascending; equal systems have equal canonical forms.
    pub fn canonical(&self) -> Vec<Triple> {
        let mut ts = self.triples.clone();
        ts.sort_unstable();
        ts
    }

    pub fn sorted(mut self) -> Self {
        self.triples.sort_unstable();
        self
    }

    /// Applies the vertex relabelling `v -> perm[v - 1]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Result<TripleSystem> {
        check_permutation(perm, self.n)?;
        let triples = self
            .triples
            .iter()
            .map(|t| {
                let [a, b, c] = t.vertices();
                Triple::from_distinct(perm[a as usize - 1], perm[b as usize - 1], perm[c as usize - 1])
            })
            .collect();
        Ok(TripleSystem { n: self.n, triples })
    }
}

/// Per-colour triple counts of a system; `counts[c - 1]` is the count of colour `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColourProfile {
    pub counts: Vec<usize>,
}

impl ColourProfile {
    pub fn zero(r: usize) -> Self {
        ColourProfile { counts: vec![0; r] }
    }

    pub fn of_triples<'a>(chi: &Colouring, triples: impl IntoIterator<Item = &'a Triple>) -> Self {
        let mut p = Self::zero(chi.colours());
        for t in triples {
            p.counts[chi.get(t) as usize - 1] += 1;
        }
        p
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn count(&self, colour: Colour) -> usize {
        self.counts[colour as usize - 1]
    }

    pub fn colours(&self) -> usize {
        self.counts.len()
    }

    /// Colour with the largest count; ties go to the smallest id.
    pub fn leading_colour(&self) -> Colour {
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        best as Colour + 1
    }

    /// `r * max_c (count_c - total / r)`, exact.
    pub fn discrepancy(&self) -> Result<Ratio<i64>> {
        let total = self.total();
        if total == 0 {
            return Err(Error::EmptySystem);
        }
        let r = self.counts.len() as i64;
        let max = *self.counts.iter().max().expect("palette is non-empty") as i64;
        // r * (max - total / r) with the division kept exact
        Ok(Ratio::from_integer(r) * (Ratio::from_integer(max) - Ratio::new(total as i64, r)))
    }
}

/// Counts the triples of `s` in each colour of `chi`.
pub fn colour_profile(s: &TripleSystem, chi: &Colouring) -> Result<ColourProfile> {
    if s.order() != chi.order() {
        return Err(Error::OrderMismatch { left: s.order(), right: chi.order() });
    }
    Ok(ColourProfile::of_triples(chi, s.triples()))
}

/// Discrepancy of `s` under `chi`: `r * max_c (|c(s)| - |s| / r)`.
pub fn discrepancy(s: &TripleSystem, chi: &Colouring) -> Result<Ratio<i64>> {
    if s.is_empty() {
        return Err(Error::EmptySystem);
    }
    colour_profile(s, chi)?.discrepancy()
}
