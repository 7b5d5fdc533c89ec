//! Copies of the complete 3-partite 3-graph with parts of size 2, their
//! unique split into two Pasch configurations, and gadget detection.
//!
//! A copy is a *gadget* under a colouring when its two Pasch halves have
//! different colour profiles. Swapping one half for the other inside a
//! Steiner triple system keeps it a Steiner triple system (the halves have
//! the same 12-pair shadow) while changing its colour counts.

use std::collections::HashSet;
use std::fmt;

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{binomial, Colour, ColourCube, ColourProfile, Colouring, Triple, Vertex};
use crate::rng;

/// Default largest order for exact gadget enumeration.
pub const DEFAULT_EXACT_CAP: usize = 21;

/// Three disjoint vertex pairs in canonical form: each pair ascending, pairs
/// ordered by their smaller element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct K222Copy {
    parts: [[Vertex; 2]; 3],
}

impl K222Copy {
    pub fn new(p: [Vertex; 2], q: [Vertex; 2], s: [Vertex; 2]) -> Result<Self> {
        let mut all = [p[0], p[1], q[0], q[1], s[0], s[1]];
        if all.contains(&0) {
            return Err(Error::InvalidInput("vertices are 1-based".into()));
        }
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("parts {p:?} {q:?} {s:?} are not six distinct vertices")));
        }
        Ok(Self::canonical(p, q, s))
    }

    fn canonical(p: [Vertex; 2], q: [Vertex; 2], s: [Vertex; 2]) -> Self {
        let sort = |x: [Vertex; 2]| if x[0] < x[1] { x } else { [x[1], x[0]] };
        let mut parts = [sort(p), sort(q), sort(s)];
        parts.sort_unstable();
        K222Copy { parts }
    }

    #[inline]
    pub fn parts(&self) -> [[Vertex; 2]; 3] {
        self.parts
    }

    pub fn vertices(&self) -> [Vertex; 6] {
        let [a, b, c] = self.parts;
        [a[0], a[1], b[0], b[1], c[0], c[1]]
    }

    pub fn max_vertex(&self) -> Vertex {
        self.vertices().into_iter().max().unwrap()
    }

    /// The 12 pairs joining different parts, each ascending.
    pub fn shadow(&self) -> [(Vertex, Vertex); 12] {
        let [a, b, c] = self.parts;
        let mut out = [(0, 0); 12];
        let mut k = 0;
        for (x, y) in [(a, b), (a, c), (b, c)] {
            for &u in &x {
                for &v in &y {
                    out[k] = (u.min(v), u.max(v));
                    k += 1;
                }
            }
        }
        out
    }

    /// Applies the vertex relabelling `v -> perm[v - 1]`.
    pub fn relabel(&self, perm: &[Vertex]) -> K222Copy {
        let m = |x: [Vertex; 2]| [perm[x[0] as usize - 1], perm[x[1] as usize - 1]];
        let [a, b, c] = self.parts;
        Self::canonical(m(a), m(b), m(c))
    }
}

impl fmt::Display for K222Copy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.vertices();
        write!(f, "{} {} {} {} {} {}", v[0], v[1], v[2], v[3], v[4], v[5])
    }
}

/// Four triples forming a Pasch configuration, sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PaschConfig(pub [Triple; 4]);

impl PaschConfig {
    fn new(mut ts: [Triple; 4]) -> Self {
        ts.sort_unstable();
        PaschConfig(ts)
    }

    pub fn triples(&self) -> &[Triple; 4] {
        &self.0
    }

    pub fn profile(&self, chi: &Colouring) -> ColourProfile {
        ColourProfile::of_triples(chi, &self.0)
    }

    /// The shadow as a sorted list of pairs (with multiplicity, so 12 entries when linear).
    pub fn shadow(&self) -> Vec<(Vertex, Vertex)> {
        let mut pairs: Vec<_> = self.0.iter().flat_map(|t| t.pairs()).collect();
        pairs.sort_unstable();
        pairs
    }
}

/// Whether four triples form a Pasch configuration: six points, each on
/// exactly two triples, and every two triples meeting in exactly one point.
pub fn is_pasch(ts: &[Triple]) -> bool {
    if ts.len() != 4 {
        return false;
    }
    let mut points: Vec<Vertex> = ts.iter().flat_map(|t| t.vertices()).collect();
    points.sort_unstable();
    let distinct = {
        let mut p = points.clone();
        p.dedup();
        p
    };
    if distinct.len() != 6 || distinct.iter().any(|v| points.iter().filter(|&&w| w == *v).count() != 2) {
        return false;
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let shared = ts[i].vertices().iter().filter(|v| ts[j].contains(**v)).count();
            if shared != 1 {
                return false;
            }
        }
    }
    true
}

/// The two Pasch halves of a copy with parts `{a1,a2}, {b1,b2}, {c1,c2}`:
/// `p1 = {a1b1c1, a1b2c2, a2b1c2, a2b2c1}` and `p2` the other four triples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaschPair {
    pub p1: PaschConfig,
    pub p2: PaschConfig,
}

pub fn pasch_pair(k: &K222Copy) -> PaschPair {
    let [[a1, a2], [b1, b2], [c1, c2]] = k.parts;
    let t = Triple::from_distinct;
    PaschPair {
        p1: PaschConfig::new([t(a1, b1, c1), t(a1, b2, c2), t(a2, b1, c2), t(a2, b2, c1)]),
        p2: PaschConfig::new([t(a1, b1, c2), t(a1, b2, c1), t(a2, b1, c1), t(a2, b2, c2)]),
    }
}

/// The copy whose Pasch split contains `p`: its parts are the three
/// point pairs not covered by `p`.
pub fn copy_of_pasch(p: &PaschConfig) -> Result<K222Copy> {
    if !is_pasch(&p.0) {
        return Err(Error::InvalidInput("not a Pasch configuration".into()));
    }
    let mut points: Vec<Vertex> = p.0.iter().flat_map(|t| t.vertices()).collect();
    points.sort_unstable();
    points.dedup();
    let shadow = p.shadow();
    let mut missing = Vec::with_capacity(3);
    for i in 0..6 {
        for j in i + 1..6 {
            let pair = (points[i], points[j]);
            if shadow.binary_search(&pair).is_err() {
                missing.push([pair.0, pair.1]);
            }
        }
    }
    K222Copy::new(missing[0], missing[1], missing[2])
}

/// A gadget: its copy, the profiles of both halves, and every colour whose counts differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetRecord {
    pub copy: K222Copy,
    pub profile_p1: ColourProfile,
    pub profile_p2: ColourProfile,
    pub witness_colours: Vec<Colour>,
}

impl GadgetRecord {
    /// `max(a_c, b_c)`: the better half's count of colour `c`.
    pub fn best_count(&self, c: Colour) -> usize {
        self.profile_p1.count(c).max(self.profile_p2.count(c))
    }

    /// Which half maximizes colour `c`; ties go to `p1`.
    pub fn choose_for(&self, c: Colour) -> PaschConfig {
        let pair = pasch_pair(&self.copy);
        if self.profile_p2.count(c) > self.profile_p1.count(c) {
            pair.p2
        } else {
            pair.p1
        }
    }

    /// `sum_c max(a_c, b_c)`; at least 5 for every gadget.
    pub fn sum_of_best_counts(&self) -> usize {
        (1..=self.profile_p1.colours() as Colour).map(|c| self.best_count(c)).sum()
    }
}

fn check_copy(chi: &Colouring, k: &K222Copy) -> Result<()> {
    if k.max_vertex() as usize > chi.order() {
        return Err(Error::VertexOutOfRange { vertex: k.max_vertex(), n: chi.order() });
    }
    Ok(())
}

pub fn is_gadget(chi: &Colouring, k: &K222Copy) -> Result<Option<GadgetRecord>> {
    check_copy(chi, k)?;
    Ok(gadget_record(chi, k))
}

fn gadget_record(chi: &Colouring, k: &K222Copy) -> Option<GadgetRecord> {
    let pair = pasch_pair(k);
    let profile_p1 = pair.p1.profile(chi);
    let profile_p2 = pair.p2.profile(chi);
    let witness_colours: Vec<Colour> = (0..chi.colours())
        .filter(|&i| profile_p1.counts[i] != profile_p2.counts[i])
        .map(|i| i as Colour + 1)
        .collect();
    (!witness_colours.is_empty()).then(|| GadgetRecord { copy: *k, profile_p1, profile_p2, witness_colours })
}

/// Number of copies in `K_n^(3)`: `15 C(n, 6)`.
pub fn copy_count(n: usize) -> usize {
    15 * binomial(n, 6)
}

// Visits the canonical copies whose smallest vertex is `a1` (0-based vertices).
#[inline]
fn visit_copies_from(n: usize, a1: usize, f: &mut impl FnMut([usize; 6])) {
    for b1 in a1 + 1..n {
        for c1 in b1 + 1..n {
            for a2 in a1 + 1..n {
                if a2 == b1 || a2 == c1 {
                    continue;
                }
                for b2 in b1 + 1..n {
                    if b2 == a2 || b2 == c1 {
                        continue;
                    }
                    for c2 in c1 + 1..n {
                        if c2 == a2 || c2 == b2 {
                            continue;
                        }
                        f([a1, a2, b1, b2, c1, c2]);
                    }
                }
            }
        }
    }
}

/// Calls `f` once for every copy on `[n]`, in canonical order.
pub fn visit_copies(n: usize, mut f: impl FnMut(K222Copy)) {
    for a1 in 0..n {
        visit_copies_from(n, a1, &mut |v| {
            let v = v.map(|x| x as Vertex + 1);
            f(K222Copy { parts: [[v[0], v[1]], [v[2], v[3]], [v[4], v[5]]] })
        });
    }
}

#[inline(always)]
fn halves_differ(cube: &ColourCube, v: [usize; 6]) -> bool {
    let [a1, a2, b1, b2, c1, c2] = v;
    let mut p = [cube.get(a1, b1, c1), cube.get(a1, b2, c2), cube.get(a2, b1, c2), cube.get(a2, b2, c1)];
    let mut q = [cube.get(a1, b1, c2), cube.get(a1, b2, c1), cube.get(a2, b1, c1), cube.get(a2, b2, c2)];
    p.sort_unstable();
    q.sort_unstable();
    p != q
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GadgetCount {
    pub copies: usize,
    pub gadgets: usize,
}

impl GadgetCount {
    pub fn density(&self) -> f64 {
        if self.copies == 0 {
            0.0
        } else {
            self.gadgets as f64 / self.copies as f64
        }
    }
}

/// Counts gadgets over all `15 C(n,6)` copies. Refuses `n > cap`.
pub fn count_gadgets_exact(chi: &Colouring, cap: usize) -> Result<GadgetCount> {
    let n = chi.order();
    if n > cap {
        return Err(Error::UnsupportedOrder { n, reason: "above the exact-count cap; use sampling" });
    }
    let cube = ColourCube::new(chi);
    let gadgets = (0..n)
        .into_par_iter()
        .map(|a1| {
            let mut count = 0usize;
            visit_copies_from(n, a1, &mut |v| count += halves_differ(&cube, v) as usize);
            count
        })
        .sum();
    Ok(GadgetCount { copies: copy_count(n), gadgets })
}

/// Every gadget of `chi` in canonical order. Refuses `n > cap`.
pub fn all_gadgets(chi: &Colouring, cap: usize) -> Result<Vec<GadgetRecord>> {
    let n = chi.order();
    if n > cap {
        return Err(Error::UnsupportedOrder { n, reason: "above the exact-count cap; use sampling" });
    }
    let cube = ColourCube::new(chi);
    let per_root: Vec<Vec<GadgetRecord>> = (0..n)
        .into_par_iter()
        .map(|a1| {
            let mut out = Vec::new();
            visit_copies_from(n, a1, &mut |v| {
                if halves_differ(&cube, v) {
                    let v = v.map(|x| x as Vertex + 1);
                    let k = K222Copy { parts: [[v[0], v[1]], [v[2], v[3]], [v[4], v[5]]] };
                    out.push(gadget_record(chi, &k).expect("halves differ"));
                }
            });
            out
        })
        .collect();
    Ok(per_root.into_iter().flatten().collect())
}

/// A uniformly random copy on `[n]`, `n >= 6`.
pub fn random_copy(n: usize, g: &mut rng::Rng) -> K222Copy {
    let mut six: Vec<Vertex> = index::sample(g, n, 6).into_iter().map(|i| i as Vertex + 1).collect();
    six.shuffle(g);
    K222Copy::canonical([six[0], six[1]], [six[2], six[3]], [six[4], six[5]])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub hits: usize,
}

/// Fraction of uniformly random copies that are gadgets, with its binomial standard error.
pub fn estimate_gadget_density(chi: &Colouring, samples: usize, seed: u64) -> Result<DensityEstimate> {
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let n = chi.order();
    if n < 6 {
        return Ok(DensityEstimate { estimate: 0.0, std_error: 0.0, samples, hits: 0 });
    }
    let mut g = rng::seeded(seed);
    let hits = (0..samples).filter(|_| gadget_record(chi, &random_copy(n, &mut g)).is_some()).count();
    let p = hits as f64 / samples as f64;
    Ok(DensityEstimate { estimate: p, std_error: (p * (1.0 - p) / samples as f64).sqrt(), samples, hits })
}

/// Up to `max_count` distinct gadgets found by probing at most `budget` random copies.
pub fn collect_gadgets(chi: &Colouring, max_count: usize, budget: usize, seed: u64) -> Result<Vec<GadgetRecord>> {
    if budget < max_count {
        return Err(Error::InvalidInput(format!("budget {budget} below max_count {max_count}")));
    }
    let n = chi.order();
    let mut found = Vec::new();
    if n < 6 || max_count == 0 {
        return Ok(found);
    }
    let mut seen = HashSet::new();
    let mut g = rng::seeded(seed);
    for _ in 0..budget {
        if found.len() >= max_count {
            break;
        }
        let k = random_copy(n, &mut g);
        if !seen.insert(k) {
            continue;
        }
        if let Some(rec) = gadget_record(chi, &k) {
            found.push(rec);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{example1_colouring, random_colouring, SplitSpec};
    use crate::sts::random_permutation;

    fn t(a: Vertex, b: Vertex, c: Vertex) -> Triple {
        Triple::new(a, b, c).unwrap()
    }

    fn std_copy() -> K222Copy {
        K222Copy::new([1, 2], [3, 4], [5, 6]).unwrap()
    }

    #[test]
    fn canonical_form() {
        let a = K222Copy::new([6, 5], [2, 1], [4, 3]).unwrap();
        assert_eq!(a, std_copy());
        assert_eq!(a.parts(), [[1, 2], [3, 4], [5, 6]]);
        assert!(K222Copy::new([1, 2], [2, 3], [4, 5]).is_err());
        assert!(K222Copy::new([0, 2], [3, 4], [5, 6]).is_err());
    }

    #[test]
    fn pasch_pair_of_standard_copy() {
        let pp = pasch_pair(&std_copy());
        let p1 = PaschConfig::new([t(1, 3, 5), t(1, 4, 6), t(2, 3, 6), t(2, 4, 5)]);
        let p2 = PaschConfig::new([t(1, 3, 6), t(1, 4, 5), t(2, 3, 5), t(2, 4, 6)]);
        assert_eq!(pp.p1, p1);
        assert_eq!(pp.p2, p2);
        assert_eq!(pp.p1.shadow(), pp.p2.shadow());
        assert_eq!(pp.p1.shadow().len(), 12);
        assert!(is_pasch(&pp.p1.0) && is_pasch(&pp.p2.0));
    }

    #[test]
    fn copy_of_pasch_round_trip() {
        let k = K222Copy::new([2, 9], [4, 7], [1, 5]).unwrap();
        let pp = pasch_pair(&k);
        assert_eq!(copy_of_pasch(&pp.p1).unwrap(), k);
        assert_eq!(copy_of_pasch(&pp.p2).unwrap(), k);
        let not = PaschConfig::new([t(1, 2, 3), t(1, 4, 5), t(2, 4, 6), t(3, 5, 7)]);
        assert!(copy_of_pasch(&not).is_err());
    }

    #[test]
    fn shadow_excludes_parts() {
        let sh = std_copy().shadow();
        assert_eq!(sh.len(), 12);
        for p in [(1, 2), (3, 4), (5, 6)] {
            assert!(!sh.contains(&p));
        }
    }

    #[test]
    fn gadget_examples() {
        let mono = Colouring::monochromatic(8, 2, 1).unwrap();
        assert_eq!(is_gadget(&mono, &std_copy()).unwrap(), None);
        assert_eq!(count_gadgets_exact(&mono, DEFAULT_EXACT_CAP).unwrap().gadgets, 0);

        let mut flipped = mono.clone();
        flipped.set(&t(1, 3, 5), 2).unwrap();
        let rec = is_gadget(&flipped, &std_copy()).unwrap().unwrap();
        assert_eq!(rec.profile_p1.counts, vec![3, 1]);
        assert_eq!(rec.profile_p2.counts, vec![4, 0]);
        assert_eq!(rec.witness_colours, vec![1, 2]);

        let bad = K222Copy::new([1, 2], [3, 4], [5, 9]).unwrap();
        assert!(is_gadget(&flipped, &bad).is_err());
    }

    // brute-force oracle: all canonical copies from the definition via 6-subsets and matchings
    fn brute_copies(n: usize) -> Vec<K222Copy> {
        let mut out = HashSet::new();
        let verts: Vec<Vertex> = (1..=n as Vertex).collect();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        for e in 0..n {
                            for f in 0..n {
                                let six = [a, b, c, d, e, f];
                                let mut s = six;
                                s.sort_unstable();
                                if s.windows(2).any(|w| w[0] == w[1]) {
                                    continue;
                                }
                                out.insert(K222Copy::canonical(
                                    [verts[a], verts[b]],
                                    [verts[c], verts[d]],
                                    [verts[e], verts[f]],
                                ));
                            }
                        }
                    }
                }
            }
        }
        let mut v: Vec<_> = out.into_iter().collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn visit_copies_once_each() {
        for n in [6, 7, 8] {
            let mut seen = Vec::new();
            visit_copies(n, |k| seen.push(k));
            assert_eq!(seen.len(), copy_count(n));
            let mut sorted = seen.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), seen.len());
            assert_eq!(sorted, brute_copies(n));
        }
    }

    #[test]
    fn single_flip_gives_sixty_gadgets_at_eight() {
        let mut chi = Colouring::monochromatic(8, 2, 1).unwrap();
        chi.set(&t(1, 3, 5), 2).unwrap();
        // oracle: partners for 1, 3, 5 chosen from the 5 other points
        let mut brute = 0;
        visit_copies(8, |k| brute += gadget_record(&chi, &k).is_some() as usize);
        assert_eq!(brute, 5 * 4 * 3);
        assert_eq!(count_gadgets_exact(&chi, DEFAULT_EXACT_CAP).unwrap().gadgets, 60);
        assert_eq!(all_gadgets(&chi, DEFAULT_EXACT_CAP).unwrap().len(), 60);
    }

    #[test]
    fn example1_has_no_gadgets() {
        let chi = example1_colouring(&SplitSpec::new(12, 6)).unwrap();
        assert_eq!(count_gadgets_exact(&chi, DEFAULT_EXACT_CAP).unwrap().gadgets, 0);
        assert!(collect_gadgets(&chi, 50, 5000, 3).unwrap().is_empty());
    }

    #[test]
    fn exact_cap_enforced() {
        let chi = Colouring::monochromatic(12, 2, 1).unwrap();
        assert!(count_gadgets_exact(&chi, 10).is_err());
    }

    #[test]
    fn fast_path_agrees_with_records() {
        let chi = random_colouring(9, 3, 4).unwrap();
        let mut slow = 0;
        visit_copies(9, |k| slow += is_gadget(&chi, &k).unwrap().is_some() as usize);
        assert_eq!(count_gadgets_exact(&chi, DEFAULT_EXACT_CAP).unwrap().gadgets, slow);
    }

    #[test]
    fn density_estimate_examples() {
        let mono = Colouring::monochromatic(12, 2, 1).unwrap();
        let e = estimate_gadget_density(&mono, 500, 1).unwrap();
        assert_eq!((e.estimate, e.std_error), (0.0, 0.0));
        let chi = random_colouring(12, 2, 7).unwrap();
        let one = estimate_gadget_density(&chi, 1, 3).unwrap();
        assert!(one.estimate == 0.0 || one.estimate == 1.0);
        assert_eq!(estimate_gadget_density(&chi, 300, 9).unwrap(), estimate_gadget_density(&chi, 300, 9).unwrap());
    }

    #[test]
    fn density_estimate_within_four_standard_errors() {
        // a sparse perturbation keeps the density well inside (0, 1)
        let base = example1_colouring(&SplitSpec::new(12, 6)).unwrap();
        let chi = crate::generators::perturb(&base, 12, 5).unwrap();
        let exact = count_gadgets_exact(&chi, DEFAULT_EXACT_CAP).unwrap().density();
        assert!(exact > 0.0 && exact < 1.0);
        for seed in 0..10 {
            let e = estimate_gadget_density(&chi, 4000, seed).unwrap();
            assert!((e.estimate - exact).abs() <= 4.0 * e.std_error, "seed {seed}: {} vs {exact}", e.estimate);
        }
    }

    #[test]
    fn collect_examples() {
        let chi = random_colouring(13, 2, 21).unwrap();
        let recs = collect_gadgets(&chi, 40, 400, 5).unwrap();
        assert!(!recs.is_empty());
        let distinct: HashSet<_> = recs.iter().map(|r| r.copy).collect();
        assert_eq!(distinct.len(), recs.len());
        for r in &recs {
            assert_eq!(is_gadget(&chi, &r.copy).unwrap().as_ref(), Some(r));
            assert!(r.sum_of_best_counts() >= 5);
        }
        assert_eq!(recs, collect_gadgets(&chi, 40, 400, 5).unwrap());
        assert!(collect_gadgets(&chi, 0, 100, 5).unwrap().is_empty());
        assert!(collect_gadgets(&chi, 10, 5, 5).is_err());
    }

    #[test]
    fn gadget_count_invariant_under_relabelling() {
        let chi = random_colouring(10, 2, 77).unwrap();
        let base = count_gadgets_exact(&chi, DEFAULT_EXACT_CAP).unwrap();
        for seed in 0..5 {
            let perm = random_permutation(10, seed);
            let relabelled = chi.relabel(&perm).unwrap();
            assert_eq!(count_gadgets_exact(&relabelled, DEFAULT_EXACT_CAP).unwrap(), base);
            // and copy-by-copy
            let k = K222Copy::new([1, 4], [2, 9], [3, 7]).unwrap();
            assert_eq!(
                is_gadget(&chi, &k).unwrap().is_some(),
                is_gadget(&relabelled, &k.relabel(&perm)).unwrap().is_some()
            );
        }
    }
}
