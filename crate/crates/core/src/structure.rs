//! Structure of 2-colourings without gadgets.
//!
//! For a 2-colouring `chi` and distinct points `x, y`, the pair colouring
//! `f_xy(uv) = chi(xuv) - chi(yuv)` is a `{0, ±1}` colouring of the pairs of
//! `[n] \ {x, y}`. A copy with parts `{x,y}, {a,c}, {b,d}` is not a gadget
//! exactly when `f_xy(ab) + f_xy(cd) = f_xy(bc) + f_xy(ad)`, so colourings
//! without gadgets give pair colourings without unbalanced 4-cycles. Those
//! are either all zero (the pair is *even*) or `+1` inside one part, `-1`
//! inside the other and `0` across (the pair is *odd*), up to a few points.
//! Parities compose like a sum mod 2, which recovers the split `X | Y`.

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{binomial, pair_count, pair_rank, Colour, Colouring, Triple, TripleIter, Vertex};
use crate::rng;

/// A `{0, ±1}` colouring of the pairs of some point set.
pub trait SignedPairMap {
    /// Order of the ambient ground set `[n]`.
    fn order(&self) -> usize;
    /// The points the map is defined on, ascending.
    fn domain(&self) -> Vec<Vertex>;
    /// Value on `{u, v}`, both in the domain and distinct.
    fn value(&self, u: Vertex, v: Vertex) -> i8;
}

/// `f_xy` for a 2-colouring, stored over all pairs of `[n]`; pairs touching
/// `x` or `y` are outside the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairColouring {
    n: usize,
    x: Vertex,
    y: Vertex,
    values: Vec<i8>,
}

impl PairColouring {
    pub fn anchors(&self) -> (Vertex, Vertex) {
        (self.x, self.y)
    }

    pub fn zero_count(&self) -> usize {
        let d = self.domain();
        let mut zeros = 0;
        for (i, &u) in d.iter().enumerate() {
            for &v in &d[i + 1..] {
                zeros += (self.value(u, v) == 0) as usize;
            }
        }
        zeros
    }
}

impl SignedPairMap for PairColouring {
    fn order(&self) -> usize {
        self.n
    }

    fn domain(&self) -> Vec<Vertex> {
        (1..=self.n as Vertex).filter(|&v| v != self.x && v != self.y).collect()
    }

    #[inline]
    fn value(&self, u: Vertex, v: Vertex) -> i8 {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.values[pair_rank(a, b)]
    }
}

fn require_two_colours(chi: &Colouring) -> Result<()> {
    if chi.colours() != 2 {
        return Err(Error::InvalidInput(format!(
            "pair colourings need a 2-colouring, got r = {} (merge colours first)",
            chi.colours()
        )));
    }
    Ok(())
}

fn check_anchor(n: usize, v: Vertex) -> Result<()> {
    if v == 0 || v as usize > n {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    Ok(())
}

pub fn pair_colouring(chi: &Colouring, x: Vertex, y: Vertex) -> Result<PairColouring> {
    require_two_colours(chi)?;
    let n = chi.order();
    check_anchor(n, x)?;
    check_anchor(n, y)?;
    if x == y {
        return Err(Error::InvalidInput("pair colouring needs two distinct points".into()));
    }
    let mut values = vec![0i8; pair_count(n)];
    for v in 1..=n as Vertex {
        if v == x || v == y {
            continue;
        }
        for u in 1..v {
            if u == x || u == y {
                continue;
            }
            values[pair_rank(u, v)] = chi.colour_of(x, u, v) as i8 - chi.colour_of(y, u, v) as i8;
        }
    }
    Ok(PairColouring { n, x, y, values })
}

/// Four distinct points `a, b, c, d` with `f(ab) + f(cd) != f(bc) + f(da)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct C4Witness {
    pub vertices: [Vertex; 4],
    /// `[f(ab), f(bc), f(cd), f(da)]`
    pub values: [i8; 4],
}

impl C4Witness {
    pub fn is_unbalanced(&self) -> bool {
        let [ab, bc, cd, da] = self.values;
        ab + cd != bc + da
    }
}

/// Largest domain scanned exhaustively by [`find_unbalanced_c4`].
pub const C4_EXHAUSTIVE_CAP: usize = 128;
/// Random 4-sets inspected beyond the exhaustive cap.
pub const C4_SAMPLES: usize = 2_000_000;

fn c4_on_fourset<F: SignedPairMap + ?Sized>(f: &F, q: [Vertex; 4]) -> Option<C4Witness> {
    let [a, b, c, d] = q;
    // the three 4-cycles on {a, b, c, d}
    for [p, r, s, t] in [[a, b, c, d], [a, b, d, c], [a, c, b, d]] {
        let w = C4Witness { vertices: [p, r, s, t], values: [f.value(p, r), f.value(r, s), f.value(s, t), f.value(t, p)] };
        if w.is_unbalanced() {
            return Some(w);
        }
    }
    None
}

/// First unbalanced 4-cycle in lexicographic order over `(a, b, c, d)`.
/// Exhaustive up to [`C4_EXHAUSTIVE_CAP`] domain points, sampled beyond.
pub fn find_unbalanced_c4<F: SignedPairMap + ?Sized>(f: &F) -> Option<C4Witness> {
    let d = f.domain();
    let m = d.len();
    if m < 4 {
        return None;
    }
    if m <= C4_EXHAUSTIVE_CAP {
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    for l in k + 1..m {
                        if let Some(w) = c4_on_fourset(f, [d[i], d[j], d[k], d[l]]) {
                            return Some(w);
                        }
                    }
                }
            }
        }
        return None;
    }
    let mut g = rng::seeded(0);
    for _ in 0..C4_SAMPLES {
        let mut idx: Vec<usize> = rand::seq::index::sample(&mut g, m, 4).into_vec();
        idx.sort_unstable();
        if let Some(w) = c4_on_fourset(f, [d[idx[0]], d[idx[1]], d[idx[2]], d[idx[3]]]) {
            return Some(w);
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn compose(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Outcome of classifying a `{0, ±1}` pair colouring.
///
/// Even: all values are 0 after deleting `exceptional_set`. Odd: `+1` inside
/// `A`, `-1` inside `B`, `0` across, after deleting `exceptional_set`.
/// `fit_defect` counts the pairs among the kept points that break the pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairClassification {
    pub parity: Parity,
    pub exceptional_set: Vec<Vertex>,
    pub partition: Option<(Vec<Vertex>, Vec<Vertex>)>,
    pub fit_defect: usize,
}

// inclusion-maximal matching of the pairs with value `sign`, scanning pairs lexicographically
fn greedy_matching<F: SignedPairMap + ?Sized>(f: &F, d: &[Vertex], sign: i8) -> Vec<Vertex> {
    let mut used = vec![false; d.len()];
    for i in 0..d.len() {
        if used[i] {
            continue;
        }
        for j in i + 1..d.len() {
            if !used[j] && f.value(d[i], d[j]) == sign {
                used[i] = true;
                used[j] = true;
                break;
            }
        }
    }
    d.iter().zip(used).filter(|(_, u)| *u).map(|(&v, _)| v).collect()
}

// Minimum vertex cover of a bipartite graph (Konig); adjacency from left index to right indices.
fn min_vertex_cover(left: usize, right: usize, adj: &[Vec<usize>]) -> (Vec<usize>, Vec<usize>) {
    let mut match_r: Vec<Option<usize>> = vec![None; right];
    let mut match_l: Vec<Option<usize>> = vec![None; left];

    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        match_l: &mut [Option<usize>],
        match_r: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if match_r[v].is_none() || augment(match_r[v].unwrap(), adj, seen, match_l, match_r) {
                match_r[v] = Some(u);
                match_l[u] = Some(v);
                return true;
            }
        }
        false
    }

    for u in 0..left {
        let mut seen = vec![false; right];
        augment(u, adj, &mut seen, &mut match_l, &mut match_r);
    }
    // alternating reachability from unmatched left vertices
    let mut vis_l = vec![false; left];
    let mut vis_r = vec![false; right];
    let mut stack: Vec<usize> = (0..left).filter(|&u| match_l[u].is_none()).collect();
    for &u in &stack {
        vis_l[u] = true;
    }
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !vis_r[v] && match_l[u] != Some(v) {
                vis_r[v] = true;
                if let Some(w) = match_r[v] {
                    if !vis_l[w] {
                        vis_l[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
    }
    let cover_l = (0..left).filter(|&u| !vis_l[u]).collect();
    let cover_r = (0..right).filter(|&v| vis_r[v]).collect();
    (cover_l, cover_r)
}

fn odd_expected(a_side: bool, b_side: bool) -> i8 {
    match (a_side, b_side) {
        (true, true) => 1,
        (false, false) => -1,
        _ => 0,
    }
}

fn even_candidate<F: SignedPairMap + ?Sized>(f: &F, d: &[Vertex], v1: &[Vertex], vm1: &[Vertex]) -> PairClassification {
    let mut exceptional: Vec<Vertex> = v1.iter().chain(vm1).copied().collect();
    exceptional.sort_unstable();
    exceptional.dedup();
    let mut kept: Vec<Vertex> = d.iter().copied().filter(|v| exceptional.binary_search(v).is_err()).collect();
    // put back exceptional points that are all-zero towards the kept points
    let mut still = Vec::new();
    for &v in &exceptional {
        if kept.iter().all(|&u| f.value(u, v) == 0) {
            kept.push(v);
        } else {
            still.push(v);
        }
    }
    kept.sort_unstable();
    let mut fit_defect = 0;
    for (i, &u) in kept.iter().enumerate() {
        for &v in &kept[i + 1..] {
            fit_defect += (f.value(u, v) != 0) as usize;
        }
    }
    PairClassification { parity: Parity::Even, exceptional_set: still, partition: None, fit_defect }
}

fn odd_candidate<F: SignedPairMap + ?Sized>(f: &F, d: &[Vertex], v1: &[Vertex], vm1: &[Vertex]) -> PairClassification {
    let in_v1 = |v: &Vertex| v1.binary_search(v).is_ok();
    let in_vm1 = |v: &Vertex| vm1.binary_search(v).is_ok();
    let mut exceptional: Vec<Vertex> = d.iter().copied().filter(|v| !in_v1(v) && !in_vm1(v)).collect();
    let mut a: Vec<Vertex> = v1.to_vec();
    let mut b: Vec<Vertex> = vm1.iter().copied().filter(|v| !in_v1(v)).collect();

    // nonzero pairs across A-B must be covered by deleted points
    let adj: Vec<Vec<usize>> = a
        .iter()
        .map(|&u| (0..b.len()).filter(|&j| f.value(u, b[j]) != 0).collect())
        .collect();
    let (cover_a, cover_b) = min_vertex_cover(a.len(), b.len(), &adj);
    exceptional.extend(cover_a.iter().map(|&i| a[i]));
    exceptional.extend(cover_b.iter().map(|&j| b[j]));
    exceptional.sort_unstable();
    a.retain(|v| exceptional.binary_search(v).is_err());
    b.retain(|v| exceptional.binary_search(v).is_err());

    // put back exceptional points that fit one side with no violation
    let mut still = Vec::new();
    for &v in &exceptional {
        let fits_a = a.iter().all(|&u| f.value(u, v) == 1) && b.iter().all(|&u| f.value(u, v) == 0);
        let fits_b = a.iter().all(|&u| f.value(u, v) == 0) && b.iter().all(|&u| f.value(u, v) == -1);
        if fits_a {
            a.push(v);
        } else if fits_b {
            b.push(v);
        } else {
            still.push(v);
        }
    }
    a.sort_unstable();
    b.sort_unstable();

    let mut kept: Vec<(Vertex, bool)> = a.iter().map(|&v| (v, true)).chain(b.iter().map(|&v| (v, false))).collect();
    kept.sort_unstable();
    let mut fit_defect = 0;
    for (i, &(u, su)) in kept.iter().enumerate() {
        for &(v, sv) in &kept[i + 1..] {
            fit_defect += (f.value(u, v) != odd_expected(su, sv)) as usize;
        }
    }
    PairClassification { parity: Parity::Odd, exceptional_set: still, partition: Some((a, b)), fit_defect }
}

/// Classifies a `{0, ±1}` pair colouring as even or odd.
///
/// Builds inclusion-maximal matchings `M1`, `M-1` of the `+1` and `-1` pairs.
/// Even candidate: delete `V(M1) ∪ V(M-1)`. Odd candidate: delete the
/// unmatched points, set `A = V(M1)`, `B = V(M-1) \ A`, and delete a minimum
/// vertex cover of the nonzero pairs between `A` and `B`. Deleted points that
/// fit the pattern without violations are put back. The candidate leaving
/// fewer pairs unexplained wins (pattern violations plus pairs touching a
/// deleted point), ties going to even.
pub fn classify_zpm<F: SignedPairMap + ?Sized>(f: &F) -> PairClassification {
    let d = f.domain();
    let v1 = greedy_matching(f, &d, 1);
    let vm1 = greedy_matching(f, &d, -1);
    let even = even_candidate(f, &d, &v1, &vm1);
    let odd = odd_candidate(f, &d, &v1, &vm1);
    let unexplained = |c: &PairClassification| {
        let kept = d.len() - c.exceptional_set.len();
        c.fit_defect + binomial(d.len(), 2) - binomial(kept, 2)
    };
    if (unexplained(&odd), odd.exceptional_set.len()) < (unexplained(&even), even.exceptional_set.len()) {
        odd
    } else {
        even
    }
}

/// Domain size below which parity is computed from every pair.
pub const DEFAULT_PARITY_SAMPLE_SIZE: usize = 4096;

/// A pair is even when more than this fraction of `f_xy` is zero.
pub const EVEN_ZERO_FRACTION: f64 = 0.75;

/// Parity of `xy` from the zero fraction of `f_xy`: even iff more than three
/// quarters of the values are zero. Exact when `C(n-2, 2) <= sample_size`.
pub fn pair_parity(chi: &Colouring, x: Vertex, y: Vertex, sample_size: usize, seed: u64) -> Result<Parity> {
    require_two_colours(chi)?;
    let n = chi.order();
    check_anchor(n, x)?;
    check_anchor(n, y)?;
    if x == y {
        return Err(Error::InvalidInput("parity needs two distinct points".into()));
    }
    let d: Vec<Vertex> = (1..=n as Vertex).filter(|&v| v != x && v != y).collect();
    let total = binomial(d.len(), 2);
    if total == 0 {
        return Ok(Parity::Even);
    }
    let f = |u: Vertex, v: Vertex| chi.colour_of(x, u, v) as i8 - chi.colour_of(y, u, v) as i8;
    let (zeros, seen) = if total <= sample_size {
        let mut zeros = 0;
        for (i, &u) in d.iter().enumerate() {
            for &v in &d[i + 1..] {
                zeros += (f(u, v) == 0) as usize;
            }
        }
        (zeros, total)
    } else {
        let mut g = rng::seeded(seed);
        let mut zeros = 0;
        for _ in 0..sample_size {
            let i = g.gen_range(0..d.len());
            let mut j = g.gen_range(0..d.len() - 1);
            if j >= i {
                j += 1;
            }
            zeros += (f(d[i], d[j]) == 0) as usize;
        }
        (zeros, sample_size)
    };
    // zeros / seen > 3/4 without floating point
    Ok(if 4 * zeros > 3 * seen { Parity::Even } else { Parity::Odd })
}

/// Recovered split `X | Y` with its inside/cross colours and the exact number
/// of triples that disagree with the ideal split colouring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub x: Vec<Vertex>,
    pub y: Vec<Vertex>,
    pub inside_colour: Colour,
    pub cross_colour: Colour,
    pub mismatch_count: usize,
    pub total_triples: usize,
}

impl StructureReport {
    pub fn mismatch_fraction(&self) -> f64 {
        if self.total_triples == 0 {
            0.0
        } else {
            self.mismatch_count as f64 / self.total_triples as f64
        }
    }

    /// The partition with the side holding point 1 first, so splits compare up to swapping.
    pub fn unordered_partition(&self) -> (Vec<Vertex>, Vec<Vertex>) {
        canonical_split(self.x.clone(), self.y.clone())
    }
}

/// Orders a two-part split so the part containing point 1 comes first.
pub fn canonical_split(p: Vec<Vertex>, q: Vec<Vertex>) -> (Vec<Vertex>, Vec<Vertex>) {
    if q.contains(&1) {
        (q, p)
    } else {
        (p, q)
    }
}

pub fn recover_partition(chi: &Colouring, seed: u64) -> Result<StructureReport> {
    recover_partition_with(chi, DEFAULT_PARITY_SAMPLE_SIZE, seed)
}

/// Anchors at point 1: `X = {1} ∪ {v : 1v even}`, `Y` the rest. Inside and
/// cross colours are majority votes (ties to colour 1).
pub fn recover_partition_with(chi: &Colouring, sample_size: usize, seed: u64) -> Result<StructureReport> {
    require_two_colours(chi)?;
    let n = chi.order();
    let mut in_x = vec![false; n + 1];
    if n >= 1 {
        in_x[1] = true;
    }
    for v in 2..=n as Vertex {
        in_x[v as usize] = pair_parity(chi, 1, v, sample_size, rng::derive(seed, v as u64))? == Parity::Even;
    }
    let is_cross = |t: &Triple| {
        let k = t.vertices().iter().filter(|&&v| in_x[v as usize]).count();
        k == 1 || k == 2
    };

    // per-colour tallies for inside and cross triples, in parallel over colex chunks
    let total = crate::hypergraph::triple_count(n);
    let chunk = 1 << 14;
    let tallies = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|ci| {
            let start = ci * chunk;
            let end = (start + chunk).min(total);
            let mut tally = [[0usize; 2]; 2]; // [inside|cross][colour - 1]
            let first = Triple::unrank(start, n).expect("rank in range");
            let mut iter = TripleIter::starting_at(first, n);
            for k in start..end {
                let t = iter.next().expect("colex iteration");
                tally[is_cross(&t) as usize][chi.get_rank(k) as usize - 1] += 1;
            }
            tally
        })
        .reduce(|| [[0; 2]; 2], |a, b| [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]);

    let majority = |t: [usize; 2]| if t[1] > t[0] { 2 } else { 1 };
    let inside_colour = majority(tallies[0]);
    let cross_colour = majority(tallies[1]);
    let mismatch_count =
        tallies[0][(inside_colour - 1) as usize ^ 1] + tallies[1][(cross_colour - 1) as usize ^ 1];

    let x = (1..=n as Vertex).filter(|&v| in_x[v as usize]).collect();
    let y = (1..=n as Vertex).filter(|&v| !in_x[v as usize]).collect();
    Ok(StructureReport { x, y, inside_colour, cross_colour, mismatch_count, total_triples: total })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AdditivityCheck {
    pub checked: usize,
    pub violations: usize,
}

/// Checks `parity(xz) = parity(xy) + parity(yz)` on point triples: every
/// triple when `trials >= C(n, 3)`, otherwise `trials` random ones.
/// Parities are computed exactly.
pub fn parity_additivity_check(chi: &Colouring, trials: usize, seed: u64) -> Result<AdditivityCheck> {
    require_two_colours(chi)?;
    let n = chi.order();
    let mut memo: Vec<Option<Parity>> = vec![None; n * n];
    let mut parity = |a: Vertex, b: Vertex| -> Result<Parity> {
        let (a, b) = (a.min(b), a.max(b));
        let slot = (a as usize - 1) * n + (b as usize - 1);
        if let Some(p) = memo[slot] {
            return Ok(p);
        }
        let p = pair_parity(chi, a, b, usize::MAX, 0)?;
        memo[slot] = Some(p);
        Ok(p)
    };
    let mut check = |t: [Vertex; 3]| -> Result<bool> {
        let [x, y, z] = t;
        Ok(parity(x, y)?.compose(parity(y, z)?) != parity(x, z)?)
    };
    let total = crate::hypergraph::triple_count(n);
    let mut violations = 0;
    let checked = if trials >= total {
        for t in TripleIter::new(n) {
            violations += check(t.vertices())? as usize;
        }
        total
    } else {
        let mut g = rng::seeded(seed);
        for _ in 0..trials {
            let idx = rand::seq::index::sample(&mut g, n, 3).into_vec();
            violations += check([idx[0] as Vertex + 1, idx[1] as Vertex + 1, idx[2] as Vertex + 1])? as usize;
        }
        trials
    };
    Ok(AdditivityCheck { checked, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{count_gadgets_exact, DEFAULT_EXACT_CAP};
    use crate::generators::{
        example1_colouring, perturb, random_colouring, structured_zpm, EdgeColouringZpm, SplitSpec,
    };
    use proptest::prelude::*;

    // reference scan straight from the definition: every ordered 4-tuple of distinct points
    fn reference_has_unbalanced<F: SignedPairMap>(f: &F) -> bool {
        let d = f.domain();
        for &a in &d {
            for &b in &d {
                for &c in &d {
                    for &e in &d {
                        let q = [a, b, c, e];
                        if (0..4).any(|i| (i + 1..4).any(|j| q[i] == q[j])) {
                            continue;
                        }
                        if f.value(a, b) + f.value(c, e) != f.value(b, c) + f.value(a, e) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn pair_colouring_examples() {
        let mono = Colouring::monochromatic(8, 2, 2).unwrap();
        let f = pair_colouring(&mono, 1, 2).unwrap();
        assert_eq!(f.zero_count(), binomial(6, 2));

        let chi = example1_colouring(&SplitSpec::new(10, 4)).unwrap();
        let same_side = pair_colouring(&chi, 1, 3).unwrap();
        assert_eq!(same_side.zero_count(), binomial(8, 2));
        let across = pair_colouring(&chi, 2, 7).unwrap();
        for u in across.domain() {
            for v in across.domain() {
                if u < v {
                    let same = (u <= 4) == (v <= 4);
                    assert_eq!(across.value(u, v) != 0, same, "{u} {v}");
                }
            }
        }
        assert!(pair_colouring(&random_colouring(6, 3, 1).unwrap(), 1, 2).is_err());
        assert!(pair_colouring(&mono, 3, 3).is_err());
    }

    #[test]
    fn c4_examples() {
        assert_eq!(find_unbalanced_c4(&EdgeColouringZpm::zero(9)), None);
        for a_size in 0..=12 {
            assert_eq!(find_unbalanced_c4(&structured_zpm(12, a_size).unwrap()), None);
        }
        let mut f = EdgeColouringZpm::zero(6);
        f.set(1, 2, 1).unwrap();
        f.set(3, 4, 1).unwrap();
        let w = find_unbalanced_c4(&f).unwrap();
        assert!(w.is_unbalanced());
        assert_eq!(w.vertices, [1, 2, 3, 4]);
    }

    #[test]
    fn c4_agrees_with_reference_scan() {
        let mut found = 0;
        for seed in 0..300 {
            let f = EdgeColouringZpm::random(7, seed);
            let w = find_unbalanced_c4(&f);
            assert_eq!(w.is_some(), reference_has_unbalanced(&f));
            if let Some(w) = w {
                found += 1;
                let [a, b, c, d] = w.vertices;
                assert_eq!(w.values, [f.value(a, b), f.value(b, c), f.value(c, d), f.value(d, a)]);
                assert!(w.is_unbalanced());
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn classify_examples() {
        let c = classify_zpm(&EdgeColouringZpm::zero(10));
        assert_eq!((c.parity, c.exceptional_set.len(), c.fit_defect), (Parity::Even, 0, 0));

        let c = classify_zpm(&structured_zpm(12, 5).unwrap());
        assert_eq!(c.parity, Parity::Odd);
        assert_eq!(c.fit_defect, 0);
        assert!(c.exceptional_set.len() <= 8);
        let (a, b) = c.partition.unwrap();
        assert!(a.iter().all(|&v| v <= 5) && b.iter().all(|&v| v > 5));
        assert_eq!(a.len() + b.len() + c.exceptional_set.len(), 12);
    }

    #[test]
    fn classify_structured_is_exact() {
        for n in 4..=14 {
            for a_size in 0..=n {
                let c = classify_zpm(&structured_zpm(n, a_size).unwrap());
                assert_eq!(c.fit_defect, 0);
                assert!(c.exceptional_set.is_empty(), "n={n} a={a_size}: {c:?}");
                match c.parity {
                    Parity::Odd => {
                        let (a, b) = c.partition.unwrap();
                        let expect_a: Vec<Vertex> = (1..=a_size as Vertex).collect();
                        let expect_b: Vec<Vertex> = (a_size as Vertex + 1..=n as Vertex).collect();
                        // a one-point side is ambiguous: its point has no inside pair
                        if a_size >= 2 && n - a_size >= 2 {
                            assert_eq!((a, b), (expect_a, expect_b), "n={n} a={a_size}");
                        }
                    }
                    Parity::Even => panic!("structured input classified even at n={n} a={a_size}"),
                }
            }
        }
    }

    #[test]
    fn classify_tolerates_one_flipped_pair() {
        for (u, v) in [(1, 2), (2, 9), (7, 12), (3, 4)] {
            let mut f = structured_zpm(12, 5).unwrap();
            let old = f.value(u, v);
            f.set(u, v, if old == 0 { 1 } else { 0 }).unwrap();
            let c = classify_zpm(&f);
            assert_eq!(c.parity, Parity::Odd, "flip {u}{v}: {c:?}");
            assert!(c.fit_defect <= 2, "{c:?}");
            assert!(c.exceptional_set.len() <= 2, "{c:?}");
        }
    }

    #[test]
    fn parity_examples() {
        let chi = example1_colouring(&SplitSpec::new(12, 6)).unwrap();
        assert_eq!(pair_parity(&chi, 1, 4, 10_000, 0).unwrap(), Parity::Even);
        assert_eq!(pair_parity(&chi, 2, 9, 10_000, 0).unwrap(), Parity::Odd);
        let mono = Colouring::monochromatic(12, 2, 1).unwrap();
        assert_eq!(pair_parity(&mono, 5, 11, 10_000, 0).unwrap(), Parity::Even);
        // sampled path
        let big = example1_colouring(&SplitSpec::new(30, 15)).unwrap();
        assert_eq!(pair_parity(&big, 1, 2, 200, 4).unwrap(), Parity::Even);
        assert_eq!(pair_parity(&big, 1, 20, 200, 4).unwrap(), Parity::Odd);
    }

    #[test]
    fn half_threshold_would_misclassify_balanced_splits() {
        // 25 of the 45 values of f_xy are zero for x in X, y in Y at n = 12, |X| = 6
        let chi = example1_colouring(&SplitSpec::new(12, 6)).unwrap();
        let f = pair_colouring(&chi, 1, 12).unwrap();
        assert_eq!(f.zero_count(), 25);
        assert_eq!(pair_parity(&chi, 1, 12, 10_000, 0).unwrap(), Parity::Odd);
    }

    #[test]
    fn recover_examples() {
        let chi = example1_colouring(&SplitSpec::new(12, 6)).unwrap();
        let rep = recover_partition(&chi, 0).unwrap();
        assert_eq!(rep.unordered_partition(), ((1..=6).collect(), (7..=12).collect()));
        assert_eq!(rep.mismatch_count, 0);
        assert_eq!((rep.inside_colour, rep.cross_colour), (2, 1));

        let mono = Colouring::monochromatic(9, 2, 2).unwrap();
        let rep = recover_partition(&mono, 0).unwrap();
        assert!(rep.y.is_empty());
        assert_eq!(rep.mismatch_count, 0);
        assert_eq!(rep.inside_colour, 2);
    }

    #[test]
    fn recover_perturbed_counts_flips() {
        let base = example1_colouring(&SplitSpec::new(13, 8)).unwrap();
        for k in 0..=5 {
            let chi = perturb(&base, k, 100 + k as u64).unwrap();
            let rep = recover_partition(&chi, 1).unwrap();
            assert_eq!(rep.unordered_partition(), ((1..=8).collect(), (9..=13).collect()));
            assert_eq!(rep.mismatch_count, k);
        }
    }

    #[test]
    fn additivity_examples() {
        let chi = example1_colouring(&SplitSpec::new(12, 5)).unwrap();
        let c = parity_additivity_check(&chi, usize::MAX, 0).unwrap();
        assert_eq!((c.checked, c.violations), (220, 0));
        let mono = Colouring::monochromatic(10, 2, 1).unwrap();
        assert_eq!(parity_additivity_check(&mono, 50, 3).unwrap().violations, 0);
        let rnd = random_colouring(10, 2, 3).unwrap();
        assert_eq!(parity_additivity_check(&rnd, 40, 3).unwrap().checked, 40);
    }

    #[test]
    fn no_gadgets_implies_no_unbalanced_c4() {
        for n in 6..=10 {
            for x_size in 0..=n {
                let chi = example1_colouring(&SplitSpec::new(n, x_size)).unwrap();
                assert_eq!(count_gadgets_exact(&chi, DEFAULT_EXACT_CAP).unwrap().gadgets, 0);
                for x in 1..=n as Vertex {
                    for y in x + 1..=n as Vertex {
                        assert_eq!(find_unbalanced_c4(&pair_colouring(&chi, x, y).unwrap()), None);
                    }
                }
            }
        }
    }

    #[test]
    fn unbalanced_c4_in_f_xy_is_a_gadget() {
        // the identity behind the previous test, checked in the other direction
        let chi = random_colouring(9, 2, 12).unwrap();
        let f = pair_colouring(&chi, 1, 2).unwrap();
        let w = find_unbalanced_c4(&f).unwrap();
        let [a, b, c, d] = w.vertices;
        let k = crate::gadgets::K222Copy::new([1, 2], [a, c], [b, d]).unwrap();
        assert!(crate::gadgets::is_gadget(&chi, &k).unwrap().is_some());
    }

    // Sanity version of the tight-pairs property: with both colours present on
    // ABC-type triples there is a bichromatic pair e, e' with |e ∩ e'| = 2 and
    // e Δ e' inside one of A, B, C.
    #[test]
    fn bichromatic_tight_pairs_exist() {
        let sets: [(Vec<Vertex>, Vec<Vertex>, Vec<Vertex>); 3] = [
            ((1..=4).collect(), (5..=8).collect(), (9..=12).collect()),
            ((1..=6).collect(), (1..=6).collect(), (7..=12).collect()),
            ((1..=8).collect(), (1..=8).collect(), (1..=8).collect()),
        ];
        for seed in 0..20 {
            let chi = perturb(&Colouring::monochromatic(12, 2, 1).unwrap(), 1 + seed as usize, seed).unwrap();
            for (a, b, c) in &sets {
                let typed: Vec<(Triple, [Vertex; 3])> = a
                    .iter()
                    .flat_map(|&x| b.iter().flat_map(move |&y| c.iter().map(move |&z| [x, y, z])))
                    .filter_map(|v| Triple::new(v[0], v[1], v[2]).ok().map(|t| (t, v)))
                    .collect();
                let colours: std::collections::HashSet<Colour> = typed.iter().map(|(t, _)| chi.get(t)).collect();
                if colours.len() < 2 {
                    continue;
                }
                let found = typed.iter().any(|(t, v)| {
                    typed.iter().any(|(s, w)| {
                        chi.get(t) != chi.get(s)
                            && (0..3).filter(|&i| v[i] == w[i]).count() == 2
                            && (0..3).any(|i| v[i] != w[i] && [a, b, c][i].contains(&v[i]) && [a, b, c][i].contains(&w[i]))
                    })
                });
                assert!(found, "seed {seed}");
            }
        }
    }

    proptest! {
        #[test]
        fn antisymmetry(seed in any::<u64>(), x in 1u32..=9, y in 1u32..=9) {
            prop_assume!(x != y);
            let chi = random_colouring(9, 2, seed).unwrap();
            let f = pair_colouring(&chi, x, y).unwrap();
            let g = pair_colouring(&chi, y, x).unwrap();
            for u in f.domain() {
                for v in f.domain() {
                    if u < v {
                        prop_assert_eq!(f.value(u, v), -g.value(u, v));
                    }
                }
            }
        }

        #[test]
        fn cocycle_identity(seed in any::<u64>(), x in 1u32..=9, y in 1u32..=9, z in 1u32..=9) {
            prop_assume!(x != y && y != z && x != z);
            let chi = random_colouring(9, 2, seed).unwrap();
            let fxy = pair_colouring(&chi, x, y).unwrap();
            let fyz = pair_colouring(&chi, y, z).unwrap();
            let fxz = pair_colouring(&chi, x, z).unwrap();
            for u in 1..=9u32 {
                for v in u + 1..=9 {
                    if [x, y, z].contains(&u) || [x, y, z].contains(&v) { continue; }
                    prop_assert_eq!(fxz.value(u, v), fxy.value(u, v) + fyz.value(u, v));
                }
            }
        }
    }
}
