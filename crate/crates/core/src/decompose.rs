//! Exact triangle decomposition of small graphs by fail-first backtracking.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gadgets::K222Copy;
use crate::hypergraph::{Triple, Vertex};
use crate::rng;

/// Largest order a [`SimpleGraph`] can hold.
pub const MAX_ORDER: usize = 128;

/// Default search budget in search-tree nodes.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Simple graph on `[n]` with one 128-bit adjacency row per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    rows: Vec<u128>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::UnsupportedOrder { n, reason: "graphs hold at most 128 vertices" });
        }
        Ok(SimpleGraph { n, rows: vec![0; n] })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for u in 0..n {
            g.rows[u] = full_mask(n) & !(1u128 << u);
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    fn check(&self, u: Vertex, v: Vertex) -> Result<(usize, usize)> {
        for w in [u, v] {
            if w == 0 || w as usize > self.n {
                return Err(Error::VertexOutOfRange { vertex: w, n: self.n });
            }
        }
        if u == v {
            return Err(Error::InvalidInput(format!("loop at {u}")));
        }
        Ok((u as usize - 1, v as usize - 1))
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        let (a, b) = self.check(u, v)?;
        self.rows[a] |= 1 << b;
        self.rows[b] |= 1 << a;
        Ok(())
    }

    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        let (a, b) = self.check(u, v)?;
        self.rows[a] &= !(1 << b);
        self.rows[b] &= !(1 << a);
        Ok(())
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        match self.check(u, v) {
            Ok((a, b)) => self.rows[a] >> b & 1 == 1,
            Err(_) => false,
        }
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.rows[v as usize - 1].count_ones() as usize
    }

    pub fn min_degree(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).min().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, lexicographic.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            let mut higher = self.rows[u] & !((2u128 << u) - 1);
            while higher != 0 {
                let v = higher.trailing_zeros() as usize;
                higher &= higher - 1;
                out.push((u as Vertex + 1, v as Vertex + 1));
            }
        }
        out
    }

    /// Edges of `self` not in `other`.
    pub fn minus(&self, other: &SimpleGraph) -> Result<SimpleGraph> {
        if self.n != other.n {
            return Err(Error::OrderMismatch { left: self.n, right: other.n });
        }
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a & !b).collect();
        Ok(SimpleGraph { n: self.n, rows })
    }
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Union of the 12-pair shadows of `copies`, as a graph on `[n]`.
pub fn shadow(n: usize, copies: &[K222Copy]) -> Result<SimpleGraph> {
    let mut g = SimpleGraph::empty(n)?;
    for k in copies {
        for (u, v) in k.shadow() {
            g.add_edge(u, v)?;
        }
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DivisibilityFailure {
    EdgeCount { edges: usize },
    OddDegree { vertex: Vertex, degree: usize },
}

impl std::fmt::Display for DivisibilityFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DivisibilityFailure::EdgeCount { edges } => write!(f, "{edges} edges is not a multiple of 3"),
            DivisibilityFailure::OddDegree { vertex, degree } => write!(f, "vertex {vertex} has odd degree {degree}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Divisibility {
    pub divisible: bool,
    pub reason: Option<DivisibilityFailure>,
}

/// `3 | e(G)` and every degree even; reports the first failure (edge count first).
pub fn is_k3_divisible(g: &SimpleGraph) -> Divisibility {
    let edges = g.edge_count();
    let reason = if edges % 3 != 0 {
        Some(DivisibilityFailure::EdgeCount { edges })
    } else {
        (1..=g.n as Vertex)
            .map(|v| (v, g.degree(v)))
            .find(|(_, d)| d % 2 == 1)
            .map(|(vertex, degree)| DivisibilityFailure::OddDegree { vertex, degree })
    };
    Divisibility { divisible: reason.is_none(), reason }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleDecomposition {
    pub triangles: Vec<Triple>,
}

impl TriangleDecomposition {
    /// Whether the triangles cover every edge of `g` exactly once and nothing else.
    pub fn verify(&self, g: &SimpleGraph) -> bool {
        let mut covered = SimpleGraph { n: g.n, rows: vec![0; g.n] };
        for t in &self.triangles {
            for (u, v) in t.pairs() {
                if !g.has_edge(u, v) || covered.has_edge(u, v) {
                    return false;
                }
                covered.add_edge(u, v).expect("edge of g");
            }
        }
        covered == *g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ValueOrder {
    Ascending,
    Shuffled { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DecomposeOptions {
    pub budget: u64,
    pub value_order: ValueOrder,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { budget: DEFAULT_BUDGET, value_order: ValueOrder::Ascending }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DecomposeOutcome {
    Decomposed { decomposition: TriangleDecomposition, nodes: u64 },
    /// The whole search tree was explored without success.
    Infeasible { nodes: u64 },
    /// The node budget ran out first.
    Exhausted { nodes: u64 },
}

impl DecomposeOutcome {
    pub fn nodes(&self) -> u64 {
        match self {
            DecomposeOutcome::Decomposed { nodes, .. }
            | DecomposeOutcome::Infeasible { nodes }
            | DecomposeOutcome::Exhausted { nodes } => *nodes,
        }
    }

    pub fn decomposition(self) -> Option<TriangleDecomposition> {
        match self {
            DecomposeOutcome::Decomposed { decomposition, .. } => Some(decomposition),
            _ => None,
        }
    }
}

struct Search<'a> {
    rows: Vec<u128>,
    prefer: Option<&'a dyn Fn(Triple) -> bool>,
    stack: Vec<[usize; 3]>,
    nodes: u64,
    budget: u64,
    rng: Option<rng::Rng>,
}

enum Step {
    Found,
    Dead,
    OutOfBudget,
}

impl Search<'_> {
    // uncovered edge with the fewest completing vertices; None when no edges remain
    fn pick_edge(&self) -> Option<(usize, usize, u128)> {
        let mut best: Option<(usize, usize, u128)> = None;
        let mut best_count = u32::MAX;
        for u in 0..self.rows.len() {
            let mut higher = self.rows[u] & !((2u128 << u) - 1);
            while higher != 0 {
                let v = higher.trailing_zeros() as usize;
                higher &= higher - 1;
                let common = self.rows[u] & self.rows[v];
                let count = common.count_ones();
                if count < best_count {
                    best_count = count;
                    best = Some((u, v, common));
                    if count == 0 {
                        return best;
                    }
                }
            }
        }
        best
    }

    fn toggle(&mut self, t: [usize; 3]) {
        let [a, b, c] = t;
        self.rows[a] ^= (1 << b) | (1 << c);
        self.rows[b] ^= (1 << a) | (1 << c);
        self.rows[c] ^= (1 << a) | (1 << b);
    }

    fn run(&mut self) -> Step {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::OutOfBudget;
        }
        let Some((u, v, common)) = self.pick_edge() else {
            return Step::Found;
        };
        let mut options = Vec::with_capacity(common.count_ones() as usize);
        let mut bits = common;
        while bits != 0 {
            options.push(bits.trailing_zeros() as usize);
            bits &= bits - 1;
        }
        if let Some(g) = self.rng.as_mut() {
            options.shuffle(g);
        }
        if let Some(prefer) = self.prefer {
            // stable: preferred completions first, original order within each group
            options.sort_by_key(|&w| !prefer(Triple::from_distinct(u as Vertex + 1, v as Vertex + 1, w as Vertex + 1)));
        }
        for w in options {
            let t = [u, v, w];
            self.toggle(t);
            self.stack.push(t);
            match self.run() {
                Step::Dead => {}
                done => return done,
            }
            self.stack.pop();
            self.toggle(t);
        }
        Step::Dead
    }
}

/// Partitions the edges of a K3-divisible graph into triangles.
///
/// Branches on the remaining edge with the fewest completions and tries
/// completing vertices in ascending order (or a seeded shuffle).
pub fn triangle_decompose(g: &SimpleGraph, options: &DecomposeOptions) -> Result<DecomposeOutcome> {
    run_search(g, options, None)
}

/// As [`triangle_decompose`], but completions forming a triangle accepted by
/// `prefer` are tried before the others.
pub fn triangle_decompose_preferring(
    g: &SimpleGraph,
    options: &DecomposeOptions,
    prefer: &dyn Fn(Triple) -> bool,
) -> Result<DecomposeOutcome> {
    run_search(g, options, Some(prefer))
}

fn run_search(g: &SimpleGraph, options: &DecomposeOptions, prefer: Option<&dyn Fn(Triple) -> bool>) -> Result<DecomposeOutcome> {
    let div = is_k3_divisible(g);
    if let Some(reason) = div.reason {
        return Err(Error::NotDivisible(reason.to_string()));
    }
    let rng = match options.value_order {
        ValueOrder::Ascending => None,
        ValueOrder::Shuffled { seed } => Some(rng::seeded(seed)),
    };
    let mut search = Search { rows: g.rows.clone(), prefer, stack: Vec::new(), nodes: 0, budget: options.budget, rng };
    Ok(match search.run() {
        Step::Found => {
            let triangles = search
                .stack
                .iter()
                .map(|t| Triple::from_distinct(t[0] as Vertex + 1, t[1] as Vertex + 1, t[2] as Vertex + 1))
                .collect();
            let decomposition = TriangleDecomposition { triangles };
            debug_assert!(decomposition.verify(g));
            DecomposeOutcome::Decomposed { decomposition, nodes: search.nodes }
        }
        Step::Dead => DecomposeOutcome::Infeasible { nodes: search.nodes },
        Step::OutOfBudget => DecomposeOutcome::Exhausted { nodes: search.budget },
    })
}
