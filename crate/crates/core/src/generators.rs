//! Colourings used as experiment inputs: the two-part split construction,
//! random and perturbed colourings, and structured `{0, ±1}` pair colourings.

use num_integer::Roots;
use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{pair_count, pair_rank, triple_count, Colour, Colouring, Vertex};
use crate::rng;
use crate::structure::SignedPairMap;

/// Split of `[n]` into `X = {1..x_size}` and `Y = [n] \ X`. Triples meeting
/// both parts get `colour_cross`, all others `colour_inside`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub n: usize,
    pub x_size: usize,
    pub colour_cross: Colour,
    pub colour_inside: Colour,
}

impl SplitSpec {
    /// Cross colour 1, inside colour 2.
    pub fn new(n: usize, x_size: usize) -> Self {
        SplitSpec { n, x_size, colour_cross: 1, colour_inside: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_size > self.n {
            return Err(Error::InvalidInput(format!("x_size {} exceeds n = {}", self.x_size, self.n)));
        }
        if self.colour_cross == self.colour_inside {
            return Err(Error::InvalidInput("cross and inside colours must differ".into()));
        }
        if self.colour_cross == 0 || self.colour_inside == 0 {
            return Err(Error::InvalidInput("colours are 1-based".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn in_x(&self, v: Vertex) -> bool {
        (v as usize) <= self.x_size
    }

    /// Cross triples in any system covering every X-Y pair exactly once.
    pub fn cross_count_in_sts(&self) -> usize {
        self.x_size * (self.n - self.x_size) / 2
    }
}

/// The split colouring in the smallest palette that holds both colours (at least 2).
pub fn example1_colouring(spec: &SplitSpec) -> Result<Colouring> {
    let r = (spec.colour_cross.max(spec.colour_inside) as usize).max(2);
    example1_colouring_in_palette(spec, r)
}

pub fn example1_colouring_in_palette(spec: &SplitSpec, r: usize) -> Result<Colouring> {
    spec.validate()?;
    Colouring::from_fn(spec.n, r, |t| {
        let inside_x = t.vertices().iter().filter(|&&v| spec.in_x(v)).count();
        if inside_x == 0 || inside_x == 3 {
            spec.colour_inside
        } else {
            spec.colour_cross
        }
    })
}

/// `floor(n (3 + sqrt 3) / 6)` in exact integer arithmetic.
pub fn balanced_split_size(n: usize) -> usize {
    // sqrt(3 n^2) is irrational for n > 0, so flooring it first does not move the outer floor
    let n = n as u128;
    let root = (3 * n * n).sqrt();
    ((3 * n + root) / 6) as usize
}

/// Each triple's colour i.i.d. uniform on `[r]`.
pub fn random_colouring(n: usize, r: usize, seed: u64) -> Result<Colouring> {
    if r < 2 {
        return Err(Error::TooFewColours(r));
    }
    let mut g = rng::seeded(seed);
    let values = (0..triple_count(n)).map(|_| g.gen_range(1..=r) as Colour).collect();
    Colouring::from_values(n, r, values)
}

/// A colouring with colour 1 on each triple independently with probability `density`, else colour 2.
pub fn biased_colouring(n: usize, density: f64, seed: u64) -> Result<Colouring> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidInput(format!("density {density} outside [0, 1]")));
    }
    let mut g = rng::seeded(seed);
    let values = (0..triple_count(n)).map(|_| if g.gen_bool(density) { 1 } else { 2 }).collect();
    Colouring::from_values(n, 2, values)
}

/// Recolours exactly `flip_count` distinct triples, each to a uniformly random different colour.
pub fn perturb(chi: &Colouring, flip_count: usize, seed: u64) -> Result<Colouring> {
    let total = triple_count(chi.order());
    if flip_count > total {
        return Err(Error::InvalidInput(format!("cannot flip {flip_count} of {total} triples")));
    }
    let r = chi.colours();
    let mut g = rng::seeded(seed);
    let mut values = chi.values().to_vec();
    for k in index::sample(&mut g, total, flip_count) {
        let old = values[k];
        let mut fresh = g.gen_range(1..r) as Colour;
        if fresh >= old {
            fresh += 1;
        }
        values[k] = fresh;
    }
    Colouring::from_values(chi.order(), r, values)
}

/// A map from the pairs of `[n]` to `{0, +1, -1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColouringZpm {
    n: usize,
    values: Vec<i8>,
}

impl EdgeColouringZpm {
    pub fn zero(n: usize) -> Self {
        EdgeColouringZpm { n, values: vec![0; pair_count(n)] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(Vertex, Vertex) -> i8) -> Result<Self> {
        let mut values = Vec::with_capacity(pair_count(n));
        for b in 1..=n as Vertex {
            for a in 1..b {
                let v = f(a, b);
                if !(-1..=1).contains(&v) {
                    return Err(Error::InvalidInput(format!("pair value {v} not in {{0, ±1}}")));
                }
                values.push(v);
            }
        }
        Ok(EdgeColouringZpm { n, values })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, a: Vertex, b: Vertex, value: i8) -> Result<()> {
        if a == b || a == 0 || b == 0 || a.max(b) as usize > self.n {
            return Err(Error::InvalidInput(format!("bad pair {{{a}, {b}}} for order {}", self.n)));
        }
        if !(-1..=1).contains(&value) {
            return Err(Error::InvalidInput(format!("pair value {value} not in {{0, ±1}}")));
        }
        let (a, b) = (a.min(b), a.max(b));
        self.values[pair_rank(a, b)] = value;
        Ok(())
    }

    pub fn random(n: usize, seed: u64) -> Self {
        let mut g = rng::seeded(seed);
        let values = (0..pair_count(n)).map(|_| g.gen_range(-1..=1)).collect();
        EdgeColouringZpm { n, values }
    }
}

impl SignedPairMap for EdgeColouringZpm {
    fn order(&self) -> usize {
        self.n
    }

    fn domain(&self) -> Vec<Vertex> {
        (1..=self.n as Vertex).collect()
    }

    #[inline]
    fn value(&self, u: Vertex, v: Vertex) -> i8 {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.values[pair_rank(a, b)]
    }
}

/// `+1` inside `A = {1..a_size}`, `-1` inside the rest, `0` across.
pub fn structured_zpm(n: usize, a_size: usize) -> Result<EdgeColouringZpm> {
    if a_size > n {
        return Err(Error::InvalidInput(format!("a_size {a_size} exceeds n = {n}")));
    }
    let a_size = a_size as Vertex;
    EdgeColouringZpm::from_fn(n, |u, v| match (u <= a_size, v <= a_size) {
        (true, true) => 1,
        (false, false) => -1,
        _ => 0,
    })
}
