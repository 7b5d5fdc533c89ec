//! Gadget boosting: select shadow-disjoint gadgets, triangle-decompose the
//! leave graph, then pick the Pasch half of every gadget that favours one
//! colour. Also the random-embedding baseline, a Pasch-trade hill climber,
//! and the analysis of colourings with three or more colours.

use std::collections::HashSet;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::decompose::{
    is_k3_divisible, shadow, triangle_decompose, triangle_decompose_preferring, DecomposeOptions, DecomposeOutcome,
    SimpleGraph, TriangleDecomposition, ValueOrder, DEFAULT_BUDGET,
};
use crate::error::{Error, Result};
use crate::gadgets::{
    collect_gadgets, copy_of_pasch, count_gadgets_exact, estimate_gadget_density, is_gadget, pasch_pair, visit_copies,
    GadgetRecord, PaschConfig, DEFAULT_EXACT_CAP,
};
use crate::hypergraph::{
    binomial, check_colour, pair_count, triple_count, Colour, ColourProfile, Colouring, Triple, TripleSystem, Vertex,
};
use crate::rng;
use crate::structure::{recover_partition, StructureReport};
use crate::sts::{construct_sts, is_sts, random_embedding, StsOrderClass};

/// Colour `keep` becomes 1, every other colour becomes 2.
pub fn merge_colours(chi: &Colouring, keep: Colour) -> Result<Colouring> {
    check_colour(keep, chi.colours())?;
    let values = chi.values().iter().map(|&c| if c == keep { 1 } else { 2 }).collect();
    Colouring::from_values(chi.order(), 2, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SelectionMode {
    /// Keep each record independently with probability `p`, then drop every
    /// record in a conflicting pair and every record at an over-cap vertex.
    Sampled { p: f64, seed: u64 },
    /// Seeded shuffle, then accept records that fit.
    Greedy { seed: u64 },
}

impl SelectionMode {
    pub fn seed(&self) -> u64 {
        match *self {
            SelectionMode::Sampled { seed, .. } | SelectionMode::Greedy { seed } => seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SelectionParams {
    pub target_count: usize,
    pub vertex_cap: usize,
    pub mode: SelectionMode,
}

impl SelectionParams {
    /// Greedy selection with vertex cap `ceil(n / 28)`, limited only by the
    /// `C(n, 2) / 12` copies whose shadows fit disjointly into `K_n`.
    pub fn for_order(n: usize, seed: u64) -> Self {
        SelectionParams { target_count: pair_count(n) / 12, vertex_cap: n.div_ceil(28).max(1), mode: SelectionMode::Greedy { seed } }
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertex_cap == 0 {
            return Err(Error::InvalidInput("vertex_cap must be at least 1".into()));
        }
        if let SelectionMode::Sampled { p, .. } = self.mode {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInput(format!("sampling probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GadgetSelection {
    pub chosen: Vec<GadgetRecord>,
}

impl GadgetSelection {
    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }
}

fn shadow_set(rec: &GadgetRecord) -> [(Vertex, Vertex); 12] {
    rec.copy.shadow()
}

/// Picks gadgets with pairwise edge-disjoint shadows, each vertex in at most
/// `vertex_cap` of them.
pub fn select_disjoint_gadgets(records: &[GadgetRecord], params: &SelectionParams) -> Result<GadgetSelection> {
    params.validate()?;
    let max_vertex = records.iter().map(|r| r.copy.max_vertex() as usize).max().unwrap_or(0);
    let chosen = match params.mode {
        SelectionMode::Greedy { seed } => {
            let mut order: Vec<&GadgetRecord> = records.iter().collect();
            order.shuffle(&mut rng::seeded(seed));
            let mut used_pairs = HashSet::new();
            let mut load = vec![0usize; max_vertex + 1];
            let mut chosen = Vec::new();
            for rec in order {
                if chosen.len() >= params.target_count {
                    break;
                }
                let sh = shadow_set(rec);
                let vertices = rec.copy.vertices();
                if sh.iter().any(|p| used_pairs.contains(p)) || vertices.iter().any(|&v| load[v as usize] >= params.vertex_cap)
                {
                    continue;
                }
                used_pairs.extend(sh);
                for v in vertices {
                    load[v as usize] += 1;
                }
                chosen.push(rec.clone());
            }
            chosen
        }
        SelectionMode::Sampled { p, seed } => {
            let mut g = rng::seeded(seed);
            let drawn: Vec<&GadgetRecord> = records.iter().filter(|_| g.gen_bool(p)).collect();
            let mut owners: std::collections::HashMap<(Vertex, Vertex), usize> = std::collections::HashMap::new();
            let mut conflicted = vec![false; drawn.len()];
            for (i, rec) in drawn.iter().enumerate() {
                for pair in shadow_set(rec) {
                    if let Some(&j) = owners.get(&pair) {
                        conflicted[i] = true;
                        conflicted[j] = true;
                    } else {
                        owners.insert(pair, i);
                    }
                }
            }
            let survivors: Vec<&GadgetRecord> =
                drawn.iter().zip(&conflicted).filter(|(_, &c)| !c).map(|(r, _)| *r).collect();
            let mut load = vec![0usize; max_vertex + 1];
            for rec in &survivors {
                for v in rec.copy.vertices() {
                    load[v as usize] += 1;
                }
            }
            survivors
                .into_iter()
                .filter(|rec| rec.copy.vertices().iter().all(|&v| load[v as usize] <= params.vertex_cap))
                .take(params.target_count)
                .cloned()
                .collect()
        }
    };
    Ok(GadgetSelection { chosen })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoostConfig {
    pub selection: SelectionParams,
    /// Most gadgets gathered before selection.
    pub gadget_pool: usize,
    /// Random copies probed while gathering gadgets.
    pub probe_budget: usize,
    /// Node budget of the leave-graph decomposition.
    pub decompose_budget: u64,
    /// Also decompose the leave graph per colour, trying triangles of
    /// that colour first, and keep the best outcome.
    pub colour_guided: bool,
    /// Node budget of each colour-guided decomposition.
    pub guided_budget: u64,
    /// Guided decompositions per colour; all but the first shuffle the
    /// completions within the preferred and other groups.
    pub guided_restarts: usize,
}

impl BoostConfig {
    pub fn for_order(n: usize, seed: u64) -> Self {
        BoostConfig {
            selection: SelectionParams::for_order(n, seed),
            gadget_pool: 2_000,
            probe_budget: 20_000,
            decompose_budget: DEFAULT_BUDGET,
            colour_guided: true,
            guided_budget: 2_000_000,
            guided_restarts: 16,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DecompositionSource {
    Ascending,
    Guided(Colour),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub n: usize,
    pub r: usize,
    pub gadgets_found: usize,
    pub selection: GadgetSelection,
    /// Set when the full selection could not be completed and half of it was used.
    pub halved: bool,
    pub base_triangles: TriangleDecomposition,
    pub decomposition_source: DecompositionSource,
    pub decomposition_nodes: u64,
    pub t_vector: Vec<usize>,
    pub i_vector: Vec<usize>,
    pub s_vector: Vec<usize>,
    pub chosen_colour: Colour,
    pub system: TripleSystem,
    pub profile: ColourProfile,
    pub discrepancy: Ratio<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum BoostOutcome {
    Completed(Box<PipelineReport>),
    /// The leave graph was not decomposed; the selection is kept for a retry.
    DecompositionFailed { selection: GadgetSelection, nodes: u64, budget_exhausted: bool },
}

struct Attempt {
    decomposition: TriangleDecomposition,
    source: DecompositionSource,
    nodes: u64,
    t: Vec<usize>,
    i: Vec<usize>,
    s: Vec<usize>,
    chosen: Colour,
}

fn colour_vectors(chi: &Colouring, d: &TriangleDecomposition, chosen: &[GadgetRecord]) -> (Vec<usize>, Vec<usize>) {
    let r = chi.colours();
    let t = ColourProfile::of_triples(chi, &d.triangles).counts;
    let i = (1..=r as Colour).map(|c| chosen.iter().map(|g| g.best_count(c)).sum()).collect();
    (t, i)
}

// argmax with ties to the smallest colour
fn leading(s: &[usize]) -> Colour {
    let mut best = 0;
    for c in 1..s.len() {
        if s[c] > s[best] {
            best = c;
        }
    }
    best as Colour + 1
}

fn attempt(chi: &Colouring, chosen: &[GadgetRecord], config: &BoostConfig, seed: u64) -> Result<std::result::Result<Attempt, (u64, bool)>> {
    let n = chi.order();
    let copies: Vec<_> = chosen.iter().map(|g| g.copy).collect();
    let leave = SimpleGraph::complete(n)?.minus(&shadow(n, &copies)?)?;
    let div = is_k3_divisible(&leave);
    assert!(div.divisible, "leave graph not K3-divisible: {:?}", div.reason);

    let opts = DecomposeOptions { budget: config.decompose_budget, value_order: ValueOrder::Ascending };
    let base = match triangle_decompose(&leave, &opts)? {
        DecomposeOutcome::Decomposed { decomposition, nodes } => (decomposition, nodes),
        DecomposeOutcome::Exhausted { nodes } => return Ok(Err((nodes, true))),
        DecomposeOutcome::Infeasible { nodes } => return Ok(Err((nodes, false))),
    };
    let (t, i) = colour_vectors(chi, &base.0, chosen);
    let s: Vec<usize> = t.iter().zip(&i).map(|(a, b)| a + b).collect();
    let mut best = Attempt { chosen: leading(&s), decomposition: base.0, source: DecompositionSource::Ascending, nodes: base.1, t, i, s };

    if config.colour_guided {
        let runs: Vec<(Colour, usize)> =
            (1..=chi.colours() as Colour).flat_map(|c| (0..config.guided_restarts).map(move |k| (c, k))).collect();
        let guided: Vec<(Colour, TriangleDecomposition, u64)> = runs
            .into_par_iter()
            .filter_map(|(c, k)| {
                let value_order = match k {
                    0 => ValueOrder::Ascending,
                    _ => ValueOrder::Shuffled { seed: rng::derive(seed, 1_000 * c as u64 + k as u64) },
                };
                let guided_opts = DecomposeOptions { budget: config.guided_budget, value_order };
                let prefer = |t: Triple| chi.get(&t) == c;
                match triangle_decompose_preferring(&leave, &guided_opts, &prefer) {
                    Ok(DecomposeOutcome::Decomposed { decomposition, nodes }) => Some((c, decomposition, nodes)),
                    _ => None,
                }
            })
            .collect();
        for (c, decomposition, nodes) in guided {
            let (t, i) = colour_vectors(chi, &decomposition, chosen);
            let s: Vec<usize> = t.iter().zip(&i).map(|(a, b)| a + b).collect();
            let lead = leading(&s);
            if s[lead as usize - 1] > best.s[best.chosen as usize - 1] {
                best = Attempt { chosen: lead, decomposition, source: DecompositionSource::Guided(c), nodes, t, i, s };
            }
        }
    }
    Ok(Ok(best))
}

/// Builds a Steiner triple system with a large count of one colour.
///
/// Gathers gadgets, selects shadow-disjoint ones, decomposes the rest of
/// `K_n` into triangles, and completes each selected copy with the Pasch half
/// favouring the colour `c*` that maximizes `S_c = T_c + sum I_c`.
pub fn boost(chi: &Colouring, config: &BoostConfig) -> Result<BoostOutcome> {
    let n = chi.order();
    let r = chi.colours();
    StsOrderClass::require(n)?;
    config.selection.validate()?;
    let seed = config.selection.mode.seed();
    let records = collect_gadgets(chi, config.gadget_pool, config.probe_budget.max(config.gadget_pool), rng::derive(seed, 1))?;
    let gadgets_found = records.len();
    let selection = select_disjoint_gadgets(&records, &config.selection)?;

    let mut halved = false;
    let mut used = selection.chosen.as_slice();
    let found = match attempt(chi, used, config, rng::derive(seed, 2))? {
        Ok(a) => a,
        Err(first) => {
            used = &selection.chosen[..selection.len() / 2];
            halved = true;
            match attempt(chi, used, config, rng::derive(seed, 2))? {
                Ok(a) => a,
                Err((nodes, exhausted)) => {
                    return Ok(BoostOutcome::DecompositionFailed {
                        selection,
                        nodes: first.0 + nodes,
                        budget_exhausted: first.1 || exhausted,
                    })
                }
            }
        }
    };

    for g in used {
        assert!(g.sum_of_best_counts() >= 5, "gadget {} has best-count sum below 5", g.copy);
    }
    let pairs = pair_count(n);
    assert_eq!(3 * found.decomposition.triangles.len() + 12 * used.len(), pairs);
    let c = found.chosen;
    let s_star = found.s[c as usize - 1];
    assert!(3 * r * s_star >= pairs + 3 * used.len(), "averaging bound fails");

    let mut triples = found.decomposition.triangles.clone();
    for g in used {
        triples.extend(g.choose_for(c).triples());
    }
    let system = TripleSystem::new(n, triples)?.sorted();
    assert!(is_sts(&system), "boosted system is not a Steiner triple system");
    let profile = ColourProfile::of_triples(chi, system.triples());
    assert_eq!(profile.count(c), s_star);
    let discrepancy = profile.discrepancy()?;

    Ok(BoostOutcome::Completed(Box::new(PipelineReport {
        n,
        r,
        gadgets_found,
        selection: GadgetSelection { chosen: used.to_vec() },
        halved,
        base_triangles: found.decomposition,
        decomposition_source: found.source,
        decomposition_nodes: found.nodes,
        t_vector: found.t,
        i_vector: found.i,
        s_vector: found.s,
        chosen_colour: c,
        system,
        profile,
        discrepancy,
    })))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BaselineResult {
    pub system: TripleSystem,
    pub discrepancy: Ratio<i64>,
    pub best_trial: usize,
    pub trials: usize,
}

/// Best of `trials` random relabellings of one constructed system.
pub fn baseline_random_embedding(chi: &Colouring, trials: usize, seed: u64) -> Result<BaselineResult> {
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    let base = construct_sts(chi.order())?;
    let mut best: Option<(TripleSystem, Ratio<i64>, usize)> = None;
    for i in 0..trials {
        let s = random_embedding(&base, rng::derive(seed, i as u64))?;
        let d = ColourProfile::of_triples(chi, s.triples()).discrepancy()?;
        if best.as_ref().map_or(true, |b| d > b.1) {
            best = Some((s, d, i));
        }
    }
    let (system, discrepancy, best_trial) = best.expect("trials > 0");
    Ok(BaselineResult { system, discrepancy, best_trial, trials })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TradeSearchResult {
    pub system: TripleSystem,
    pub trades: usize,
    pub initial_discrepancy: Ratio<i64>,
    pub final_discrepancy: Ratio<i64>,
}

// third[a][b] = the point completing pair ab, 0-based with n meaning none
fn third_table(s: &TripleSystem) -> Vec<Vec<Vertex>> {
    let n = s.order();
    let mut third = vec![vec![0; n + 1]; n + 1];
    for t in s.triples() {
        let [a, b, c] = t.vertices();
        third[a as usize][b as usize] = c;
        third[b as usize][a as usize] = c;
        third[a as usize][c as usize] = b;
        third[c as usize][a as usize] = b;
        third[b as usize][c as usize] = a;
        third[c as usize][b as usize] = a;
    }
    third
}

/// Every Pasch configuration in a Steiner triple system, each listed once.
pub fn pasch_configurations(s: &TripleSystem) -> Vec<PaschConfig> {
    let third = third_table(s);
    let n = s.order() as Vertex;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in s.triples() {
        let [a, b, c] = t.vertices();
        // a second block through `a`, then close up through b and c
        for d in 1..=n {
            if d == a || d == b || d == c {
                continue;
            }
            let e = third[a as usize][d as usize];
            if e == 0 || d > e {
                continue;
            }
            for (x, y) in [(d, e), (e, d)] {
                let f = third[b as usize][x as usize];
                if f != 0 && f == third[c as usize][y as usize] && f != a {
                    let tr = |p, q, r| Triple::new(p, q, r).expect("distinct points");
                    let mut blocks = [tr(a, b, c), tr(a, d, e), tr(b, x, f), tr(c, y, f)];
                    blocks.sort_unstable();
                    if seen.insert(blocks) {
                        out.push(PaschConfig(blocks));
                    }
                }
            }
        }
    }
    out
}

fn complement(p: &PaschConfig) -> PaschConfig {
    let pair = pasch_pair(&copy_of_pasch(p).expect("found in a Steiner triple system"));
    if pair.p1 == *p {
        pair.p2
    } else {
        pair.p1
    }
}

/// Hill climbing by Pasch trades.
///
/// Each step swaps a Pasch configuration of the current system for its
/// complement when that strictly raises the count of the leading colour;
/// candidates are scanned in a seeded random order. Stops after `iterations`
/// trades or at a local optimum.
pub fn pasch_trade_search(s: &TripleSystem, chi: &Colouring, iterations: usize, seed: u64) -> Result<TradeSearchResult> {
    if s.order() != chi.order() {
        return Err(Error::OrderMismatch { left: s.order(), right: chi.order() });
    }
    if !is_sts(s) {
        return Err(Error::InvalidInput("input is not a Steiner triple system".into()));
    }
    let mut g = rng::seeded(seed);
    let mut current = s.clone().sorted();
    let initial_discrepancy = ColourProfile::of_triples(chi, current.triples()).discrepancy()?;
    let mut last = initial_discrepancy;
    let mut trades = 0;
    while trades < iterations {
        let lead = ColourProfile::of_triples(chi, current.triples()).leading_colour();
        let mut candidates = pasch_configurations(&current);
        candidates.shuffle(&mut g);
        let gain = |p: &PaschConfig| {
            let q = complement(p);
            q.profile(chi).count(lead) > p.profile(chi).count(lead)
        };
        let Some(p) = candidates.into_iter().find(|p| gain(p)) else {
            break;
        };
        let q = complement(&p);
        let mut triples: Vec<Triple> = current.triples().iter().copied().filter(|t| !p.0.contains(t)).collect();
        triples.extend(q.0);
        current = TripleSystem::new(current.order(), triples)?.sorted();
        debug_assert!(is_sts(&current));
        let d = ColourProfile::of_triples(chi, current.triples()).discrepancy()?;
        debug_assert!(d > last);
        last = d;
        trades += 1;
    }
    Ok(TradeSearchResult { system: current, trades, initial_discrepancy, final_discrepancy: last })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnalyzeParams {
    /// Largest order counted exactly; sampled above it.
    pub exact_cap: usize,
    pub samples: usize,
    /// Gadget density above which a merged colouring counts as gadget-rich.
    pub density_threshold: f64,
    /// Largest fraction of triples outside the two leading colours for a
    /// two-colour verdict.
    pub residual_threshold: f64,
    pub seed: u64,
}

impl Default for AnalyzeParams {
    fn default() -> Self {
        AnalyzeParams { exact_cap: DEFAULT_EXACT_CAP, samples: 200_000, density_threshold: 0.01, residual_threshold: 0.05, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MergedColourReport {
    pub colour: Colour,
    pub gadget_density: f64,
    pub exact: bool,
    pub structure: StructureReport,
    /// Gadgets of the merged colouring that are not gadgets of the original.
    pub implication_violations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    ManyGadgets(Colour),
    TwoDominantColours(Colour, Colour, usize),
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MulticolourReport {
    pub per_colour: Vec<MergedColourReport>,
    pub class_sizes: Vec<usize>,
    pub verdict: Verdict,
}

/// Number of copies that are gadgets of `merged` but not of `chi`.
pub fn merge_implication_violations(chi: &Colouring, merged: &Colouring) -> Result<usize> {
    if chi.order() != merged.order() {
        return Err(Error::OrderMismatch { left: chi.order(), right: merged.order() });
    }
    let mut violations = 0;
    let mut failure = None;
    visit_copies(chi.order(), |k| match (is_gadget(merged, &k), is_gadget(chi, &k)) {
        (Ok(Some(_)), Ok(None)) => violations += 1,
        (Err(e), _) | (_, Err(e)) => failure = Some(e),
        _ => {}
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(violations),
    }
}

/// Merges each colour against the rest and inspects the resulting 2-colourings.
///
/// A gadget-rich merge gives `ManyGadgets`. Otherwise the two largest colour
/// classes are reported, as `TwoDominantColours` when the remaining triples
/// are few enough.
pub fn analyze_r_colouring(chi: &Colouring, params: &AnalyzeParams) -> Result<MulticolourReport> {
    let r = chi.colours();
    if r < 3 {
        return Err(Error::InvalidInput(format!("analysis needs at least 3 colours, got {r}")));
    }
    let n = chi.order();
    let exact = n <= params.exact_cap;
    let per_colour = (1..=r as Colour)
        .into_par_iter()
        .map(|c| {
            let merged = merge_colours(chi, c)?;
            let stream = rng::derive(params.seed, c as u64);
            let gadget_density = if exact {
                count_gadgets_exact(&merged, params.exact_cap)?.density()
            } else {
                estimate_gadget_density(&merged, params.samples, stream)?.estimate
            };
            let implication_violations = if exact { merge_implication_violations(chi, &merged)? } else { 0 };
            assert_eq!(implication_violations, 0, "gadget of a merged colouring missing from the original");
            let structure = recover_partition(&merged, stream)?;
            Ok(MergedColourReport { colour: c, gadget_density, exact, structure, implication_violations })
        })
        .collect::<Result<Vec<_>>>()?;

    let class_sizes = chi.class_sizes();
    let rich = per_colour
        .iter()
        .filter(|m| m.gadget_density > params.density_threshold)
        .fold(None::<&MergedColourReport>, |best, m| match best {
            Some(b) if b.gadget_density >= m.gadget_density => Some(b),
            _ => Some(m),
        });
    let verdict = if let Some(m) = rich {
        Verdict::ManyGadgets(m.colour)
    } else {
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by(|&a, &b| class_sizes[b].cmp(&class_sizes[a]).then(a.cmp(&b)));
        let (first, second) = (order[0].min(order[1]), order[0].max(order[1]));
        let residual = triple_count(n) - class_sizes[first] - class_sizes[second];
        if residual as f64 <= params.residual_threshold * binomial(n, 3) as f64 {
            Verdict::TwoDominantColours(first as Colour + 1, second as Colour + 1, residual)
        } else {
            Verdict::Inconclusive
        }
    };
    Ok(MulticolourReport { per_colour, class_sizes, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{all_gadgets, K222Copy};
    use crate::generators::{biased_colouring, example1_colouring, example1_colouring_in_palette, random_colouring, SplitSpec};
    use crate::hypergraph::discrepancy;

    fn record(chi: &Colouring, p: [Vertex; 2], q: [Vertex; 2], s: [Vertex; 2]) -> GadgetRecord {
        is_gadget(chi, &K222Copy::new(p, q, s).unwrap()).unwrap().expect("gadget")
    }

    // a colouring on which every copy through triple 1 3 5 is a gadget
    fn one_hot(n: usize) -> Colouring {
        let mut chi = Colouring::monochromatic(n, 2, 1).unwrap();
        chi.set(&Triple::new(1, 3, 5).unwrap(), 2).unwrap();
        chi.set(&Triple::new(7, 9, 11).unwrap(), 2).unwrap();
        chi
    }

    #[test]
    fn merge_examples() {
        let chi = random_colouring(9, 2, 1).unwrap();
        assert_eq!(merge_colours(&chi, 1).unwrap(), chi);
        let swapped = merge_colours(&chi, 2).unwrap();
        assert!(chi.values().iter().zip(swapped.values()).all(|(a, b)| a != b));

        let chi3 = random_colouring(9, 3, 2).unwrap();
        let m = merge_colours(&chi3, 2).unwrap();
        for (a, b) in chi3.values().iter().zip(m.values()) {
            assert_eq!(*b, if *a == 2 { 1 } else { 2 });
        }
        assert!(merge_colours(&chi3, 4).is_err());
    }

    #[test]
    fn merged_gadgets_are_original_gadgets() {
        for seed in 0..3 {
            let chi = random_colouring(9, 3, seed).unwrap();
            for c in 1..=3 {
                let merged = merge_colours(&chi, c).unwrap();
                assert_eq!(merge_implication_violations(&chi, &merged).unwrap(), 0);
                for g in all_gadgets(&merged, 21).unwrap() {
                    assert!(is_gadget(&chi, &g.copy).unwrap().is_some());
                }
            }
        }
    }

    fn independent_check(sel: &GadgetSelection, cap: usize) -> bool {
        let mut pairs = Vec::new();
        let mut load = std::collections::BTreeMap::new();
        for g in &sel.chosen {
            pairs.extend(g.copy.shadow());
            for v in g.copy.vertices() {
                *load.entry(v).or_insert(0) += 1;
            }
        }
        let total = pairs.len();
        pairs.sort();
        pairs.dedup();
        pairs.len() == total && load.values().all(|&l| l <= cap)
    }

    #[test]
    fn selection_examples() {
        let params = SelectionParams { target_count: 10, vertex_cap: 2, mode: SelectionMode::Greedy { seed: 0 } };
        assert!(select_disjoint_gadgets(&[], &params).unwrap().is_empty());

        let chi = one_hot(12);
        // share the shadow pair 1-3
        let a = record(&chi, [1, 2], [3, 4], [5, 6]);
        let b = record(&chi, [1, 8], [3, 10], [5, 12]);
        assert!(a.copy.shadow().iter().any(|p| b.copy.shadow().contains(p)));
        for seed in 0..8 {
            let params = SelectionParams { target_count: 10, vertex_cap: 3, mode: SelectionMode::Greedy { seed } };
            let sel = select_disjoint_gadgets(&[a.clone(), b.clone()], &params).unwrap();
            assert_eq!(sel.len(), 1);
            let mut order = vec![&a, &b];
            order.shuffle(&mut rng::seeded(seed));
            assert_eq!(&sel.chosen[0], order[0]);
        }
        let sampled = SelectionParams { target_count: 10, vertex_cap: 3, mode: SelectionMode::Sampled { p: 1.0, seed: 0 } };
        assert!(select_disjoint_gadgets(&[a, b], &sampled).unwrap().is_empty());
        assert!(select_disjoint_gadgets(&[], &SelectionParams { vertex_cap: 0, ..params }).is_err());
    }

    #[test]
    fn selection_respects_shadows_and_cap() {
        let chi = random_colouring(15, 2, 4).unwrap();
        let records = collect_gadgets(&chi, 3000, 30_000, 5).unwrap();
        for mode in [SelectionMode::Greedy { seed: 1 }, SelectionMode::Sampled { p: 0.01, seed: 1 }] {
            let params = SelectionParams { target_count: usize::MAX, vertex_cap: 3, mode };
            let sel = select_disjoint_gadgets(&records, &params).unwrap();
            assert!(independent_check(&sel, 3));
            if matches!(mode, SelectionMode::Greedy { .. }) {
                assert!(sel.len() >= 4);
            }
        }
    }

    fn completed(out: BoostOutcome) -> PipelineReport {
        match out {
            BoostOutcome::Completed(r) => *r,
            other => panic!("boost failed: {other:?}"),
        }
    }

    fn check_report(rep: &PipelineReport) {
        let pairs = pair_count(rep.n);
        assert_eq!(3 * rep.base_triangles.triangles.len() + 12 * rep.selection.len(), pairs);
        assert!(is_sts(&rep.system));
        let c = rep.chosen_colour as usize;
        assert_eq!(rep.profile.counts[c - 1], rep.s_vector[c - 1]);
        assert!(3 * rep.r * rep.s_vector[c - 1] >= pairs + 3 * rep.selection.len());
        for g in &rep.selection.chosen {
            assert!(g.sum_of_best_counts() >= 5);
        }
    }

    #[test]
    fn boost_without_gadgets() {
        let chi = example1_colouring(&SplitSpec::new(13, 5)).unwrap();
        let rep = completed(boost(&chi, &BoostConfig::for_order(13, 0)).unwrap());
        assert!(rep.selection.is_empty());
        assert_eq!(rep.gadgets_found, 0);
        check_report(&rep);
        assert_eq!(rep.system.len(), 26);

        let mono = Colouring::monochromatic(7, 2, 1).unwrap();
        let rep = completed(boost(&mono, &BoostConfig::for_order(7, 0)).unwrap());
        assert_eq!(rep.profile.counts, vec![7, 0]);
        assert_eq!(rep.discrepancy, Ratio::from_integer(7));
    }

    #[test]
    fn boost_random_colourings() {
        for (n, r, seed) in [(13, 2, 0), (13, 3, 1), (15, 2, 2), (19, 3, 3)] {
            let chi = random_colouring(n, r, seed).unwrap();
            let rep = completed(boost(&chi, &BoostConfig::for_order(n, seed)).unwrap());
            check_report(&rep);
            assert!(!rep.selection.is_empty());
            let c = rep.chosen_colour as usize;
            let max_count = rep.profile.counts[c - 1];
            assert!(2 * max_count >= 26 + rep.selection.len() || n != 13 || r != 2);
        }
    }

    #[test]
    fn boost_plain_order_matches_guided_bound() {
        let chi = random_colouring(13, 2, 9).unwrap();
        let mut cfg = BoostConfig::for_order(13, 9);
        cfg.colour_guided = false;
        let plain = completed(boost(&chi, &cfg).unwrap());
        check_report(&plain);
        assert_eq!(plain.decomposition_source, DecompositionSource::Ascending);
        cfg.colour_guided = true;
        let guided = completed(boost(&chi, &cfg).unwrap());
        check_report(&guided);
        let best = |r: &PipelineReport| r.s_vector[r.chosen_colour as usize - 1];
        assert!(best(&guided) >= best(&plain));
    }

    #[test]
    fn boost_rejects_bad_order() {
        let chi = random_colouring(8, 2, 0).unwrap();
        assert!(matches!(boost(&chi, &BoostConfig::for_order(8, 0)), Err(Error::BadResidue { .. })));
    }

    #[test]
    fn boost_reports_failure_with_selection() {
        let chi = random_colouring(15, 2, 3).unwrap();
        let mut cfg = BoostConfig::for_order(15, 3);
        cfg.decompose_budget = 2;
        match boost(&chi, &cfg).unwrap() {
            BoostOutcome::DecompositionFailed { selection, budget_exhausted, .. } => {
                assert!(budget_exhausted);
                assert!(!selection.is_empty());
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn baseline_examples() {
        let chi = random_colouring(13, 2, 0).unwrap();
        let one = baseline_random_embedding(&chi, 1, 7).unwrap();
        let s = random_embedding(&construct_sts(13).unwrap(), rng::derive(7, 0)).unwrap();
        assert_eq!(one.system, s);
        assert_eq!(one.discrepancy, discrepancy(&s, &chi).unwrap());

        let mono = Colouring::monochromatic(13, 2, 2).unwrap();
        assert_eq!(baseline_random_embedding(&mono, 20, 1).unwrap().discrepancy, Ratio::from_integer(26));

        let biased = biased_colouring(15, 0.2, 3).unwrap();
        assert!(baseline_random_embedding(&biased, 200, 4).unwrap().discrepancy > Ratio::from_integer(0));
    }

    #[test]
    fn pasch_configurations_are_pasch() {
        let s = construct_sts(13).unwrap();
        let found = pasch_configurations(&s);
        for p in &found {
            assert!(crate::gadgets::is_pasch(&p.0));
            assert!(p.0.iter().all(|t| s.triples().contains(t)));
        }
        // brute force over 4-subsets of blocks
        let ts = s.triples();
        let mut count = 0;
        for a in 0..ts.len() {
            for b in a + 1..ts.len() {
                for c in b + 1..ts.len() {
                    for d in c + 1..ts.len() {
                        count += crate::gadgets::is_pasch(&[ts[a], ts[b], ts[c], ts[d]]) as usize;
                    }
                }
            }
        }
        assert_eq!(found.len(), count);
        // the projective plane over GF(2) is Pasch-rich
        assert_eq!(pasch_configurations(&construct_sts(7).unwrap()).len(), 7);
    }

    #[test]
    fn trade_search_is_monotone() {
        for seed in 0..100 {
            let chi = random_colouring(13, 2, seed).unwrap();
            let s = random_embedding(&construct_sts(13).unwrap(), seed).unwrap();
            let before = discrepancy(&s, &chi).unwrap();
            let out = pasch_trade_search(&s, &chi, 50, seed).unwrap();
            assert!(is_sts(&out.system));
            assert!(out.final_discrepancy >= before);
            assert_eq!(out.final_discrepancy, discrepancy(&out.system, &chi).unwrap());
        }
    }

    #[test]
    fn trade_search_fixpoint_and_example1() {
        let chi = example1_colouring(&SplitSpec::new(13, 5)).unwrap();
        let s = construct_sts(13).unwrap();
        let out = pasch_trade_search(&s, &chi, 100, 0).unwrap();
        assert_eq!(out.trades, 0);
        assert_eq!(out.system, s.clone().sorted());
        assert_eq!(out.final_discrepancy, discrepancy(&s, &chi).unwrap());

        // every trade in the system leaves the counts of this colouring unchanged
        for p in pasch_configurations(&s) {
            assert_eq!(p.profile(&chi), complement(&p).profile(&chi));
        }

        let random = random_colouring(13, 2, 3).unwrap();
        let first = pasch_trade_search(&s, &random, 1000, 1).unwrap();
        let again = pasch_trade_search(&first.system, &random, 1000, 2).unwrap();
        assert_eq!(again.trades, 0);
        assert_eq!(again.system, first.system);
    }

    #[test]
    fn analyze_examples() {
        let absent = example1_colouring_in_palette(&SplitSpec::new(10, 4), 3).unwrap();
        let rep = analyze_r_colouring(&absent, &AnalyzeParams::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::TwoDominantColours(1, 2, 0));

        let mono = Colouring::monochromatic(9, 3, 1).unwrap();
        assert_eq!(analyze_r_colouring(&mono, &AnalyzeParams::default()).unwrap().verdict, Verdict::TwoDominantColours(1, 2, 0));

        let chi = random_colouring(13, 3, 5).unwrap();
        let rep = analyze_r_colouring(&chi, &AnalyzeParams::default()).unwrap();
        assert!(matches!(rep.verdict, Verdict::ManyGadgets(_)));
        for m in &rep.per_colour {
            let merged = merge_colours(&chi, m.colour).unwrap();
            let exact = count_gadgets_exact(&merged, 21).unwrap();
            assert_eq!(m.gadget_density, exact.density());
            assert!(m.gadget_density > 0.5);
        }

        assert!(analyze_r_colouring(&random_colouring(9, 2, 0).unwrap(), &AnalyzeParams::default()).is_err());
    }
}
