use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sts_core::decompose::{triangle_decompose, DecomposeOptions, DecomposeOutcome, ValueOrder};
use sts_core::gadgets::{collect_gadgets, count_gadgets_exact, estimate_gadget_density};
use sts_core::generators::{
    balanced_split_size, biased_colouring, example1_colouring_in_palette, perturb, random_colouring, SplitSpec,
};
use sts_core::io;
use sts_core::pipeline::{
    analyze_r_colouring, baseline_random_embedding, boost, pasch_trade_search, AnalyzeParams, BoostConfig,
    BoostOutcome, SelectionMode, SelectionParams,
};
use sts_core::structure::recover_partition_with;
use sts_core::sts::{construct_sts, count_all_sts, enumerate_all_sts, random_embedding, validate_sts};
use sts_core::{ColourProfile, Colouring, Error, Ratio, TripleSystem};

use crate::{Cli, ColouringKind, Command, Mode, OutputFormat};

pub enum Failure {
    Invalid(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Out<'a> {
    cli: &'a Cli,
    start: Instant,
}

impl Out<'_> {
    fn emit(&self, command: &str, config: &impl Serialize, result: Value) -> Outcome {
        self.emit_resolved(command, to_value(config), result)
    }

    fn emit_resolved(&self, command: &str, config: Value, result: Value) -> Outcome {
        let mut doc = Map::new();
        doc.insert("schema".into(), json!(1));
        doc.insert("command".into(), json!(command));
        doc.insert("config".into(), config);
        doc.insert("result".into(), result);
        if !self.cli.no_timing {
            doc.insert("elapsed".into(), json!(self.start.elapsed().as_secs_f64()));
        }
        let mut text = String::new();
        match self.cli.format {
            OutputFormat::Json => {
                text = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
                text.push('\n');
            }
            OutputFormat::Text => {
                if let Some(Value::Object(fields)) = doc.get("result") {
                    for (k, v) in fields {
                        match v {
                            Value::String(s) if s.contains('\n') => text += &format!("{k}:\n{s}"),
                            Value::String(s) => text += &format!("{k}: {s}\n"),
                            other => text += &format!("{k}: {other}\n"),
                        }
                    }
                }
                if let Some(t) = doc.get("elapsed") {
                    text += &format!("elapsed: {t}\n");
                }
            }
        }
        print_stdout(&text)
    }
}

// a closed pipe downstream is not an error
fn print_stdout(text: &str) -> Outcome {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Invalid(format!("writing output: {e}"))),
        _ => Ok(()),
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn ratio(r: Ratio<i64>) -> Value {
    if *r.denom() == 1 {
        json!(r.numer())
    } else {
        json!(r.to_string())
    }
}

fn read_colouring(path: &Path) -> Result<Colouring, Failure> {
    Ok(io::parse_colouring(&io::read_text(path)?)?)
}

fn read_system(path: &Path) -> Result<TripleSystem, Failure> {
    Ok(io::parse_triple_system(&io::read_text(path)?)?)
}

/// Writes `text` to `out`, or returns it for embedding when no path is given.
fn deliver(out: &Option<std::path::PathBuf>, text: String) -> Result<Value, Failure> {
    match out {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))?;
            Ok(json!(p.display().to_string()))
        }
        None => Ok(json!(text)),
    }
}

fn with_file(mut result: Value, out: &Option<std::path::PathBuf>, text: String) -> Result<Value, Failure> {
    let key = if out.is_some() { "written_to" } else { "file" };
    result[key] = deliver(out, text)?;
    Ok(result)
}

pub fn run(cli: &Cli) -> Outcome {
    let out = Out { cli, start: Instant::now() };
    match &cli.command {
        Command::Generate(a) => {
            let chi = match a.kind {
                ColouringKind::Perturb => {
                    let path = a.input.as_ref().ok_or_else(|| Failure::Invalid("perturb needs --input".into()))?;
                    perturb(&read_colouring(path)?, a.flips, a.seed)?
                }
                kind => {
                    let n = a.n.ok_or_else(|| Failure::Invalid("--n is required".into()))?;
                    match kind {
                        ColouringKind::Split => {
                            let spec = SplitSpec::new(n, a.x_size.unwrap_or_else(|| balanced_split_size(n)));
                            example1_colouring_in_palette(&spec, a.r)?
                        }
                        ColouringKind::Monochromatic => Colouring::monochromatic(n, a.r, a.colour)?,
                        ColouringKind::Random => random_colouring(n, a.r, a.seed)?,
                        ColouringKind::Biased => {
                            if a.r != 2 {
                                return Err(Failure::Invalid("biased colourings use r = 2".into()));
                            }
                            biased_colouring(n, a.density, a.seed)?
                        }
                        ColouringKind::Perturb => unreachable!(),
                    }
                }
            };
            let text = match a.sparse_default {
                Some(d) => {
                    if d == 0 || d as usize > chi.colours() {
                        return Err(Error::ColourOutOfRange { colour: d, r: chi.colours() }.into());
                    }
                    io::format_colouring_sparse(&chi, d)
                }
                None => io::format_colouring(&chi),
            };
            let result = json!({ "n": chi.order(), "r": chi.colours(), "class_sizes": chi.class_sizes() });
            out.emit("generate", a, with_file(result, &a.out, text)?)
        }
        Command::Construct(a) => {
            let mut s = construct_sts(a.n)?;
            if let Some(seed) = a.embed_seed {
                s = random_embedding(&s, seed)?;
            }
            let result = json!({ "n": a.n, "triples": s.len() });
            out.emit("construct", a, with_file(result, &a.out, io::format_triple_system(&s))?)
        }
        Command::Discrepancy(a) => {
            let s = read_system(&a.system)?;
            let chi = read_colouring(&a.colouring)?;
            if s.order() != chi.order() {
                return Err(Error::OrderMismatch { left: s.order(), right: chi.order() }.into());
            }
            let profile = ColourProfile::of_triples(&chi, s.triples());
            let result = json!({
                "n": s.order(),
                "r": chi.colours(),
                "triples": s.len(),
                "valid_sts": validate_sts(&s).valid,
                "counts": profile.counts,
                "leading_colour": profile.leading_colour(),
                "discrepancy": ratio(profile.discrepancy()?),
            });
            out.emit("discrepancy", a, result)
        }
        Command::CountGadgets(a) => {
            let chi = read_colouring(&a.colouring)?;
            let result = if chi.order() <= a.exact_cap {
                let c = count_gadgets_exact(&chi, a.exact_cap)?;
                json!({ "exact": true, "copies": c.copies, "gadgets": c.gadgets, "density": c.density() })
            } else {
                let e = estimate_gadget_density(&chi, a.samples, a.seed)?;
                json!({ "exact": false, "samples": e.samples, "hits": e.hits, "density": e.estimate, "std_error": e.std_error })
            };
            out.emit("count-gadgets", a, result)
        }
        Command::CollectGadgets(a) => {
            let chi = read_colouring(&a.colouring)?;
            let found = collect_gadgets(&chi, a.max_count, a.budget, a.seed)?;
            let copies: Vec<_> = found.iter().map(|g| g.copy).collect();
            let result = json!({ "found": found.len(), "gadgets": to_value(&found) });
            out.emit("collect-gadgets", a, with_file(result, &a.out, io::format_copies(&copies))?)
        }
        Command::RecoverStructure(a) => {
            let chi = read_colouring(&a.colouring)?;
            let rep = recover_partition_with(&chi, a.sample_size, a.seed)?;
            let mut result = to_value(&rep);
            result["mismatch_fraction"] = json!(rep.mismatch_fraction());
            out.emit("recover-structure", a, result)
        }
        Command::Decompose(a) => {
            let g = io::read_graph(&a.graph)?;
            let value_order = match a.shuffle_seed {
                Some(seed) => ValueOrder::Shuffled { seed },
                None => ValueOrder::Ascending,
            };
            let outcome = triangle_decompose(&g, &DecomposeOptions { budget: a.budget, value_order })?;
            match outcome {
                DecomposeOutcome::Decomposed { decomposition, nodes } => {
                    let s = TripleSystem::new(g.order(), decomposition.triangles)?;
                    let result = json!({ "n": g.order(), "edges": g.edge_count(), "triangles": s.len(), "nodes": nodes });
                    out.emit("decompose", a, with_file(result, &a.out, io::format_triple_system(&s))?)
                }
                DecomposeOutcome::Infeasible { nodes } => {
                    Err(Failure::Invalid(format!("no triangle decomposition exists (searched {nodes} nodes)")))
                }
                DecomposeOutcome::Exhausted { nodes } => Err(Failure::Budget(format!("decomposition stopped after {nodes} nodes"))),
            }
        }
        Command::Boost(a) => {
            let chi = read_colouring(&a.colouring)?;
            let n = chi.order();
            let mut config = BoostConfig::for_order(n, a.seed);
            config.selection = SelectionParams {
                target_count: a.target_count.unwrap_or(config.selection.target_count),
                vertex_cap: a.vertex_cap.unwrap_or(config.selection.vertex_cap),
                mode: match a.mode {
                    Mode::Greedy => SelectionMode::Greedy { seed: a.seed },
                    Mode::Sampled => SelectionMode::Sampled { p: a.p, seed: a.seed },
                },
            };
            config.gadget_pool = a.pool;
            config.probe_budget = a.probes;
            config.decompose_budget = a.budget;
            config.colour_guided = !a.plain;
            config.guided_restarts = a.restarts;
            match boost(&chi, &config)? {
                BoostOutcome::Completed(rep) => {
                    let selected: Vec<String> = rep.selection.chosen.iter().map(|g| g.copy.to_string()).collect();
                    let result = json!({
                        "n": rep.n,
                        "r": rep.r,
                        "gadget_count_found": rep.gadgets_found,
                        "selected": selected,
                        "halved": rep.halved,
                        "T_vector": rep.t_vector,
                        "I_vector": rep.i_vector,
                        "S_vector": rep.s_vector,
                        "chosen_colour": rep.chosen_colour,
                        "counts": rep.profile.counts,
                        "discrepancy": ratio(rep.discrepancy),
                        "decomposition_source": to_value(&rep.decomposition_source),
                        "decomposition_nodes": rep.decomposition_nodes,
                    });
                    let mut resolved = to_value(a);
                    resolved["resolved"] = to_value(&config);
                    out.emit_resolved("boost", resolved, with_file(result, &a.out, io::format_triple_system(&rep.system))?)
                }
                BoostOutcome::DecompositionFailed { selection, nodes, budget_exhausted } => {
                    let copies: Vec<String> = selection.chosen.iter().map(|g| g.copy.to_string()).collect();
                    let msg = format!("leave graph not decomposed after {nodes} nodes; selection: [{}]", copies.join("; "));
                    if budget_exhausted {
                        Err(Failure::Budget(msg))
                    } else {
                        Err(Failure::Invalid(msg))
                    }
                }
            }
        }
        Command::TradeSearch(a) => {
            let s = read_system(&a.system)?;
            let chi = read_colouring(&a.colouring)?;
            let res = pasch_trade_search(&s, &chi, a.iterations, a.seed)?;
            let result = json!({
                "trades": res.trades,
                "initial_discrepancy": ratio(res.initial_discrepancy),
                "final_discrepancy": ratio(res.final_discrepancy),
            });
            out.emit("trade-search", a, with_file(result, &a.out, io::format_triple_system(&res.system))?)
        }
        Command::Baseline(a) => {
            let chi = read_colouring(&a.colouring)?;
            let res = baseline_random_embedding(&chi, a.trials, a.seed)?;
            let result = json!({
                "trials": res.trials,
                "best_trial": res.best_trial,
                "discrepancy": ratio(res.discrepancy),
                "counts": ColourProfile::of_triples(&chi, res.system.triples()).counts,
            });
            out.emit("baseline", a, with_file(result, &a.out, io::format_triple_system(&res.system))?)
        }
        Command::Enumerate(a) => {
            if a.count_only {
                print_stdout(&format!("{}\n", count_all_sts(a.n)?))
            } else {
                let systems: Vec<String> = enumerate_all_sts(a.n)?.map(|s| io::format_triple_system(&s)).collect();
                out.emit("enumerate", a, json!({ "n": a.n, "count": systems.len(), "systems": systems }))
            }
        }
        Command::Analyze(a) => {
            let chi = read_colouring(&a.colouring)?;
            let params = AnalyzeParams {
                exact_cap: a.exact_cap,
                samples: a.samples,
                density_threshold: a.density_threshold,
                residual_threshold: a.residual_threshold,
                seed: a.seed,
            };
            let rep = analyze_r_colouring(&chi, &params)?;
            out.emit_resolved("analyze", json!({ "colouring": a.colouring, "params": params }), to_value(&rep))
        }
        Command::Verify(a) => {
            let s = read_system(&a.system)?;
            let v = validate_sts(&s);
            let mut result = json!({ "n": s.order(), "triples": s.len(), "valid_sts": v.valid, "violation": to_value(&v.violation) });
            if let Some(path) = &a.colouring {
                let chi = read_colouring(path)?;
                if chi.order() != s.order() {
                    return Err(Error::OrderMismatch { left: s.order(), right: chi.order() }.into());
                }
                let profile = ColourProfile::of_triples(&chi, s.triples());
                result["counts"] = json!(profile.counts);
                if !s.is_empty() {
                    result["discrepancy"] = ratio(profile.discrepancy()?);
                }
            }
            out.emit("verify", a, result)?;
            if v.valid {
                Ok(())
            } else {
                let p = v.violation.expect("invalid systems report a pair");
                Err(Failure::Invalid(format!("not a Steiner triple system: pair {} {} covered {} times", p.pair.0, p.pair.1, p.coverage)))
            }
        }
    }
}
