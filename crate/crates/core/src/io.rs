//! Plain-text formats for colourings, triple systems, K222 copies and graphs.
//!
//! Blank lines and lines starting with `#` are ignored everywhere.
//!
//! * Colouring, dense: `n r`, then `C(n, 3)` colour ids in colex order.
//! * Colouring, sparse: `n r default=<c>`, then `a b c colour` lines.
//! * Triple system: `n`, then `a b c` lines.
//! * Copies: `a1 a2 b1 b2 c1 c2` lines.
//! * Graph: an optional `n` line, then `a b` lines; or the single line
//!   `K <n> minus-shadows <copies file>`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::decompose::{shadow, SimpleGraph};
use crate::error::{Error, Result};
use crate::gadgets::K222Copy;
use crate::hypergraph::{triple_count, Colour, Colouring, Triple, TripleIter, TripleSystem, Vertex};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

// (1-based line number, trimmed content) for every meaningful line
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

fn numbers<T: std::str::FromStr>(l: &str, line: usize, count: usize, what: &str) -> Result<Vec<T>> {
    let toks: Vec<&str> = l.split_whitespace().collect();
    if toks.len() != count {
        return Err(parse_err(line, format!("expected {count} fields for {what}, found {}", toks.len())));
    }
    toks.iter().map(|t| parse_num(t, line, what)).collect()
}

fn triple_at(v: &[Vertex], line: usize) -> Result<Triple> {
    Triple::new(v[0], v[1], v[2]).map_err(|e| parse_err(line, e.to_string()))
}

pub fn parse_colouring(text: &str) -> Result<Colouring> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing header `n r`"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (n, r, default) = match toks.as_slice() {
        [n, r] => (parse_num::<usize>(n, hl, "order")?, parse_num::<usize>(r, hl, "colour count")?, None),
        [n, r, d] => {
            let c = d.strip_prefix("default=").ok_or_else(|| parse_err(hl, format!("expected default=<c>, found `{d}`")))?;
            (parse_num(n, hl, "order")?, parse_num(r, hl, "colour count")?, Some(parse_num::<Colour>(c, hl, "colour")?))
        }
        _ => return Err(parse_err(hl, "header must be `n r` or `n r default=<c>`")),
    };
    match default {
        None => {
            let mut values = Vec::with_capacity(triple_count(n));
            for (ln, l) in lines {
                values.push(parse_num::<Colour>(l, ln, "colour")?);
            }
            if values.len() != triple_count(n) {
                return Err(parse_err(hl, format!("expected {} colours, found {}", triple_count(n), values.len())));
            }
            Colouring::from_values(n, r, values)
        }
        Some(d) => {
            let mut chi = Colouring::monochromatic(n, r, d)?;
            for (ln, l) in lines {
                let v: Vec<Vertex> = numbers(l, ln, 4, "triple and colour")?;
                let t = triple_at(&v, ln)?;
                let colour = Colour::try_from(v[3]).map_err(|_| parse_err(ln, "colour too large"))?;
                chi.set(&t, colour).map_err(|e| parse_err(ln, e.to_string()))?;
            }
            Ok(chi)
        }
    }
}

pub fn format_colouring(chi: &Colouring) -> String {
    let mut out = String::with_capacity(2 * chi.values().len() + 16);
    writeln!(out, "{} {}", chi.order(), chi.colours()).unwrap();
    for c in chi.values() {
        writeln!(out, "{c}").unwrap();
    }
    out
}

/// Sparse form listing the triples that differ from `default`.
pub fn format_colouring_sparse(chi: &Colouring, default: Colour) -> String {
    let mut out = format!("{} {} default={default}\n", chi.order(), chi.colours());
    for (t, &c) in TripleIter::new(chi.order()).zip(chi.values()) {
        if c != default {
            writeln!(out, "{t} {c}").unwrap();
        }
    }
    out
}

pub fn parse_triple_system(text: &str) -> Result<TripleSystem> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing header `n`"))?;
    let n: usize = parse_num(header, hl, "order")?;
    let mut triples = Vec::new();
    for (ln, l) in lines {
        let v: Vec<Vertex> = numbers(l, ln, 3, "triple")?;
        triples.push(triple_at(&v, ln)?);
    }
    TripleSystem::new(n, triples)
}

pub fn format_triple_system(s: &TripleSystem) -> String {
    let mut out = format!("{}\n", s.order());
    for t in s.canonical() {
        writeln!(out, "{t}").unwrap();
    }
    out
}

pub fn parse_copies(text: &str) -> Result<Vec<K222Copy>> {
    content_lines(text)
        .map(|(ln, l)| {
            let v: Vec<Vertex> = numbers(l, ln, 6, "copy")?;
            K222Copy::new([v[0], v[1]], [v[2], v[3]], [v[4], v[5]]).map_err(|e| parse_err(ln, e.to_string()))
        })
        .collect()
}

pub fn format_copies(copies: &[K222Copy]) -> String {
    let mut out = String::new();
    for k in copies {
        writeln!(out, "{k}").unwrap();
    }
    out
}

/// A graph file before any referenced copies file is read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphSource {
    Edges(SimpleGraph),
    CompleteMinusShadows { n: usize, copies_path: String },
}

pub fn parse_graph_source(text: &str) -> Result<GraphSource> {
    let lines: Vec<(usize, &str)> = content_lines(text).collect();
    if let Some(&(ln, first)) = lines.first() {
        let toks: Vec<&str> = first.split_whitespace().collect();
        if toks.first() == Some(&"K") {
            let [_, n, kw, path] = toks.as_slice() else {
                return Err(parse_err(ln, "expected `K <n> minus-shadows <copies file>`"));
            };
            if *kw != "minus-shadows" {
                return Err(parse_err(ln, format!("expected `minus-shadows`, found `{kw}`")));
            }
            if lines.len() > 1 {
                return Err(parse_err(lines[1].0, "nothing may follow a `K` line"));
            }
            return Ok(GraphSource::CompleteMinusShadows { n: parse_num(n, ln, "order")?, copies_path: path.to_string() });
        }
    }
    let mut rest = &lines[..];
    let mut declared = None;
    if let Some(&(ln, first)) = lines.first() {
        if first.split_whitespace().count() == 1 {
            declared = Some(parse_num::<usize>(first, ln, "order")?);
            rest = &lines[1..];
        }
    }
    let mut edges = Vec::with_capacity(rest.len());
    for &(ln, l) in rest {
        let v: Vec<Vertex> = numbers(l, ln, 2, "edge")?;
        if v[0] == 0 || v[1] == 0 || v[0] == v[1] {
            return Err(parse_err(ln, format!("bad edge {} {}", v[0], v[1])));
        }
        edges.push((ln, v[0], v[1]));
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|e| e.1.max(e.2) as usize).max().unwrap_or(0));
    let mut g = SimpleGraph::empty(n)?;
    for (ln, u, v) in edges {
        g.add_edge(u, v).map_err(|e| parse_err(ln, e.to_string()))?;
    }
    Ok(GraphSource::Edges(g))
}

/// Reads a graph file, resolving a copies file relative to the graph file.
pub fn read_graph(path: &Path) -> Result<SimpleGraph> {
    match parse_graph_source(&read_text(path)?)? {
        GraphSource::Edges(g) => Ok(g),
        GraphSource::CompleteMinusShadows { n, copies_path } => {
            let p = Path::new(&copies_path);
            let p = if p.is_relative() { path.parent().unwrap_or(Path::new(".")).join(p) } else { p.to_path_buf() };
            let copies = parse_copies(&read_text(&p)?)?;
            SimpleGraph::complete(n)?.minus(&shadow(n, &copies)?)
        }
    }
}

pub fn format_graph(g: &SimpleGraph) -> String {
    let mut out = format!("{}\n", g.order());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::random_colouring;
    use crate::sts::construct_sts;

    #[test]
    fn colouring_round_trip() {
        let chi = random_colouring(8, 3, 1).unwrap();
        assert_eq!(parse_colouring(&format_colouring(&chi)).unwrap(), chi);
        for d in 1..=3 {
            assert_eq!(parse_colouring(&format_colouring_sparse(&chi, d)).unwrap(), chi);
        }
    }

    #[test]
    fn dense_colouring_layout() {
        let text = "# four points\n4 2\n1\n2\n\n1\n2\n";
        let chi = parse_colouring(text).unwrap();
        assert_eq!(chi.colour_of(1, 2, 3), 1);
        assert_eq!(chi.colour_of(1, 2, 4), 2);
        assert_eq!(chi.colour_of(2, 3, 4), 2);
    }

    #[test]
    fn sparse_colouring() {
        let chi = parse_colouring("6 2 default=1\n3 1 5 2\n").unwrap();
        assert_eq!(chi.colour_of(1, 3, 5), 2);
        assert_eq!(chi.class_sizes(), vec![19, 1]);
        assert!(matches!(parse_colouring("6 2 default=1\n1 1 5 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_colouring("6 2 default=3\n"), Err(Error::ColourOutOfRange { .. })));
    }

    #[test]
    fn colouring_errors() {
        assert!(matches!(parse_colouring(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_colouring("4 2\n1\n1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_colouring("4 2\n1\nx\n1\n1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(parse_colouring("4 2\n1\n1\n1\n3\n").is_err());
    }

    #[test]
    fn triple_system_round_trip() {
        let s = construct_sts(9).unwrap();
        let text = format_triple_system(&s);
        assert!(text.starts_with("9\n1 2 "));
        assert_eq!(parse_triple_system(&text).unwrap().canonical(), s.canonical());
        assert!(parse_triple_system("7\n1 2 3\n1 2 3\n").is_err());
        assert!(matches!(parse_triple_system("7\n1 2\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn copies_and_graphs() {
        let copies = parse_copies("1 2 3 4 5 6\n# c\n7 8 9 10 11 12\n").unwrap();
        assert_eq!(copies.len(), 2);
        assert_eq!(parse_copies(&format_copies(&copies)).unwrap(), copies);
        assert!(parse_copies("1 2 3 4 5 5\n").is_err());

        let g = match parse_graph_source("1 2\n2 3\n1 3\n").unwrap() {
            GraphSource::Edges(g) => g,
            other => panic!("{other:?}"),
        };
        assert_eq!((g.order(), g.edge_count()), (3, 3));
        let g5 = match parse_graph_source("5\n1 2\n").unwrap() {
            GraphSource::Edges(g) => g,
            other => panic!("{other:?}"),
        };
        assert_eq!(g5.order(), 5);
        assert_eq!(
            parse_graph_source("K 13 minus-shadows c.txt\n").unwrap(),
            GraphSource::CompleteMinusShadows { n: 13, copies_path: "c.txt".into() }
        );
        assert!(parse_graph_source("K 13 plus c.txt\n").is_err());
        assert!(parse_graph_source("1 1\n").is_err());
    }
}
