use thiserror::Error;

use crate::hypergraph::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} is outside [1, {n}]")]
    VertexOutOfRange { vertex: Vertex, n: usize },

    #[error("triple has repeated vertices: {0:?}")]
    DegenerateTriple([Vertex; 3]),

    #[error("rank {rank} is outside [0, {size})")]
    RankOutOfRange { rank: usize, size: usize },

    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("colour {colour} is outside [1, {r}]")]
    ColourOutOfRange { colour: u8, r: usize },

    #[error("need at least 2 colours, got {0}")]
    TooFewColours(usize),

    #[error("discrepancy of an empty system is undefined")]
    EmptySystem,

    #[error("duplicate triple {0:?}")]
    DuplicateTriple([Vertex; 3]),

    #[error("no Steiner triple system of order {n}: n mod 6 = {residue}, need n = 1 or 3 (mod 6)")]
    BadResidue { n: usize, residue: usize },

    #[error("order {n} is not supported here ({reason})")]
    UnsupportedOrder { n: usize, reason: &'static str },

    #[error("graph is not K3-divisible: {0}")]
    NotDivisible(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
