//! Steiner triple systems under colourings of the complete 3-uniform
//! hypergraph: discrepancy evaluation, Pasch gadgets, structure recovery for
//! 2-colourings, triangle decomposition, and the gadget-boosting pipeline.

pub mod decompose;
pub mod error;
pub mod gadgets;
pub mod generators;
pub mod hypergraph;
pub mod io;
pub mod pipeline;
pub mod rng;
pub mod structure;
pub mod sts;

pub use error::{Error, Result};
pub use hypergraph::{Colour, ColourProfile, Colouring, Triple, TripleSystem, Vertex};
pub use num_rational::Ratio;
