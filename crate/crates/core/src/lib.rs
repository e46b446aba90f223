//! Aspect-oriented source models: parsing, weaving, control-flow graphs,
//! Kripke structures and property checking.

pub mod flowgraph;
pub mod frontend;
pub mod kripke;
pub mod logic;
pub mod pipeline;
pub mod registry;
pub mod weaver;
