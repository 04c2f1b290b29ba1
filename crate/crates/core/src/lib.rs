//! Citation-network disruption analysis toolkit.
//!
//! Builds a validated citation graph, scores papers with the classic
//! disruption index and its variants, trains directional (past/future)
//! paper embeddings from past-directed random walks, and derives the
//! embedding disruptiveness measure, a degree-preserving null model, and
//! future-vector twin detection on top.

pub mod alias;
pub mod disruption;
pub mod edm;
pub mod embed;
pub mod graph;
pub mod manifest;
pub mod nullmodel;
pub mod rng;
pub mod sgns;
pub mod stats;
pub mod synth;
pub mod tables;
pub mod twins;
pub mod walk;

pub use graph::{CitationGraph, DocType, FilterPolicy, PaperId, PaperMeta};
