//! Identify, rank and evaluate writers across Wikipedia language editions.
//!
//! The pipeline ingests DBpedia N-Triples dumps into per-language stores,
//! identifies writer articles through three competing approaches (instance
//! type, category-graph traversal, occupation matching), filters them into a
//! basic set, ranks them with seven intrinsic/extrinsic measures, and
//! evaluates the rankings via rank correlation, canon-based ROC/AUC,
//! temporal activity curves and cross-language reciprocal-rank scores.
//!
//! Entry points: [`pipeline::run`] drives the whole thing from a
//! [`config::PipelineConfig`]; the individual modules are usable on their
//! own.

pub mod error;
pub mod ingest;
pub mod intern;
pub mod linkgraph;
pub mod ntriples;
pub mod snapshot;
pub mod store;

pub use error::{Error, Result};
