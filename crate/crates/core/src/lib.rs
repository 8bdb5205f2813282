//! Symbolic program synthesis over two constrained DSLs: ordered cascades of
//! literal string-rewrite operations induced from input-output examples, and
//! relational classification rules induced from labeled ground-fact
//! descriptions of trains.
//!
//! The crate is organized around pure, deterministic building blocks:
//!
//! - [`dsl`] — the rewrite DSL, its execution semantics, and search-space
//!   counting
//! - [`metrics`] — reward, edit similarity, complexity gap, corpus reports
//! - [`diff`] — candidate-op extraction from string pairs via
//!   longest-matching-block alignment
//! - [`solvers`] — six synthesis strategies plus their union ensemble
//! - [`slr`] — ground-fact parsing, train normalization, and layered rule
//!   induction
//! - [`taskgen`] — deterministic task generation with known ground truth
//! - [`hybrid`] — solver-first inference with pluggable fallback generation
//!   and token/cost accounting
//! - [`records`] — the canonical JSONL file formats
//!
//! Everything is deterministic given its inputs (including seeds); there is
//! no shared mutable state, so tasks can be evaluated in parallel freely.

pub mod diff;
pub mod dsl;
pub mod hybrid;
pub mod metrics;
pub mod records;
pub mod slr;
pub mod solvers;
pub mod taskgen;
