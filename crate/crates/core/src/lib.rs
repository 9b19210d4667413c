//! Repository indexer for a TypeScript subset: functions, types and
//! variables as entities, linked by dependency, reference, implementation
//! and group relations, written as one JSON index.

pub mod cli;
pub mod entities;
pub mod graph;
pub mod indexer;
pub mod project;
pub mod query;
pub mod resolve;
pub mod syntax;
