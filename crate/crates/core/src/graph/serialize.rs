//! Deterministic JSON encoding of the index and schema-checked loading.

use std::collections::HashSet;

use thiserror::Error;

use super::model::*;
use crate::entities::{EntityId, EntityKind};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("schema error at {path}: {message}")]
pub struct SchemaError {
    /// Location in the document, e.g. `graph.edges[3]`.
    pub path: String,
    pub message: String,
}

impl SchemaError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Pretty-printed JSON with sorted object keys and a trailing newline.
pub fn serialize_index(index: &UniAstIndex) -> Vec<u8> {
    // `Value` objects are ordered maps, so keys come out sorted.
    let value = serde_json::to_value(index).expect("index is always representable as JSON");
    let mut out = serde_json::to_vec_pretty(&value).expect("serializing a JSON value cannot fail");
    out.push(b'\n');
    out
}

pub fn load_index(bytes: &[u8]) -> Result<UniAstIndex, SchemaError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let index: UniAstIndex = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        SchemaError::new(
            if path == "." { "$".to_string() } else { path },
            e.into_inner().to_string(),
        )
    })?;
    validate(&index)?;
    Ok(index)
}

/// Structural checks beyond field types: record placement, node/record
/// correspondence and edge endpoint closure.
pub fn validate(index: &UniAstIndex) -> Result<(), SchemaError> {
    let mut records = HashSet::new();
    for (module, m) in &index.modules {
        for (package, p) in &m.packages {
            for kind in [EntityKind::Function, EntityKind::Type, EntityKind::Variable] {
                for (symbol, record) in p.bucket(kind) {
                    let path = format!("modules.{module}.packages.{package}.{}.{symbol}", bucket_name(kind));
                    if record.kind != kind {
                        return Err(SchemaError::new(
                            path,
                            format!("kind {} in the wrong bucket", record.kind.as_str()),
                        ));
                    }
                    if record.type_kind.is_some() != (kind == EntityKind::Type) {
                        return Err(SchemaError::new(path, "type_kind must be present exactly on types"));
                    }
                    if record.span.file != *package {
                        return Err(SchemaError::new(path, "span.file differs from the package path"));
                    }
                    let id: EntityId = format!("{module}#{package}#{symbol}")
                        .parse()
                        .map_err(|e: crate::entities::IdError| SchemaError::new(path.clone(), e.to_string()))?;
                    if !records.insert(id) {
                        return Err(SchemaError::new(path, "symbol appears in more than one bucket"));
                    }
                }
            }
        }
    }
    let mut nodes = HashSet::new();
    let mut previous: Option<String> = None;
    for (i, node) in index.graph.nodes.iter().enumerate() {
        let path = format!("graph.nodes[{i}]");
        let rendered = node.to_string();
        if previous.as_ref().is_some_and(|p| *p >= rendered) {
            return Err(SchemaError::new(path, "nodes must be sorted and unique"));
        }
        if !records.contains(node) {
            return Err(SchemaError::new(path, format!("node {node} has no entity record")));
        }
        nodes.insert(node);
        previous = Some(rendered);
    }
    if nodes.len() != records.len() {
        let mut missing: Vec<String> = records
            .iter()
            .filter(|r| !nodes.contains(r))
            .map(|r| r.to_string())
            .collect();
        missing.sort();
        return Err(SchemaError::new(
            "graph.nodes",
            format!("entity {} has no node", missing[0]),
        ));
    }
    for (i, edge) in index.graph.edges.iter().enumerate() {
        let path = format!("graph.edges[{i}]");
        for end in [&edge.from, &edge.to] {
            if !nodes.contains(end) {
                return Err(SchemaError::new(path, format!("endpoint {end} is not a node")));
            }
        }
        if edge.from == edge.to {
            return Err(SchemaError::new(path, "self edge"));
        }
        let needs_site = matches!(edge.relation, Relation::Dependency | Relation::Reference);
        if edge.site_kind.is_some() != needs_site {
            return Err(SchemaError::new(
                path,
                "site_kind must be present exactly on Dependency and Reference edges",
            ));
        }
    }
    Ok(())
}

fn bucket_name(kind: EntityKind) -> &'static str {
    match kind {
        EntityKind::Function => "functions",
        EntityKind::Type => "types",
        EntityKind::Variable => "variables",
    }
}
