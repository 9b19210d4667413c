//! The repository code index: relation graph and JSON form.

pub mod model;
pub mod serialize;

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::entities::{Entity, EntityId};
use crate::resolve::{Resolution, ResolvedProject};
pub use model::*;
pub use serialize::{load_index, serialize_index, validate, SchemaError};

/// Builds nodes and the four relations. Every internal target must be one of
/// `entities`.
pub fn build_graph<'a>(entities: impl IntoIterator<Item = &'a Entity>, resolved: &ResolvedProject) -> CodeGraph {
    let mut nodes: Vec<EntityId> = Vec::new();
    let mut edges: HashSet<Edge> = HashSet::new();
    for e in entities {
        nodes.push(e.id.clone());
        if let Some(anchor) = &e.group_anchor {
            if *anchor != e.id {
                edges.insert(Edge {
                    from: e.id.clone(),
                    to: anchor.clone(),
                    relation: Relation::Group,
                    site_kind: None,
                });
            }
        }
    }
    let known: HashSet<&EntityId> = nodes.iter().collect();
    for r in &resolved.sites {
        let Resolution::Internal { target, .. } = &r.resolution else {
            continue;
        };
        assert!(known.contains(target), "resolver produced unknown target {target}");
        if *target == r.site.from {
            continue;
        }
        edges.insert(Edge {
            from: r.site.from.clone(),
            to: target.clone(),
            relation: Relation::Dependency,
            site_kind: Some(r.site.kind),
        });
        edges.insert(Edge {
            from: target.clone(),
            to: r.site.from.clone(),
            relation: Relation::Reference,
            site_kind: Some(r.site.kind),
        });
    }
    for (class, interface) in &resolved.implementations {
        if class != interface {
            edges.insert(Edge {
                from: class.clone(),
                to: interface.clone(),
                relation: Relation::Implementation,
                site_kind: None,
            });
        }
    }
    let mut edges: Vec<Edge> = edges.into_iter().collect();
    edges.sort_by_cached_key(Edge::sort_key);
    nodes.sort_by_cached_key(EntityId::to_string);
    nodes.dedup();
    CodeGraph { nodes, edges }
}

/// Checks that Reference edges mirror Dependency edges one to one and that
/// every endpoint is a node. Returns the first violation.
pub fn check_graph_invariants(graph: &CodeGraph) -> Result<(), String> {
    let nodes: HashSet<&EntityId> = graph.nodes.iter().collect();
    let mut deps: HashMap<(&EntityId, &EntityId), BTreeSet<_>> = HashMap::new();
    let mut refs: HashMap<(&EntityId, &EntityId), BTreeSet<_>> = HashMap::new();
    for e in &graph.edges {
        if !nodes.contains(&e.from) || !nodes.contains(&e.to) {
            return Err(format!("edge {} -> {} leaves the node set", e.from, e.to));
        }
        match e.relation {
            Relation::Dependency => {
                deps.entry((&e.from, &e.to)).or_default().insert(e.site_kind);
            }
            Relation::Reference => {
                refs.entry((&e.to, &e.from)).or_default().insert(e.site_kind);
            }
            _ => {}
        }
    }
    if graph.count(Relation::Dependency) != graph.count(Relation::Reference) {
        return Err(format!(
            "{} dependency edges but {} reference edges",
            graph.count(Relation::Dependency),
            graph.count(Relation::Reference)
        ));
    }
    if deps != refs {
        return Err("reference edges do not mirror dependency edges".to_string());
    }
    Ok(())
}
