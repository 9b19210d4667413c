//! Queries over a loaded index.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::entities::{EntityId, EntityKind, TypeKind};
use crate::graph::{Relation, SpanRecord, UniAstIndex};

/// An entity record together with its id, as printed by `query entity`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntityView {
    pub id: EntityId,
    pub kind: EntityKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub type_kind: Option<TypeKind>,
    pub signature: String,
    pub span: SpanRecord,
    pub source_text: String,
    pub exported: bool,
}

pub fn entity_view(index: &UniAstIndex, id: &EntityId) -> Option<EntityView> {
    let r = index.entity(id)?;
    Some(EntityView {
        id: id.clone(),
        kind: r.kind,
        type_kind: r.type_kind,
        signature: r.signature.clone(),
        span: r.span.clone(),
        source_text: r.source_text.clone(),
        exported: r.exported,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Neighbor {
    pub id: EntityId,
    /// Relation of the edge that first reached this entity.
    pub relation: Relation,
    pub hops: usize,
    pub signature: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Neighborhood {
    pub center: EntityId,
    pub neighbors: Vec<Neighbor>,
}

/// Breadth-first search from `center` over edges of the given relations,
/// up to `depth` hops. Edges are followed from their source to their
/// target, except Group edges, which are followed both ways. Returns `None`
/// when `center` is not in the index.
pub fn neighbors(index: &UniAstIndex, center: &EntityId, relations: &[Relation], depth: usize) -> Option<Neighborhood> {
    index.entity(center)?;
    let wanted: BTreeSet<Relation> = relations.iter().copied().collect();
    let mut adjacency: HashMap<&EntityId, Vec<(&EntityId, Relation)>> = HashMap::new();
    for e in &index.graph.edges {
        if !wanted.contains(&e.relation) {
            continue;
        }
        adjacency.entry(&e.from).or_default().push((&e.to, e.relation));
        if e.relation == Relation::Group {
            adjacency.entry(&e.to).or_default().push((&e.from, e.relation));
        }
    }
    let mut seen: BTreeSet<&EntityId> = BTreeSet::from([center]);
    let mut frontier: Vec<&EntityId> = vec![center];
    let mut found = Vec::new();
    for hops in 1..=depth {
        // Smallest relation wins when several edges reach a node at once.
        let mut level: BTreeMap<&EntityId, Relation> = BTreeMap::new();
        for node in &frontier {
            for &(next, relation) in adjacency.get(node).into_iter().flatten() {
                if seen.contains(next) {
                    continue;
                }
                level
                    .entry(next)
                    .and_modify(|r| *r = (*r).min(relation))
                    .or_insert(relation);
            }
        }
        if level.is_empty() {
            break;
        }
        frontier = level.keys().copied().collect();
        for (id, relation) in level {
            seen.insert(id);
            found.push(Neighbor {
                id: id.clone(),
                relation,
                hops,
                signature: index.entity(id).map(|r| r.signature.clone()).unwrap_or_default(),
            });
        }
    }
    found.sort_by_cached_key(|n| (n.hops, n.id.to_string()));
    Some(Neighborhood {
        center: center.clone(),
        neighbors: found,
    })
}
