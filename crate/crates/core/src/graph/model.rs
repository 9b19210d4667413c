use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::entities::{EntityId, EntityKind, SiteKind, TypeKind};
use crate::resolve::UnresolvedReason;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    Dependency,
    Reference,
    Implementation,
    Group,
}

impl Relation {
    pub const ALL: [Relation; 4] = [
        Relation::Dependency,
        Relation::Reference,
        Relation::Implementation,
        Relation::Group,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Dependency => "Dependency",
            Relation::Reference => "Reference",
            Relation::Implementation => "Implementation",
            Relation::Group => "Group",
        }
    }

    /// Case-insensitive parse, as used on the command line.
    pub fn parse(s: &str) -> Option<Self> {
        Relation::ALL.into_iter().find(|r| r.as_str().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub from: EntityId,
    pub to: EntityId,
    pub relation: Relation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_kind: Option<SiteKind>,
}

impl Edge {
    /// Sort key: (from, relation, to, site_kind) on rendered strings.
    pub fn sort_key(&self) -> (String, &'static str, String, &'static str) {
        (
            self.from.to_string(),
            self.relation.as_str(),
            self.to.to_string(),
            self.site_kind.map_or("", SiteKind::as_str),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeGraph {
    pub nodes: Vec<EntityId>,
    pub edges: Vec<Edge>,
}

impl CodeGraph {
    pub fn count(&self, relation: Relation) -> usize {
        self.edges.iter().filter(|e| e.relation == relation).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanRecord {
    pub file: String,
    pub byte_start: usize,
    pub byte_end: usize,
    pub start_line: u32,
    pub end_line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityRecord {
    pub kind: EntityKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_kind: Option<TypeKind>,
    pub span: SpanRecord,
    pub signature: String,
    pub source_text: String,
    pub exported: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackageRecord {
    pub functions: BTreeMap<String, EntityRecord>,
    pub types: BTreeMap<String, EntityRecord>,
    pub variables: BTreeMap<String, EntityRecord>,
}

impl PackageRecord {
    pub fn bucket(&self, kind: EntityKind) -> &BTreeMap<String, EntityRecord> {
        match kind {
            EntityKind::Function => &self.functions,
            EntityKind::Type => &self.types,
            EntityKind::Variable => &self.variables,
        }
    }

    pub fn bucket_mut(&mut self, kind: EntityKind) -> &mut BTreeMap<String, EntityRecord> {
        match kind {
            EntityKind::Function => &mut self.functions,
            EntityKind::Type => &mut self.types,
            EntityKind::Variable => &mut self.variables,
        }
    }

    pub fn entity(&self, symbol: &str) -> Option<&EntityRecord> {
        self.functions
            .get(symbol)
            .or_else(|| self.types.get(symbol))
            .or_else(|| self.variables.get(symbol))
    }

    pub fn len(&self) -> usize {
        self.functions.len() + self.types.len() + self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleRecord {
    /// External package names: declared in the manifest or imported.
    pub dependencies: Vec<String>,
    pub packages: BTreeMap<String, PackageRecord>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnresolvedCounts {
    pub cycle: usize,
    pub not_found: usize,
    pub shadowed: usize,
    pub unsupported: usize,
}

impl UnresolvedCounts {
    pub fn add(&mut self, reason: UnresolvedReason) {
        *self.get_mut(reason) += 1;
    }

    pub fn get(&self, reason: UnresolvedReason) -> usize {
        match reason {
            UnresolvedReason::Cycle => self.cycle,
            UnresolvedReason::NotFound => self.not_found,
            UnresolvedReason::Shadowed => self.shadowed,
            UnresolvedReason::Unsupported => self.unsupported,
        }
    }

    fn get_mut(&mut self, reason: UnresolvedReason) -> &mut usize {
        match reason {
            UnresolvedReason::Cycle => &mut self.cycle,
            UnresolvedReason::NotFound => &mut self.not_found,
            UnresolvedReason::Shadowed => &mut self.shadowed,
            UnresolvedReason::Unsupported => &mut self.unsupported,
        }
    }

    pub fn total(&self) -> usize {
        self.cycle + self.not_found + self.shadowed + self.unsupported
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    pub ambiguous_star_exports: usize,
    pub duplicate_symbols: usize,
    pub parse_errors: usize,
    pub unresolved_by_reason: UnresolvedCounts,
    pub warnings: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniAstIndex {
    pub repo_name: String,
    pub modules: BTreeMap<String, ModuleRecord>,
    pub graph: CodeGraph,
    pub diagnostics: Diagnostics,
}

impl UniAstIndex {
    pub fn entity(&self, id: &EntityId) -> Option<&EntityRecord> {
        self.modules
            .get(&id.module)?
            .packages
            .get(&id.package)?
            .entity(&id.symbol)
    }

    pub fn entity_count(&self) -> usize {
        self.modules
            .values()
            .flat_map(|m| m.packages.values())
            .map(PackageRecord::len)
            .sum()
    }

    pub fn package_count(&self) -> usize {
        self.modules.values().map(|m| m.packages.len()).sum()
    }
}
