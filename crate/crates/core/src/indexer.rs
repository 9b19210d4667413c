//! End-to-end indexing: discover, parse in parallel, resolve, assemble.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::entities::Entity;
use crate::graph::{
    build_graph, CodeGraph, Diagnostics, EntityRecord, ModuleRecord, Relation, SpanRecord, UniAstIndex,
};
use crate::project::{discover_layout, DiscoverOptions, ProjectError, ProjectLayout};
use crate::resolve::{
    is_relative, FileFacts, Resolution, ResolvedProject, Resolver, SpecifierResolver, SpecifierTarget,
};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error(transparent)]
    Project(#[from] ProjectError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Default)]
pub struct IndexOptions {
    pub discover: DiscoverOptions,
    /// Parse-phase worker count; `None` uses one per core.
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct IndexOutput {
    pub index: UniAstIndex,
    pub warnings: Vec<String>,
    pub elapsed: Duration,
}

impl IndexOutput {
    pub fn files(&self) -> usize {
        self.index.package_count()
    }

    pub fn summary(&self) -> String {
        let g = &self.index.graph;
        format!(
            "indexed {} files, {} entities, {} edges ({} dependency), {} unresolved in {:.3}s",
            self.files(),
            self.index.entity_count(),
            g.edges.len(),
            g.count(Relation::Dependency),
            self.index.diagnostics.unresolved_by_reason.total(),
            self.elapsed.as_secs_f64()
        )
    }
}

/// Parsed and resolved project, before assembly into an index.
pub struct Analysis {
    pub layout: ProjectLayout,
    pub facts: BTreeMap<String, FileFacts>,
    pub specifiers: SpecifierResolver,
    pub resolved: ResolvedProject,
    pub warnings: Vec<String>,
}

pub fn analyze_repository(root: &Path, opts: &IndexOptions) -> Result<Analysis, IndexError> {
    let layout = discover_layout(root, &opts.discover)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = opts.jobs {
        builder = builder.num_threads(jobs.max(1));
    }
    let pool = builder.build().map_err(|e| IndexError::Pool(e.to_string()))?;
    let inputs: Vec<(&str, &str)> = layout
        .modules
        .iter()
        .flat_map(|m| m.source_files.iter().map(move |f| (m.name.as_str(), f.as_str())))
        .collect();
    let parsed: Vec<Result<(FileFacts, Option<String>), IndexError>> = pool.install(|| {
        inputs
            .par_iter()
            .map(|(module, path)| {
                let full = layout.root.join(path);
                let bytes = std::fs::read(&full).map_err(|source| IndexError::Read { path: full, source })?;
                Ok(match String::from_utf8(bytes) {
                    Ok(source) => (FileFacts::analyze(module, path, &source), None),
                    Err(_) => (
                        FileFacts::analyze(module, path, ""),
                        Some(format!("{path}: not valid UTF-8; indexed without entities")),
                    ),
                })
            })
            .collect()
    });
    let mut facts = BTreeMap::new();
    let mut warnings = layout.warnings.clone();
    for r in parsed {
        let (f, warning) = r?;
        warnings.extend(warning);
        facts.insert(f.path.clone(), f);
    }
    // Resolution runs on the same pool; its output order does not depend on it.
    let specifiers = SpecifierResolver::new(&layout);
    let resolved = pool.install(|| Resolver::new(&facts, &specifiers).resolve_all());
    Ok(Analysis {
        layout,
        facts,
        specifiers,
        resolved,
        warnings,
    })
}

pub fn index_repository(root: &Path, opts: &IndexOptions) -> Result<IndexOutput, IndexError> {
    let started = Instant::now();
    let mut a = analyze_repository(root, opts)?;
    let index = assemble(&a.layout, &a.facts, &a.specifiers, &a.resolved, &mut a.warnings);
    Ok(IndexOutput {
        index,
        warnings: a.warnings,
        elapsed: started.elapsed(),
    })
}

/// Builds the index from resolved facts. Appends diagnostics to `warnings`.
pub fn assemble(
    layout: &ProjectLayout,
    facts: &BTreeMap<String, FileFacts>,
    specifiers: &SpecifierResolver,
    resolved: &ResolvedProject,
    warnings: &mut Vec<String>,
) -> UniAstIndex {
    let mut diagnostics = Diagnostics::default();
    let mut modules = BTreeMap::new();
    // Modules without source files are left out.
    for spec in layout.modules.iter().filter(|m| !m.source_files.is_empty()) {
        let mut record = ModuleRecord::default();
        let mut deps: BTreeSet<String> = spec.manifest.dependencies.iter().cloned().collect();
        for path in &spec.source_files {
            let Some(f) = facts.get(path) else { continue };
            let package = record.packages.entry(path.clone()).or_default();
            for e in &f.entities {
                package.bucket_mut(e.kind).insert(e.id.symbol.clone(), entity_record(e));
            }
            for s in &f.specifiers {
                if is_relative(s) {
                    continue;
                }
                if let SpecifierTarget::External(p) = specifiers.resolve(path, s) {
                    deps.insert(p);
                }
            }
            diagnostics.parse_errors += f.parse_errors;
            diagnostics.duplicate_symbols += f.duplicates.len();
            for d in &f.duplicates {
                warnings.push(format!("{path}: {d}"));
            }
        }
        record.dependencies = deps.into_iter().collect();
        modules.insert(spec.name.clone(), record);
    }
    for r in &resolved.sites {
        if let Resolution::Unresolved { reason } = r.resolution {
            diagnostics.unresolved_by_reason.add(reason);
        }
    }
    diagnostics.ambiguous_star_exports = resolved.ambiguous.len();
    for (file, name) in &resolved.ambiguous {
        warnings.push(format!(
            "{file}: {name} is exported by several star re-exports; using the first"
        ));
    }
    diagnostics.warnings = warnings.len();
    let graph: CodeGraph = build_graph(facts.values().flat_map(|f| f.entities.iter()), resolved);
    UniAstIndex {
        repo_name: layout.repo_name.clone(),
        modules,
        graph,
        diagnostics,
    }
}

fn entity_record(e: &Entity) -> EntityRecord {
    EntityRecord {
        kind: e.kind,
        type_kind: e.type_kind,
        span: SpanRecord {
            file: e.id.package.clone(),
            byte_start: e.span.byte_start,
            byte_end: e.span.byte_end,
            start_line: e.span.start_line,
            end_line: e.span.end_line,
        },
        signature: e.signature.clone(),
        source_text: e.source_text.clone(),
        exported: e.is_exported,
    }
}
