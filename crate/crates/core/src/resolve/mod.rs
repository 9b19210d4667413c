//! Cross-file symbol resolution: export tables, import chains, re-exports
//! and the two-rule receiver inference for method calls.

pub mod builtins;
pub mod exports;
pub mod specifier;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::entities::{analyze_file, DependencySite, Entity, EntityId, EntityKind, SiteKind};
use crate::syntax::{parse_file, ImportedName, SourceFileAst};
pub use builtins::is_builtin;
pub use exports::{build_export_table, import_bindings, module_specifiers, ExportEntry, ExportTable, ImportTarget};
pub use specifier::{is_relative, package_name, resolve_specifier, SpecifierResolver, SpecifierTarget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnresolvedReason {
    Shadowed,
    NotFound,
    Cycle,
    Unsupported,
}

impl UnresolvedReason {
    pub const ALL: [UnresolvedReason; 4] = [
        UnresolvedReason::Cycle,
        UnresolvedReason::NotFound,
        UnresolvedReason::Shadowed,
        UnresolvedReason::Unsupported,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            UnresolvedReason::Shadowed => "shadowed",
            UnresolvedReason::NotFound => "not_found",
            UnresolvedReason::Cycle => "cycle",
            UnresolvedReason::Unsupported => "unsupported",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Resolution {
    /// `hops` counts file transitions along the import chain, at least 1.
    Internal {
        target: EntityId,
        hops: usize,
    },
    External {
        package: String,
    },
    Builtin,
    Unresolved {
        reason: UnresolvedReason,
    },
}

impl Resolution {
    fn unresolved(reason: UnresolvedReason) -> Self {
        Resolution::Unresolved { reason }
    }
}

/// Everything the resolver needs to know about one source file.
#[derive(Debug, Clone)]
pub struct FileFacts {
    pub module: String,
    pub path: String,
    pub entities: Vec<Entity>,
    /// Top-level binding name to entity symbol.
    pub declarations: BTreeMap<String, String>,
    pub imports: BTreeMap<String, ImportTarget>,
    pub exports: ExportTable,
    pub specifiers: Vec<String>,
    pub parse_errors: usize,
    pub duplicates: Vec<String>,
    symbols: HashMap<String, usize>,
}

impl FileFacts {
    pub fn analyze(module: &str, path: &str, source: &str) -> Self {
        let ast = parse_file(path, source);
        Self::from_ast(&ast, module, path, source)
    }

    pub fn from_ast(ast: &SourceFileAst, module: &str, path: &str, source: &str) -> Self {
        let extracted = analyze_file(ast, module, path, source);
        let symbols = extracted
            .entities
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.symbol.clone(), i))
            .collect();
        FileFacts {
            module: module.to_string(),
            path: path.to_string(),
            entities: extracted.entities,
            declarations: extracted.declarations,
            imports: import_bindings(ast),
            exports: build_export_table(ast, path),
            specifiers: module_specifiers(ast),
            parse_errors: ast.errors.len(),
            duplicates: extracted.duplicates,
            symbols,
        }
    }

    pub fn entity(&self, symbol: &str) -> Option<&Entity> {
        self.symbols.get(symbol).map(|&i| &self.entities[i])
    }
}

/// A site paired with its resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedSite {
    pub site: DependencySite,
    pub resolution: Resolution,
}

/// Resolution output for a whole project, in file then entity then site order.
#[derive(Debug, Clone, Default)]
pub struct ResolvedProject {
    pub sites: Vec<ResolvedSite>,
    /// Resolved `implements` clauses: (class, interface).
    pub implementations: Vec<(EntityId, EntityId)>,
    /// (file, name) pairs found through more than one star re-export.
    pub ambiguous: BTreeSet<(String, String)>,
}

#[derive(Debug, Clone)]
enum Target<'a> {
    Entity {
        file: &'a FileFacts,
        symbol: String,
        hops: usize,
    },
    Namespace {
        file: &'a FileFacts,
        hops: usize,
    },
    External(String),
    Builtin,
    Unresolved(UnresolvedReason),
}

impl Target<'_> {
    fn is_found(&self) -> bool {
        matches!(self, Target::Entity { .. } | Target::Namespace { .. })
    }

    fn into_resolution(self) -> Resolution {
        match self {
            Target::Entity { file, symbol, hops } => Resolution::Internal {
                target: EntityId::new(&file.module, &file.path, &symbol),
                hops: hops.max(1),
            },
            // A bare namespace object is not an entity.
            Target::Namespace { .. } => Resolution::unresolved(UnresolvedReason::Unsupported),
            Target::External(package) => Resolution::External { package },
            Target::Builtin => Resolution::Builtin,
            Target::Unresolved(reason) => Resolution::unresolved(reason),
        }
    }
}

type Ambiguous = BTreeSet<(String, String)>;

/// Read-only view over all files of a project.
pub struct Resolver<'a> {
    files: &'a BTreeMap<String, FileFacts>,
    specifiers: &'a SpecifierResolver,
}

impl<'a> Resolver<'a> {
    pub fn new(files: &'a BTreeMap<String, FileFacts>, specifiers: &'a SpecifierResolver) -> Self {
        Resolver { files, specifiers }
    }

    pub fn files(&self) -> &'a BTreeMap<String, FileFacts> {
        self.files
    }

    /// Resolves a top-level name as seen from `file`.
    pub fn resolve_symbol(&self, file: &str, name: &str) -> Resolution {
        match self.files.get(file) {
            Some(facts) => self.symbol(facts, name, &mut Ambiguous::new()).into_resolution(),
            None => Resolution::unresolved(UnresolvedReason::NotFound),
        }
    }

    /// Resolves a possibly dotted name (`Repo`, `ns.Repo`) as seen from `file`.
    pub fn resolve_name(&self, file: &str, name: &str) -> Resolution {
        match self.files.get(file) {
            Some(facts) => self.dotted(facts, name, false, &mut Ambiguous::new()).into_resolution(),
            None => Resolution::unresolved(UnresolvedReason::NotFound),
        }
    }

    /// Resolves one site of `owner`, which must belong to `file`.
    pub fn resolve_site(&self, file: &FileFacts, owner: &Entity, site: &DependencySite) -> Resolution {
        self.site(file, owner, site, &mut Ambiguous::new())
    }

    fn site(&self, file: &'a FileFacts, owner: &Entity, site: &DependencySite, amb: &mut Ambiguous) -> Resolution {
        match site.kind {
            SiteKind::MethodCall => self.method_call(file, owner, site, amb),
            _ => self.dotted(file, &site.raw_name, false, amb).into_resolution(),
        }
    }

    /// Resolves all sites and `implements` clauses of every entity.
    pub fn resolve_all(&self) -> ResolvedProject {
        let per_file: Vec<ResolvedProject> = self
            .files
            .values()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|facts| self.resolve_file(facts))
            .collect();
        let mut out = ResolvedProject::default();
        for part in per_file {
            out.sites.extend(part.sites);
            out.implementations.extend(part.implementations);
            out.ambiguous.extend(part.ambiguous);
        }
        out
    }

    fn resolve_file(&self, facts: &'a FileFacts) -> ResolvedProject {
        let mut out = ResolvedProject::default();
        for entity in &facts.entities {
            for site in &entity.sites {
                let resolution = self.site(facts, entity, site, &mut out.ambiguous);
                out.sites.push(ResolvedSite {
                    site: site.clone(),
                    resolution,
                });
            }
            for name in &entity.implements {
                if let Target::Entity { file, symbol, .. } = self.dotted(facts, name, true, &mut out.ambiguous) {
                    let is_interface = file
                        .entity(&symbol)
                        .is_some_and(|e| e.type_kind == Some(crate::entities::TypeKind::Interface));
                    if is_interface {
                        out.implementations
                            .push((entity.id.clone(), EntityId::new(&file.module, &file.path, &symbol)));
                    }
                }
            }
        }
        out
    }

    fn facts(&self, path: &str) -> Option<&'a FileFacts> {
        self.files.get(path)
    }

    /// Local declaration, then import binding, then builtin.
    fn symbol(&self, file: &'a FileFacts, name: &str, amb: &mut Ambiguous) -> Target<'a> {
        if let Some(symbol) = file.declarations.get(name) {
            if file.entity(symbol).is_some() {
                return Target::Entity {
                    file,
                    symbol: symbol.clone(),
                    hops: 0,
                };
            }
        }
        if let Some(import) = file.imports.get(name) {
            return match self.specifiers.resolve(&file.path, &import.specifier) {
                SpecifierTarget::File(target) => match &import.imported {
                    ImportedName::Namespace => self.namespace(&target, 1),
                    ImportedName::Default => self.export(&target, "default", 1, &mut Vec::new(), amb),
                    ImportedName::Named(original) => self.export(&target, original, 1, &mut Vec::new(), amb),
                },
                SpecifierTarget::External(package) => Target::External(package),
                SpecifierTarget::NotFound => Target::Unresolved(UnresolvedReason::NotFound),
            };
        }
        if is_builtin(name) {
            Target::Builtin
        } else {
            Target::Unresolved(UnresolvedReason::NotFound)
        }
    }

    fn namespace(&self, path: &str, hops: usize) -> Target<'a> {
        match self.facts(path) {
            Some(file) => Target::Namespace { file, hops },
            None => Target::Unresolved(UnresolvedReason::NotFound),
        }
    }

    /// Looks `name` up in the export table of `file`, which was reached after
    /// visiting `hops` files. `path` holds the (file, name) pairs on the
    /// current chain.
    fn export(
        &self,
        file: &str,
        name: &str,
        hops: usize,
        path: &mut Vec<(String, String)>,
        amb: &mut Ambiguous,
    ) -> Target<'a> {
        let Some(facts) = self.facts(file) else {
            return Target::Unresolved(UnresolvedReason::NotFound);
        };
        let key = (file.to_string(), name.to_string());
        if path.contains(&key) {
            return Target::Unresolved(UnresolvedReason::Cycle);
        }
        path.push(key);
        let result = self.export_entry(facts, name, hops, path, amb);
        path.pop();
        result
    }

    fn export_entry(
        &self,
        facts: &'a FileFacts,
        name: &str,
        hops: usize,
        path: &mut Vec<(String, String)>,
        amb: &mut Ambiguous,
    ) -> Target<'a> {
        match facts.exports.entries.get(name) {
            Some(ExportEntry::Local { symbol }) => {
                if facts.entity(symbol).is_some() {
                    Target::Entity {
                        file: facts,
                        symbol: symbol.clone(),
                        hops,
                    }
                } else {
                    Target::Unresolved(UnresolvedReason::NotFound)
                }
            }
            Some(ExportEntry::ReExport { from, original }) => match self.specifiers.resolve(&facts.path, from) {
                SpecifierTarget::File(next) => self.export(&next, original, hops + 1, path, amb),
                SpecifierTarget::External(package) => Target::External(package),
                SpecifierTarget::NotFound => Target::Unresolved(UnresolvedReason::NotFound),
            },
            Some(ExportEntry::Namespace { from }) => match self.specifiers.resolve(&facts.path, from) {
                SpecifierTarget::File(next) => self.namespace(&next, hops + 1),
                SpecifierTarget::External(package) => Target::External(package),
                SpecifierTarget::NotFound => Target::Unresolved(UnresolvedReason::NotFound),
            },
            // `export *` never forwards the default export.
            None if name == "default" => Target::Unresolved(UnresolvedReason::NotFound),
            None => self.star(facts, name, hops, path, amb),
        }
    }

    /// First match over the star sources in source order.
    fn star(
        &self,
        facts: &'a FileFacts,
        name: &str,
        hops: usize,
        path: &mut Vec<(String, String)>,
        amb: &mut Ambiguous,
    ) -> Target<'a> {
        let mut found: Option<Target<'a>> = None;
        let mut external = None;
        let mut cycle = false;
        for from in &facts.exports.star_from {
            let target = match self.specifiers.resolve(&facts.path, from) {
                SpecifierTarget::File(next) => self.export(&next, name, hops + 1, path, amb),
                SpecifierTarget::External(package) => Target::External(package),
                SpecifierTarget::NotFound => continue,
            };
            match (&found, target) {
                (None, t) if t.is_found() => found = Some(t),
                (Some(first), t) if t.is_found() => {
                    if !same_definition(first, &t) {
                        amb.insert((facts.path.clone(), name.to_string()));
                    }
                }
                (_, Target::External(p)) => {
                    external.get_or_insert(p);
                }
                (_, Target::Unresolved(UnresolvedReason::Cycle)) => cycle = true,
                _ => {}
            }
        }
        match (found, external) {
            (Some(t), _) => t,
            (None, Some(p)) => Target::External(p),
            (None, None) if cycle => Target::Unresolved(UnresolvedReason::Cycle),
            _ => Target::Unresolved(UnresolvedReason::NotFound),
        }
    }

    /// Resolves `a.b.c` segment by segment through namespaces. With `exact`,
    /// reaching an entity before the last segment is unsupported; otherwise
    /// the entity stands for the whole name (`Outer.Inner`, `Enum.Member`).
    fn dotted(&self, file: &'a FileFacts, name: &str, exact: bool, amb: &mut Ambiguous) -> Target<'a> {
        let mut segments = name.split('.');
        let head = segments.next().unwrap_or(name);
        let mut target = self.symbol(file, head, amb);
        for seg in segments {
            target = match target {
                Target::Namespace { file, hops } => self.export(&file.path, seg, hops, &mut Vec::new(), amb),
                Target::Entity { .. } if exact => return Target::Unresolved(UnresolvedReason::Unsupported),
                other => return other,
            };
        }
        target
    }

    fn method_call(
        &self,
        file: &'a FileFacts,
        owner: &Entity,
        site: &DependencySite,
        amb: &mut Ambiguous,
    ) -> Resolution {
        let Some((receiver, method)) = site.raw_name.rsplit_once('.') else {
            return Resolution::unresolved(UnresolvedReason::Unsupported);
        };
        if !is_dotted_identifier(receiver) {
            return Resolution::unresolved(UnresolvedReason::Unsupported);
        }
        let head = receiver.split('.').next().unwrap_or(receiver);
        if matches!(head, "this" | "super") {
            return Resolution::unresolved(UnresolvedReason::Unsupported);
        }
        let receiver_target = if site.receiver_local {
            if receiver != head {
                return Resolution::unresolved(UnresolvedReason::Unsupported);
            }
            match owner.env.lookup(head) {
                Some(Some(ty)) => {
                    let ty = self.dotted(file, ty, true, amb);
                    return self.method_on_type(ty, method, amb).into_resolution();
                }
                Some(None) => return Resolution::unresolved(UnresolvedReason::Shadowed),
                None => return Resolution::unresolved(UnresolvedReason::Unsupported),
            }
        } else {
            self.dotted(file, receiver, true, amb)
        };
        let target = match receiver_target {
            Target::Namespace { file, hops } => self.export(&file.path, method, hops, &mut Vec::new(), amb),
            Target::Entity { file, symbol, hops } => match file.entity(&symbol) {
                Some(e) if e.kind == EntityKind::Type => {
                    self.method_on_type(Target::Entity { file, symbol, hops }, method, amb)
                }
                Some(e) if e.kind == EntityKind::Variable => match &e.value_type {
                    Some(ty) => {
                        let ty = self.dotted(file, ty, true, amb);
                        self.method_on_type(ty, method, amb)
                    }
                    None => Target::Unresolved(UnresolvedReason::Unsupported),
                },
                _ => Target::Unresolved(UnresolvedReason::Unsupported),
            },
            other => other,
        };
        target.into_resolution()
    }

    /// Finds `T.m`, walking `extends` chains inside the project.
    fn method_on_type(&self, ty: Target<'a>, method: &str, amb: &mut Ambiguous) -> Target<'a> {
        let mut visited = BTreeSet::new();
        self.method_on_type_inner(ty, method, amb, &mut visited)
    }

    fn method_on_type_inner(
        &self,
        ty: Target<'a>,
        method: &str,
        amb: &mut Ambiguous,
        visited: &mut BTreeSet<(String, String)>,
    ) -> Target<'a> {
        let (file, symbol, hops) = match ty {
            Target::Entity { file, symbol, hops } => (file, symbol, hops),
            Target::Namespace { .. } => return Target::Unresolved(UnresolvedReason::Unsupported),
            other => return other,
        };
        let Some(entity) = file.entity(&symbol) else {
            return Target::Unresolved(UnresolvedReason::NotFound);
        };
        if entity.kind != EntityKind::Type {
            return Target::Unresolved(UnresolvedReason::Unsupported);
        }
        if !visited.insert((file.path.clone(), symbol.clone())) {
            return Target::Unresolved(UnresolvedReason::Cycle);
        }
        let qualified = format!("{symbol}.{method}");
        if file.entity(&qualified).is_some() {
            return Target::Entity {
                file,
                symbol: qualified,
                hops,
            };
        }
        let mut fallback = Target::Unresolved(UnresolvedReason::NotFound);
        for base in &entity.extends {
            let base = self.dotted(file, base, true, amb);
            match self.method_on_type_inner(base, method, amb, visited) {
                t @ Target::Entity { .. } => return t,
                t @ (Target::External(_) | Target::Builtin) => {
                    if matches!(fallback, Target::Unresolved(_)) {
                        fallback = t;
                    }
                }
                _ => {}
            }
        }
        fallback
    }
}

/// `a`, `a.b.c`: identifier segments only.
fn is_dotted_identifier(s: &str) -> bool {
    s.split('.').all(|seg| {
        let mut chars = seg.chars();
        chars.next().is_some_and(|c| c == '_' || c == '$' || c.is_alphabetic())
            && chars.all(|c| c == '_' || c == '$' || c.is_alphanumeric())
    })
}

fn same_definition(a: &Target<'_>, b: &Target<'_>) -> bool {
    match (a, b) {
        (
            Target::Entity {
                file: f1, symbol: s1, ..
            },
            Target::Entity {
                file: f2, symbol: s2, ..
            },
        ) => f1.path == f2.path && s1 == s2,
        (Target::Namespace { file: f1, .. }, Target::Namespace { file: f2, .. }) => f1.path == f2.path,
        _ => false,
    }
}

/// Resolves a batch of sites. Each site's owner must exist in `resolver`.
pub fn infer_and_resolve_sites(resolver: &Resolver<'_>, sites: &[DependencySite]) -> Vec<(DependencySite, Resolution)> {
    sites
        .iter()
        .map(|site| {
            let resolution = resolver
                .files()
                .get(&site.from.package)
                .and_then(|f| f.entity(&site.from.symbol).map(|e| (f, e)))
                .map_or(Resolution::unresolved(UnresolvedReason::NotFound), |(f, e)| {
                    resolver.resolve_site(f, e, site)
                });
            (site.clone(), resolution)
        })
        .collect()
}
