//! Entity extraction: turns a parsed file into functions, types and
//! variables, each with the dependency sites found inside it.

pub mod signature;
mod sites;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::syntax::*;
pub use signature::collapse_whitespace;
pub(crate) use sites::ImportUse;
use sites::SiteCollector;
pub use sites::{inferred_type, LocalTypeEnv};

/// Identity of an entity: module path, package (file) path and symbol name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId {
    pub module: String,
    pub package: String,
    pub symbol: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid entity id {0:?}: expected module#package#symbol")]
pub struct IdError(pub String);

impl EntityId {
    pub fn new(module: &str, package: &str, symbol: &str) -> Self {
        EntityId {
            module: module.to_string(),
            package: package.to_string(),
            symbol: symbol.to_string(),
        }
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}#{}", self.module, self.package, self.symbol)
    }
}

impl Serialize for EntityId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EntityId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for EntityId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, IdError> {
        let parts: Vec<&str> = s.split('#').collect();
        match parts.as_slice() {
            [m, p, sym] if !m.is_empty() && !p.is_empty() && !sym.is_empty() => Ok(EntityId::new(m, p, sym)),
            _ => Err(IdError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityKind {
    Function,
    Type,
    Variable,
}

impl EntityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Function => "Function",
            EntityKind::Type => "Type",
            EntityKind::Variable => "Variable",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Function" => Some(EntityKind::Function),
            "Type" => Some(EntityKind::Type),
            "Variable" => Some(EntityKind::Variable),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeKind {
    Class,
    Interface,
    TypeAlias,
    Enum,
}

impl TypeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TypeKind::Class => "class",
            TypeKind::Interface => "interface",
            TypeKind::TypeAlias => "type_alias",
            TypeKind::Enum => "enum",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "class" => Some(TypeKind::Class),
            "interface" => Some(TypeKind::Interface),
            "type_alias" => Some(TypeKind::TypeAlias),
            "enum" => Some(TypeKind::Enum),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteKind {
    Call,
    MethodCall,
    Constructor,
    TypeRef,
    ImportRef,
}

impl SiteKind {
    pub const ALL: [SiteKind; 5] = [
        SiteKind::Call,
        SiteKind::MethodCall,
        SiteKind::Constructor,
        SiteKind::TypeRef,
        SiteKind::ImportRef,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SiteKind::Call => "call",
            SiteKind::MethodCall => "method_call",
            SiteKind::Constructor => "constructor",
            SiteKind::TypeRef => "type_ref",
            SiteKind::ImportRef => "import_ref",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        SiteKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencySite {
    pub from: EntityId,
    pub kind: SiteKind,
    /// Name as written: `Repo`, `repo.getById`, `ns.Thing`.
    pub raw_name: String,
    pub span: Span,
    /// For method calls: the receiver's head names a local binding.
    pub receiver_local: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub id: EntityId,
    pub kind: EntityKind,
    pub type_kind: Option<TypeKind>,
    pub source_text: String,
    pub span: Span,
    pub signature: String,
    pub is_exported: bool,
    pub group_anchor: Option<EntityId>,
    pub sites: Vec<DependencySite>,
    pub env: LocalTypeEnv,
    /// Declared or constructed type of a variable entity.
    pub value_type: Option<String>,
    /// Heritage names as written (`extends` for classes and interfaces).
    pub extends: Vec<String>,
    pub implements: Vec<String>,
}

/// Everything extracted from one file.
#[derive(Debug, Clone, Default)]
pub struct FileEntities {
    pub entities: Vec<Entity>,
    /// Top-level binding name → entity symbol.
    pub declarations: BTreeMap<String, String>,
    pub duplicates: Vec<String>,
}

pub fn extract_entities(ast: &SourceFileAst, module: &str, package: &str, source: &str) -> Vec<Entity> {
    analyze_file(ast, module, package, source).entities
}

/// Flattens the sites of a file's entities, in entity order.
pub fn collect_dependency_sites(entities: &[Entity]) -> Vec<DependencySite> {
    entities.iter().flat_map(|e| e.sites.iter().cloned()).collect()
}

#[derive(Clone, Copy)]
enum Part<'a> {
    Function(&'a FunctionLike),
    Class(&'a ClassDecl),
    Member(&'a ClassMember, &'a [TypeParam]),
    Interface(&'a InterfaceDecl),
    Alias(&'a TypeAliasDecl),
    Enum(&'a EnumDecl),
    Declarator(&'a Declarator),
    Expr(&'a Expr),
}

struct Candidate<'a> {
    symbol: String,
    kind: EntityKind,
    type_kind: Option<TypeKind>,
    span: Span,
    signature: String,
    exported: bool,
    parts: Vec<Part<'a>>,
    /// Function declared without a body (overload signature or ambient).
    bodiless: bool,
    accessor: bool,
    value_type: Option<String>,
    extends: Vec<String>,
    implements: Vec<String>,
    /// Statement index for declarations that share a statement.
    group: Option<usize>,
    methods: Vec<Candidate<'a>>,
}

impl<'a> Candidate<'a> {
    fn new(symbol: String, kind: EntityKind, span: Span, signature: String, exported: bool) -> Self {
        Candidate {
            symbol,
            kind,
            type_kind: None,
            span,
            signature,
            exported,
            parts: Vec::new(),
            bodiless: false,
            accessor: false,
            value_type: None,
            extends: Vec::new(),
            implements: Vec::new(),
            group: None,
            methods: Vec::new(),
        }
    }
}

fn join_spans(a: Span, b: Span) -> Span {
    Span {
        byte_start: a.byte_start,
        start_line: a.start_line,
        start_col: a.start_col,
        byte_end: b.byte_end,
        end_line: b.end_line,
        end_col: b.end_col,
    }
}

fn valid_symbol(s: &str) -> bool {
    !s.is_empty() && !s.contains('#')
}

/// Adds `cand` to `kept` unless its symbol is taken. Consecutive bodiless
/// function declarations merge into the following implementation.
fn push_unique<'a>(
    kept: &mut Vec<Candidate<'a>>,
    index: &mut HashMap<String, usize>,
    last: &mut Option<String>,
    cand: Candidate<'a>,
    duplicates: &mut Vec<String>,
    package: &str,
) {
    if !valid_symbol(&cand.symbol) {
        return;
    }
    match index.get(&cand.symbol) {
        None => {
            index.insert(cand.symbol.clone(), kept.len());
            *last = Some(cand.symbol.clone());
            kept.push(cand);
        }
        Some(&i) => {
            let prev = &mut kept[i];
            let adjacent = last.as_deref() == Some(cand.symbol.as_str());
            if adjacent
                && prev.kind == EntityKind::Function
                && cand.kind == EntityKind::Function
                && prev.bodiless
                && !prev.accessor
            {
                prev.span = join_spans(prev.span, cand.span);
                prev.parts.extend(cand.parts);
                prev.exported |= cand.exported;
                if !cand.bodiless {
                    prev.signature = cand.signature;
                    prev.bodiless = false;
                }
            } else if prev.accessor && cand.accessor {
                // A getter/setter pair shares one entity.
            } else {
                duplicates.push(format!("duplicate symbol {} in {package}", cand.symbol));
            }
        }
    }
}

pub fn analyze_file(ast: &SourceFileAst, module: &str, package: &str, source: &str) -> FileEntities {
    let mut imports: BTreeMap<String, ImportUse> = BTreeMap::new();
    let mut locally_exported: BTreeSet<String> = BTreeSet::new();
    for s in &ast.statements {
        match &s.kind {
            StatementKind::Import(i) => {
                for b in &i.bindings {
                    imports.insert(
                        b.local.clone(),
                        ImportUse {
                            namespace: b.imported == ImportedName::Namespace,
                            type_only: b.is_type_only || i.is_type_only,
                        },
                    );
                }
            }
            StatementKind::Export(ExportDecl::Named {
                specifiers, from: None, ..
            }) => locally_exported.extend(specifiers.iter().map(|sp| sp.local.clone())),
            StatementKind::Export(ExportDecl::Default(Expr {
                kind: ExprKind::Identifier(name),
                ..
            })) => {
                locally_exported.insert(name.clone());
            }
            _ => {}
        }
    }

    let mut kept: Vec<Candidate> = Vec::new();
    let mut index = HashMap::new();
    let mut last = None;
    let mut duplicates = Vec::new();
    let mut declarations = BTreeMap::new();
    for (si, stmt) in ast.statements.iter().enumerate() {
        let cands = statement_candidates(si, stmt, source, &mut duplicates, package);
        for c in cands {
            let symbol = c.symbol.clone();
            let binding = match &stmt.kind {
                StatementKind::Variable(_) => symbol.clone(),
                kind => kind.declared_name().unwrap_or("default").to_string(),
            };
            let existed = index.contains_key(&symbol);
            push_unique(&mut kept, &mut index, &mut last, c, &mut duplicates, package);
            if !existed && index.contains_key(&symbol) {
                declarations.insert(binding, symbol);
            }
        }
        if !matches!(
            stmt.kind,
            StatementKind::Function(_)
                | StatementKind::Class(_)
                | StatementKind::Interface(_)
                | StatementKind::TypeAlias(_)
                | StatementKind::Enum(_)
                | StatementKind::Variable(_)
        ) {
            last = None;
        }
    }

    // Group anchors: the first kept declaration of each shared statement.
    let mut anchors: BTreeMap<usize, String> = BTreeMap::new();
    for c in &kept {
        if let Some(g) = c.group {
            anchors.entry(g).or_insert_with(|| c.symbol.clone());
        }
    }

    let mut entities = Vec::new();
    for c in &kept {
        let exported = c.exported || locally_exported.contains(&c.symbol);
        let anchor = c
            .group
            .and_then(|g| anchors.get(&g))
            .filter(|a| **a != c.symbol)
            .map(|a| EntityId::new(module, package, a));
        let mut entity = build_entity(c, module, package, source, &imports, exported);
        entity.group_anchor = anchor;
        entities.push(entity);
        for m in &c.methods {
            entities.push(build_entity(m, module, package, source, &imports, exported));
        }
    }
    FileEntities {
        entities,
        declarations,
        duplicates,
    }
}

fn build_entity(
    c: &Candidate<'_>,
    module: &str,
    package: &str,
    source: &str,
    imports: &BTreeMap<String, ImportUse>,
    exported: bool,
) -> Entity {
    let id = EntityId::new(module, package, &c.symbol);
    let mut collector = SiteCollector::new(source, id.clone(), imports);
    for part in &c.parts {
        match *part {
            Part::Function(f) => collector.function(f, None),
            Part::Class(class) => {
                collector.type_params_scope(&class.type_params);
                if let Some(h) = &class.extends {
                    collector.heritage(h);
                }
                if let Some(e) = &class.extends_expr {
                    collector.expr(e);
                }
                for h in &class.implements {
                    collector.heritage(h);
                }
                for m in &class.members {
                    if member_symbol(m).is_none() {
                        collector.member(m);
                    }
                }
                collector.pop_scope();
            }
            Part::Member(m, tps) => {
                collector.type_params_scope(tps);
                collector.member(m);
                collector.pop_scope();
            }
            Part::Interface(i) => collector.interface(i),
            Part::Alias(t) => collector.type_alias(t),
            Part::Enum(e) => collector.enum_members(e),
            Part::Declarator(d) => collector.declarator(d),
            Part::Expr(e) => collector.expr(e),
        }
    }
    Entity {
        id,
        kind: c.kind,
        type_kind: c.type_kind,
        source_text: c.span.slice(source).to_string(),
        span: c.span,
        signature: c.signature.clone(),
        is_exported: exported,
        group_anchor: None,
        sites: collector.sites,
        env: collector.env,
        value_type: c.value_type.clone(),
        extends: c.extends.clone(),
        implements: c.implements.clone(),
    }
}

/// Name of the function entity a class member becomes, if any.
fn member_symbol(m: &ClassMember) -> Option<&str> {
    match m {
        ClassMember::Method { name: Some(n), .. } => Some(n),
        ClassMember::Property {
            name: Some(n),
            init: Some(Expr {
                kind: ExprKind::ArrowFunction { .. },
                ..
            }),
            ..
        } => Some(n),
        _ => None,
    }
}

fn statement_candidates<'a>(
    si: usize,
    stmt: &'a Statement,
    source: &str,
    duplicates: &mut Vec<String>,
    package: &str,
) -> Vec<Candidate<'a>> {
    let mut out = Vec::new();
    match &stmt.kind {
        StatementKind::Function(f) => {
            let symbol = f.name.as_ref().map_or("default", |n| n.name.as_str());
            let mut c = Candidate::new(
                symbol.to_string(),
                EntityKind::Function,
                stmt.span,
                signature::header_signature(source, f.header),
                f.export.is_exported,
            );
            c.bodiless = f.func.body.is_none();
            c.parts.push(Part::Function(&f.func));
            out.push(c);
        }
        StatementKind::Class(class) => {
            let symbol = class.name.as_ref().map_or("default", |n| n.name.as_str());
            let mut c = Candidate::new(
                symbol.to_string(),
                EntityKind::Type,
                stmt.span,
                signature::header_signature(source, class.header),
                class.export.is_exported,
            );
            c.type_kind = Some(TypeKind::Class);
            c.extends = class.extends.iter().map(|h| h.name.clone()).collect();
            c.implements = class.implements.iter().map(|h| h.name.clone()).collect();
            c.parts.push(Part::Class(class));
            let mut methods = Vec::new();
            let mut index = HashMap::new();
            let mut last = None;
            for m in &class.members {
                let Some(name) = member_symbol(m) else {
                    last = None;
                    continue;
                };
                let mut mc = Candidate::new(
                    format!("{symbol}.{name}"),
                    EntityKind::Function,
                    m.span(),
                    String::new(),
                    class.export.is_exported,
                );
                match m {
                    ClassMember::Method { func, header, kind, .. } => {
                        mc.signature = signature::header_signature(source, *header);
                        mc.bodiless = func.body.is_none();
                        mc.accessor = matches!(kind, MethodKind::Getter | MethodKind::Setter);
                    }
                    ClassMember::Property { init: Some(init), .. } => {
                        let body_start = match &init.kind {
                            ExprKind::ArrowFunction { func, .. } => {
                                func.body.as_ref().map_or(init.span.byte_end, |b| b.span().byte_start)
                            }
                            _ => init.span.byte_end,
                        };
                        mc.signature = signature::bound_function_signature(source, "", m.span().byte_start, body_start);
                    }
                    _ => {}
                }
                mc.parts.push(Part::Member(m, &class.type_params));
                push_unique(&mut methods, &mut index, &mut last, mc, duplicates, package);
            }
            c.methods = methods;
            out.push(c);
        }
        StatementKind::Interface(i) => {
            let mut c = Candidate::new(
                i.name.name.clone(),
                EntityKind::Type,
                stmt.span,
                signature::header_signature(source, i.header),
                i.export.is_exported,
            );
            c.type_kind = Some(TypeKind::Interface);
            c.extends = i.extends.iter().map(|h| h.name.clone()).collect();
            c.parts.push(Part::Interface(i));
            out.push(c);
        }
        StatementKind::TypeAlias(t) => {
            let mut c = Candidate::new(
                t.name.name.clone(),
                EntityKind::Type,
                stmt.span,
                signature::header_signature(source, t.header),
                t.export.is_exported,
            );
            c.type_kind = Some(TypeKind::TypeAlias);
            c.parts.push(Part::Alias(t));
            out.push(c);
        }
        StatementKind::Enum(e) => {
            let mut c = Candidate::new(
                e.name.name.clone(),
                EntityKind::Type,
                stmt.span,
                signature::header_signature(source, e.header),
                e.export.is_exported,
            );
            c.type_kind = Some(TypeKind::Enum);
            c.parts.push(Part::Enum(e));
            out.push(c);
        }
        StatementKind::Variable(v) => {
            let multi = v.declarators.len() > 1;
            for (di, d) in v.declarators.iter().enumerate() {
                let span = if multi { d.span } else { stmt.span };
                let bound_function = match (&d.init, d.pattern.simple_name()) {
                    (
                        Some(Expr {
                            kind: ExprKind::ArrowFunction { func, .. },
                            ..
                        }),
                        Some(_),
                    ) if v.kind == VarKind::Const => func.body.as_ref().map(|b| b.span().byte_start),
                    _ => None,
                };
                for (ni, name) in d.pattern.names.iter().enumerate() {
                    let mut c = if let Some(body_start) = bound_function {
                        let (prefix, start) = if !multi {
                            (String::new(), stmt.span.byte_start)
                        } else if di == 0 {
                            (
                                source[stmt.span.byte_start..d.span.byte_start].to_string(),
                                d.span.byte_start,
                            )
                        } else {
                            (format!("{} ", v.kind.as_str()), d.span.byte_start)
                        };
                        Candidate::new(
                            name.name.clone(),
                            EntityKind::Function,
                            span,
                            signature::bound_function_signature(source, &prefix, start, body_start),
                            v.export.is_exported,
                        )
                    } else {
                        let type_ann = if d.pattern.simple_name().is_some() {
                            d.type_ann.as_ref()
                        } else {
                            None
                        };
                        let mut c = Candidate::new(
                            name.name.clone(),
                            EntityKind::Variable,
                            span,
                            signature::variable_signature(source, v.export, v.is_declare, v.kind, &name.name, type_ann),
                            v.export.is_exported,
                        );
                        if d.pattern.simple_name().is_some() {
                            c.value_type = inferred_type(d.type_ann.as_ref(), d.init.as_ref());
                        }
                        c
                    };
                    if ni == 0 {
                        c.parts.push(Part::Declarator(d));
                    }
                    out.push(c);
                }
            }
            if out.len() > 1 {
                for c in &mut out {
                    c.group = Some(si);
                }
            }
        }
        StatementKind::Export(ExportDecl::Default(e)) => match &e.kind {
            ExprKind::Identifier(_) => {}
            ExprKind::ArrowFunction { func, .. } => {
                let body_start = func.body.as_ref().map_or(e.span.byte_end, |b| b.span().byte_start);
                let mut c = Candidate::new(
                    "default".to_string(),
                    EntityKind::Function,
                    stmt.span,
                    signature::bound_function_signature(source, "", stmt.span.byte_start, body_start),
                    true,
                );
                c.parts.push(Part::Expr(e));
                out.push(c);
            }
            _ => {
                let mut c = Candidate::new(
                    "default".to_string(),
                    EntityKind::Variable,
                    stmt.span,
                    signature::default_expression_signature(),
                    true,
                );
                c.parts.push(Part::Expr(e));
                out.push(c);
            }
        },
        _ => {}
    }
    out
}
