//! Scope-aware collection of dependency sites and local variable types.

use std::collections::{BTreeMap, HashSet};

use super::{collapse_whitespace, DependencySite, EntityId, SiteKind};
use crate::syntax::*;

/// Types of local variables inside one entity.
///
/// Only two rules add entries: an explicit `: T` annotation on a variable or
/// parameter, and a `new T(...)` initializer. A name that receives two
/// different types is dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocalTypeEnv {
    map: BTreeMap<String, Option<String>>,
}

impl LocalTypeEnv {
    pub fn record(&mut self, name: &str, ty: &str) {
        match self.map.get_mut(name) {
            None => {
                self.map.insert(name.to_string(), Some(ty.to_string()));
            }
            Some(slot) => {
                if slot.as_deref() != Some(ty) {
                    *slot = None;
                }
            }
        }
    }

    pub fn type_of(&self, name: &str) -> Option<&str> {
        self.map.get(name).and_then(|t| t.as_deref())
    }

    /// `Some(None)` when the name received conflicting types.
    pub fn lookup(&self, name: &str) -> Option<Option<&str>> {
        self.map.get(name).map(|t| t.as_deref())
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Option<&str>)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_deref()))
    }
}

/// The type a declarator or parameter contributes under the two rules.
pub fn inferred_type(type_ann: Option<&TypeAnnotation>, init: Option<&Expr>) -> Option<String> {
    if let Some(name) = type_ann.and_then(|t| t.simple_name.clone()) {
        return Some(name);
    }
    match init.map(|e| &e.kind) {
        Some(ExprKind::New { callee, .. }) => callee.dotted_name(),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ImportUse {
    pub namespace: bool,
    pub type_only: bool,
}

pub(crate) struct SiteCollector<'a> {
    source: &'a str,
    owner: EntityId,
    imports: &'a BTreeMap<String, ImportUse>,
    scopes: Vec<HashSet<String>>,
    seen_imports: HashSet<String>,
    pub sites: Vec<DependencySite>,
    pub env: LocalTypeEnv,
}

impl<'a> SiteCollector<'a> {
    pub fn new(source: &'a str, owner: EntityId, imports: &'a BTreeMap<String, ImportUse>) -> Self {
        SiteCollector {
            source,
            owner,
            imports,
            scopes: Vec::new(),
            seen_imports: HashSet::new(),
            sites: Vec::new(),
            env: LocalTypeEnv::default(),
        }
    }

    fn is_local(&self, name: &str) -> bool {
        self.scopes.iter().any(|s| s.contains(name))
    }

    fn site(&mut self, kind: SiteKind, raw_name: String, span: Span) {
        self.sites.push(DependencySite {
            from: self.owner.clone(),
            kind,
            raw_name,
            span,
            receiver_local: false,
        });
    }

    pub fn push_scope(&mut self, names: impl IntoIterator<Item = String>) {
        self.scopes.push(names.into_iter().collect());
    }

    pub fn pop_scope(&mut self) {
        self.scopes.pop();
    }

    fn value_use(&mut self, name: &str, span: Span) {
        if self.is_local(name) {
            return;
        }
        if let Some(import) = self.imports.get(name).copied() {
            let kind = if import.type_only {
                SiteKind::TypeRef
            } else {
                SiteKind::ImportRef
            };
            if self.seen_imports.insert(name.to_string()) {
                self.site(kind, name.to_string(), span);
            }
        }
    }

    pub fn type_annotation(&mut self, t: &TypeAnnotation) {
        for r in &t.refs {
            let head = r.name.split('.').next().unwrap_or(&r.name);
            if !self.is_local(head) {
                self.site(SiteKind::TypeRef, r.name.clone(), r.span);
            }
        }
    }

    pub fn heritage(&mut self, h: &Heritage) {
        let head = h.name.split('.').next().unwrap_or(&h.name);
        if !self.is_local(head) {
            self.site(SiteKind::TypeRef, h.name.clone(), h.span);
        }
        for t in &h.type_args {
            self.type_annotation(t);
        }
    }

    pub fn type_params_scope(&mut self, tps: &[TypeParam]) {
        self.push_scope(tps.iter().map(|tp| tp.name.name.clone()));
        for tp in tps {
            for t in tp.constraint.iter().chain(&tp.default) {
                self.type_annotation(t);
            }
        }
    }

    pub fn pattern(&mut self, p: &Pattern) {
        for e in &p.exprs {
            self.expr(e);
        }
    }

    pub fn declarator(&mut self, d: &Declarator) {
        self.pattern(&d.pattern);
        if let Some(t) = &d.type_ann {
            self.type_annotation(t);
        }
        if let Some(e) = &d.init {
            self.expr(e);
        }
        if let (Some(name), Some(ty)) = (
            d.pattern.simple_name(),
            inferred_type(d.type_ann.as_ref(), d.init.as_ref()),
        ) {
            self.env.record(&name.name, &ty);
        }
    }

    pub fn function(&mut self, f: &FunctionLike, name: Option<&Ident>) {
        let mut names: Vec<String> = f.type_params.iter().map(|tp| tp.name.name.clone()).collect();
        names.extend(name.map(|n| n.name.clone()));
        for p in &f.params {
            names.extend(p.pattern.names.iter().map(|n| n.name.clone()));
        }
        if let Some(FunctionBody::Block { statements, .. }) = &f.body {
            names.extend(declared_names(statements));
            hoisted_vars(statements, &mut names);
        }
        self.push_scope(names);
        for tp in &f.type_params {
            for t in tp.constraint.iter().chain(&tp.default) {
                self.type_annotation(t);
            }
        }
        for p in &f.params {
            self.pattern(&p.pattern);
            if let Some(t) = &p.type_ann {
                self.type_annotation(t);
            }
            if let Some(d) = &p.default {
                self.expr(d);
            }
            if let (Some(n), Some(ty)) = (
                p.pattern.simple_name(),
                p.type_ann.as_ref().and_then(|t| t.simple_name.clone()),
            ) {
                self.env.record(&n.name, &ty);
            }
        }
        if let Some(t) = &f.return_type {
            self.type_annotation(t);
        }
        match &f.body {
            Some(FunctionBody::Block { statements, .. }) => {
                for s in statements {
                    self.statement(s);
                }
            }
            Some(FunctionBody::Expr(e)) => self.expr(e),
            None => {}
        }
        self.pop_scope();
    }

    /// A class nested inside an entity: every member belongs to the owner.
    fn class(&mut self, c: &ClassDecl) {
        self.push_scope(c.name.iter().map(|n| n.name.clone()));
        self.type_params_scope(&c.type_params);
        if let Some(h) = &c.extends {
            self.heritage(h);
        }
        if let Some(e) = &c.extends_expr {
            self.expr(e);
        }
        for h in &c.implements {
            self.heritage(h);
        }
        for m in &c.members {
            self.member(m);
        }
        self.pop_scope();
        self.pop_scope();
    }

    pub fn member(&mut self, m: &ClassMember) {
        match m {
            ClassMember::Method { func, .. } => self.function(func, None),
            ClassMember::Property { type_ann, init, .. } => {
                if let Some(t) = type_ann {
                    self.type_annotation(t);
                }
                if let Some(e) = init {
                    self.expr(e);
                }
            }
            ClassMember::StaticBlock { statements, .. } => self.block(statements),
            ClassMember::Other { types, exprs, .. } => {
                for t in types {
                    self.type_annotation(t);
                }
                for e in exprs {
                    self.expr(e);
                }
            }
            ClassMember::Error { .. } => {}
        }
    }

    pub fn block(&mut self, statements: &[Statement]) {
        self.push_scope(declared_names(statements));
        for s in statements {
            self.statement(s);
        }
        self.pop_scope();
    }

    pub fn statement(&mut self, s: &Statement) {
        match &s.kind {
            StatementKind::Variable(v) => {
                for d in &v.declarators {
                    self.declarator(d);
                }
            }
            StatementKind::Function(f) => self.function(&f.func, None),
            StatementKind::Class(c) => self.class(c),
            StatementKind::Interface(i) => self.interface(i),
            StatementKind::TypeAlias(t) => self.type_alias(t),
            StatementKind::Enum(e) => self.enum_members(e),
            StatementKind::Expression(e) => self.expr(e),
            StatementKind::Export(ExportDecl::Default(e)) => self.expr(e),
            StatementKind::Block(b) => self.block(b),
            StatementKind::Jump { value, .. } => {
                if let Some(e) = value {
                    self.expr(e);
                }
            }
            StatementKind::Control {
                bindings,
                exprs,
                bodies,
                ..
            } => {
                self.push_scope(bindings.iter().flat_map(|b| b.names.iter().map(|n| n.name.clone())));
                for b in bindings {
                    self.pattern(b);
                }
                for e in exprs {
                    self.expr(e);
                }
                for b in bodies {
                    self.statement(b);
                }
                self.pop_scope();
            }
            StatementKind::Import(_) | StatementKind::Export(_) | StatementKind::Opaque | StatementKind::Error(_) => {}
        }
    }

    pub fn interface(&mut self, i: &InterfaceDecl) {
        self.type_params_scope(&i.type_params);
        for h in &i.extends {
            self.heritage(h);
        }
        self.type_annotation(&i.body);
        self.pop_scope();
    }

    pub fn type_alias(&mut self, t: &TypeAliasDecl) {
        self.type_params_scope(&t.type_params);
        self.type_annotation(&t.aliased);
        self.pop_scope();
    }

    pub fn enum_members(&mut self, e: &EnumDecl) {
        for m in &e.members {
            if let Some(init) = &m.init {
                self.expr(init);
            }
        }
    }

    pub fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Identifier(name) => self.value_use(name, e.span),
            ExprKind::Literal => {}
            ExprKind::PropertyAccess { object, property } => {
                if let ExprKind::Identifier(ns) = &object.kind {
                    let is_namespace = self.imports.get(ns).is_some_and(|i| i.namespace);
                    if is_namespace && !self.is_local(ns) {
                        let raw = format!("{ns}.{property}");
                        if self.seen_imports.insert(raw.clone()) {
                            let kind = if self.imports[ns].type_only {
                                SiteKind::TypeRef
                            } else {
                                SiteKind::ImportRef
                            };
                            self.site(kind, raw, e.span);
                        }
                        return;
                    }
                }
                self.expr(object);
            }
            ExprKind::Call {
                callee,
                type_args,
                args,
            } => {
                match &callee.kind {
                    ExprKind::Identifier(name) => {
                        if !self.is_local(name) {
                            self.site(SiteKind::Call, name.clone(), callee.span);
                        }
                    }
                    ExprKind::PropertyAccess { object, property } => {
                        let object_text = object
                            .dotted_name()
                            .unwrap_or_else(|| collapse_whitespace(object.span.slice(self.source)));
                        let receiver_local = object
                            .dotted_name()
                            .is_some_and(|d| self.is_local(d.split('.').next().unwrap_or(&d)));
                        self.site(SiteKind::MethodCall, format!("{object_text}.{property}"), callee.span);
                        if let Some(last) = self.sites.last_mut() {
                            last.receiver_local = receiver_local;
                        }
                    }
                    _ => {}
                }
                self.expr(callee);
                for t in type_args {
                    self.type_annotation(t);
                }
                for a in args {
                    self.expr(a);
                }
            }
            ExprKind::New {
                callee,
                type_args,
                args,
            } => {
                if let Some(name) = callee.dotted_name() {
                    let head = name.split('.').next().unwrap_or(&name);
                    if !self.is_local(head) {
                        self.site(SiteKind::Constructor, name.clone(), e.span);
                    }
                }
                self.expr(callee);
                for t in type_args {
                    self.type_annotation(t);
                }
                for a in args {
                    self.expr(a);
                }
            }
            ExprKind::ArrowFunction { name, func } => self.function(func, name.as_ref()),
            ExprKind::Class(c) => self.class(c),
            ExprKind::Other { children, types } => {
                for c in children {
                    self.expr(c);
                }
                for t in types {
                    self.type_annotation(t);
                }
            }
        }
    }
}

/// Names declared directly in a statement list (block scoped and hoisted
/// function declarations alike).
pub(crate) fn declared_names(statements: &[Statement]) -> Vec<String> {
    let mut out = Vec::new();
    for s in statements {
        match &s.kind {
            StatementKind::Variable(v) => {
                for d in &v.declarators {
                    out.extend(d.pattern.names.iter().map(|n| n.name.clone()));
                }
            }
            StatementKind::Import(i) => out.extend(i.bindings.iter().map(|b| b.local.clone())),
            kind => out.extend(kind.declared_name().map(str::to_string)),
        }
    }
    out
}

/// `var` declarations anywhere in a function body outside nested functions.
fn hoisted_vars(statements: &[Statement], out: &mut Vec<String>) {
    for s in statements {
        match &s.kind {
            StatementKind::Variable(v) if v.kind == VarKind::Var => {
                for d in &v.declarators {
                    out.extend(d.pattern.names.iter().map(|n| n.name.clone()));
                }
            }
            StatementKind::Block(b) => hoisted_vars(b, out),
            StatementKind::Control { bodies, .. } => hoisted_vars(bodies, out),
            _ => {}
        }
    }
}
