//! Brute-force resolver used as a test oracle. It shares parsing and entity
//! extraction with the library but none of the resolution code: every
//! lookup rescans the statements of the files involved.

use std::collections::BTreeMap;
use std::path::Path;

use uniast::entities::{analyze_file, Entity, EntityId, EntityKind, SiteKind};
use uniast::project::{discover_layout, DiscoverOptions};
use uniast::resolve::{is_builtin, Resolution, UnresolvedReason};
use uniast::syntax::*;

/// (owner, kind, raw name, byte start, byte end).
pub type SiteKey = (String, &'static str, String, usize, usize);

struct File {
    module: String,
    path: String,
    ast: SourceFileAst,
    entities: Vec<Entity>,
}

#[derive(Clone, Debug)]
enum Out {
    Ent { file: usize, symbol: String, hops: usize },
    Ns { file: usize, hops: usize },
    Ext(String),
    Builtin,
    Un(UnresolvedReason),
}

pub struct Oracle {
    files: Vec<File>,
    packages: Vec<(String, String)>,
}

const EXTS: [&str; 4] = ["ts", "tsx", "mts", "cts"];

impl Oracle {
    pub fn load(root: &Path, opts: &DiscoverOptions) -> Oracle {
        let layout = discover_layout(root, opts).expect("fixture layout");
        let mut files = Vec::new();
        let mut packages = Vec::new();
        for m in &layout.modules {
            if let Some(name) = &m.manifest.name {
                packages.push((name.clone(), m.root_dir.clone()));
            }
            for path in &m.source_files {
                let source = std::fs::read_to_string(root.join(path)).unwrap_or_default();
                let ast = parse_file(path, &source);
                let entities = analyze_file(&ast, &m.name, path, &source).entities;
                files.push(File {
                    module: m.name.clone(),
                    path: path.clone(),
                    ast,
                    entities,
                });
            }
        }
        Oracle { files, packages }
    }

    /// Resolution of every site in the project.
    pub fn resolve_all(&self) -> BTreeMap<SiteKey, Resolution> {
        let mut out = BTreeMap::new();
        for (fi, f) in self.files.iter().enumerate() {
            for e in &f.entities {
                for s in &e.sites {
                    let res = self.site(fi, e, s.kind, &s.raw_name, s.receiver_local);
                    let key = (
                        s.from.to_string(),
                        s.kind.as_str(),
                        s.raw_name.clone(),
                        s.span.byte_start,
                        s.span.byte_end,
                    );
                    out.insert(key, res);
                }
            }
        }
        out
    }

    fn site(&self, fi: usize, owner: &Entity, kind: SiteKind, raw: &str, receiver_local: bool) -> Resolution {
        let out = if kind == SiteKind::MethodCall {
            self.method(fi, owner, raw, receiver_local)
        } else {
            self.path_name(fi, raw, false)
        };
        self.finish(out)
    }

    fn finish(&self, out: Out) -> Resolution {
        match out {
            Out::Ent { file, symbol, hops } => {
                let f = &self.files[file];
                Resolution::Internal {
                    target: EntityId::new(&f.module, &f.path, &symbol),
                    hops: if hops == 0 { 1 } else { hops },
                }
            }
            Out::Ns { .. } => Resolution::Unresolved {
                reason: UnresolvedReason::Unsupported,
            },
            Out::Ext(package) => Resolution::External { package },
            Out::Builtin => Resolution::Builtin,
            Out::Un(reason) => Resolution::Unresolved { reason },
        }
    }

    fn find(&self, path: &str) -> Option<usize> {
        self.files.iter().position(|f| f.path == path)
    }

    fn entity(&self, fi: usize, symbol: &str) -> Option<&Entity> {
        self.files[fi].entities.iter().find(|e| e.id.symbol == symbol)
    }

    // ---- specifiers ----

    fn probe(&self, base: &str) -> Option<usize> {
        let mut candidates = vec![base.to_string()];
        for (emitted, sources) in [
            ("js", &["ts", "tsx"][..]),
            ("jsx", &["tsx"]),
            ("mjs", &["mts"]),
            ("cjs", &["cts"]),
        ] {
            if let Some(stem) = base.strip_suffix(&format!(".{emitted}")) {
                for s in sources {
                    candidates.push(format!("{stem}.{s}"));
                }
            }
        }
        for e in EXTS {
            candidates.push(format!("{base}.{e}"));
        }
        for e in EXTS {
            candidates.push(if base.is_empty() {
                format!("index.{e}")
            } else {
                format!("{base}/index.{e}")
            });
        }
        candidates.iter().find_map(|c| self.find(c))
    }

    fn specifier(&self, from: usize, spec: &str) -> Result<usize, Out> {
        let relative = spec == "." || spec == ".." || spec.starts_with("./") || spec.starts_with("../");
        if relative {
            let from_path = &self.files[from].path;
            let mut parts: Vec<String> = from_path.split('/').map(String::from).collect();
            parts.pop();
            for seg in spec.split('/') {
                if seg == ".." {
                    if parts.pop().is_none() {
                        return Err(Out::Un(UnresolvedReason::NotFound));
                    }
                } else if !seg.is_empty() && seg != "." {
                    parts.push(seg.to_string());
                }
            }
            return self.probe(&parts.join("/")).ok_or(Out::Un(UnresolvedReason::NotFound));
        }
        if spec.is_empty() || spec.starts_with('/') {
            return Err(Out::Un(UnresolvedReason::NotFound));
        }
        let segs: Vec<&str> = spec.split('/').collect();
        let take = if spec.starts_with('@') { 2.min(segs.len()) } else { 1 };
        let name = segs[..take].join("/");
        let rest = segs[take..].join("/");
        for (pkg, root) in &self.packages {
            if *pkg == name {
                let join = |a: &str, b: &str| {
                    [a, b]
                        .iter()
                        .filter(|s| !s.is_empty())
                        .copied()
                        .collect::<Vec<_>>()
                        .join("/")
                };
                let tries = if rest.is_empty() {
                    vec![join(root, "index"), join(root, "src/index")]
                } else {
                    vec![join(root, &rest), join(root, &format!("src/{rest}"))]
                };
                return tries
                    .iter()
                    .find_map(|t| self.probe(t))
                    .ok_or(Out::Un(UnresolvedReason::NotFound));
            }
        }
        Err(Out::Ext(name))
    }

    // ---- names ----

    fn import(&self, fi: usize, name: &str) -> Option<(&str, &ImportedName)> {
        for st in &self.files[fi].ast.statements {
            if let StatementKind::Import(d) = &st.kind {
                for b in &d.bindings {
                    if b.local == name {
                        return Some((&d.specifier, &b.imported));
                    }
                }
            }
        }
        None
    }

    fn name(&self, fi: usize, name: &str) -> Out {
        if !name.contains('.') && self.entity(fi, name).is_some() {
            return Out::Ent {
                file: fi,
                symbol: name.to_string(),
                hops: 0,
            };
        }
        if let Some((spec, imported)) = self.import(fi, name) {
            return match self.specifier(fi, spec) {
                Err(o) => o,
                Ok(g) => match imported {
                    ImportedName::Namespace => Out::Ns { file: g, hops: 1 },
                    ImportedName::Default => self.exported(g, "default", 1, &mut Vec::new()),
                    ImportedName::Named(n) => self.exported(g, n, 1, &mut Vec::new()),
                },
            };
        }
        if is_builtin(name) {
            Out::Builtin
        } else {
            Out::Un(UnresolvedReason::NotFound)
        }
    }

    fn path_name(&self, fi: usize, raw: &str, exact: bool) -> Out {
        let segs: Vec<&str> = raw.split('.').collect();
        let mut cur = self.name(fi, segs[0]);
        for seg in &segs[1..] {
            cur = match cur {
                Out::Ns { file, hops } => self.exported(file, seg, hops, &mut Vec::new()),
                Out::Ent { .. } if exact => return Out::Un(UnresolvedReason::Unsupported),
                other => return other,
            };
        }
        cur
    }

    fn local_or_import(&self, fi: usize, local: &str, hops: usize, stack: &mut Vec<(usize, String)>) -> Out {
        if let Some((spec, imported)) = self.import(fi, local) {
            return match self.specifier(fi, spec) {
                Err(o) => o,
                Ok(g) => match imported {
                    ImportedName::Namespace => Out::Ns {
                        file: g,
                        hops: hops + 1,
                    },
                    ImportedName::Default => self.exported(g, "default", hops + 1, stack),
                    ImportedName::Named(n) => self.exported(g, n, hops + 1, stack),
                },
            };
        }
        self.local_symbol(fi, local, hops)
    }

    fn local_symbol(&self, fi: usize, symbol: &str, hops: usize) -> Out {
        if self.entity(fi, symbol).is_some() {
            Out::Ent {
                file: fi,
                symbol: symbol.to_string(),
                hops,
            }
        } else {
            Out::Un(UnresolvedReason::NotFound)
        }
    }

    /// Scans `fi` for the first statement exporting `name`.
    fn exported(&self, fi: usize, name: &str, hops: usize, stack: &mut Vec<(usize, String)>) -> Out {
        if stack.iter().any(|(f, n)| *f == fi && n == name) {
            return Out::Un(UnresolvedReason::Cycle);
        }
        stack.push((fi, name.to_string()));
        let out = self.exported_scan(fi, name, hops, stack);
        stack.pop();
        out
    }

    fn exported_scan(&self, fi: usize, name: &str, hops: usize, stack: &mut Vec<(usize, String)>) -> Out {
        let mut stars: Vec<&str> = Vec::new();
        for st in &self.files[fi].ast.statements {
            let flags = match &st.kind {
                StatementKind::Function(d) => Some(d.export),
                StatementKind::Class(d) => Some(d.export),
                StatementKind::Interface(d) => Some(d.export),
                StatementKind::TypeAlias(d) => Some(d.export),
                StatementKind::Enum(d) => Some(d.export),
                StatementKind::Variable(d) => Some(d.export),
                _ => None,
            };
            if let Some(flags) = flags {
                if !flags.is_exported {
                    continue;
                }
                if let StatementKind::Variable(v) = &st.kind {
                    let hit = v
                        .declarators
                        .iter()
                        .flat_map(|d| d.pattern.names.iter())
                        .any(|n| n.name == name);
                    if hit {
                        return self.local_symbol(fi, name, hops);
                    }
                    continue;
                }
                let declared = st.kind.declared_name().unwrap_or("default");
                let visible = if flags.is_default { "default" } else { declared };
                if visible == name {
                    return self.local_symbol(fi, declared, hops);
                }
                continue;
            }
            let StatementKind::Export(decl) = &st.kind else {
                continue;
            };
            match decl {
                ExportDecl::Named { specifiers, from, .. } => {
                    for s in specifiers {
                        if s.exported != name {
                            continue;
                        }
                        return match from {
                            Some(from) => match self.specifier(fi, from) {
                                Err(o) => o,
                                Ok(g) => self.exported(g, &s.local, hops + 1, stack),
                            },
                            None => self.local_or_import(fi, &s.local, hops, stack),
                        };
                    }
                }
                ExportDecl::Star { from, alias: Some(a) } if a == name => {
                    return match self.specifier(fi, from) {
                        Err(o) => o,
                        Ok(g) => Out::Ns {
                            file: g,
                            hops: hops + 1,
                        },
                    };
                }
                ExportDecl::Star { from, alias: None } => {
                    if !stars.contains(&from.as_str()) {
                        stars.push(from);
                    }
                }
                ExportDecl::Default(expr) if name == "default" => {
                    return match &expr.kind {
                        ExprKind::Identifier(id) => self.local_or_import(fi, id, hops, stack),
                        _ => self.local_symbol(fi, "default", hops),
                    };
                }
                _ => {}
            }
        }
        if name == "default" {
            return Out::Un(UnresolvedReason::NotFound);
        }
        let mut ext = None;
        let mut cyc = false;
        for s in stars {
            match self.specifier(fi, s) {
                Ok(g) => match self.exported(g, name, hops + 1, stack) {
                    o @ (Out::Ent { .. } | Out::Ns { .. }) => return o,
                    Out::Ext(p) => {
                        ext.get_or_insert(p);
                    }
                    Out::Un(UnresolvedReason::Cycle) => cyc = true,
                    _ => {}
                },
                Err(Out::Ext(p)) => {
                    ext.get_or_insert(p);
                }
                Err(_) => {}
            }
        }
        match ext {
            Some(p) => Out::Ext(p),
            None if cyc => Out::Un(UnresolvedReason::Cycle),
            None => Out::Un(UnresolvedReason::NotFound),
        }
    }

    // ---- method calls ----

    fn method(&self, fi: usize, owner: &Entity, raw: &str, receiver_local: bool) -> Out {
        let Some(dot) = raw.rfind('.') else {
            return Out::Un(UnresolvedReason::Unsupported);
        };
        let (recv, m) = (&raw[..dot], &raw[dot + 1..]);
        let ident = |s: &str| {
            !s.is_empty()
                && s.chars()
                    .next()
                    .is_some_and(|c| c.is_alphabetic() || c == '_' || c == '$')
                && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '$')
        };
        if !recv.split('.').all(ident) {
            return Out::Un(UnresolvedReason::Unsupported);
        }
        let head = recv.split('.').next().unwrap();
        if head == "this" || head == "super" {
            return Out::Un(UnresolvedReason::Unsupported);
        }
        if receiver_local {
            if recv.contains('.') {
                return Out::Un(UnresolvedReason::Unsupported);
            }
            return match owner.env.lookup(head) {
                None => Out::Un(UnresolvedReason::Unsupported),
                Some(None) => Out::Un(UnresolvedReason::Shadowed),
                Some(Some(t)) => {
                    let t = self.path_name(fi, t, true);
                    self.on_type(t, m, &mut Vec::new())
                }
            };
        }
        match self.path_name(fi, recv, true) {
            Out::Ns { file, hops } => self.exported(file, m, hops, &mut Vec::new()),
            Out::Ent { file, symbol, hops } => {
                let e = self.entity(file, &symbol).unwrap();
                match e.kind {
                    EntityKind::Type => self.on_type(Out::Ent { file, symbol, hops }, m, &mut Vec::new()),
                    EntityKind::Variable => match &e.value_type {
                        Some(t) => {
                            let t = self.path_name(file, t, true);
                            self.on_type(t, m, &mut Vec::new())
                        }
                        None => Out::Un(UnresolvedReason::Unsupported),
                    },
                    EntityKind::Function => Out::Un(UnresolvedReason::Unsupported),
                }
            }
            other => other,
        }
    }

    fn on_type(&self, t: Out, m: &str, seen: &mut Vec<(usize, String)>) -> Out {
        let (file, symbol, hops) = match t {
            Out::Ent { file, symbol, hops } => (file, symbol, hops),
            Out::Ns { .. } => return Out::Un(UnresolvedReason::Unsupported),
            other => return other,
        };
        let e = self.entity(file, &symbol).unwrap();
        if e.kind != EntityKind::Type {
            return Out::Un(UnresolvedReason::Unsupported);
        }
        if seen.contains(&(file, symbol.clone())) {
            return Out::Un(UnresolvedReason::Cycle);
        }
        seen.push((file, symbol.clone()));
        let qualified = format!("{symbol}.{m}");
        if self.entity(file, &qualified).is_some() {
            return Out::Ent {
                file,
                symbol: qualified,
                hops,
            };
        }
        let mut fallback = Out::Un(UnresolvedReason::NotFound);
        for base in &e.extends {
            let b = self.path_name(file, base, true);
            match self.on_type(b, m, seen) {
                o @ Out::Ent { .. } => return o,
                o @ (Out::Ext(_) | Out::Builtin) => {
                    if matches!(fallback, Out::Un(_)) {
                        fallback = o;
                    }
                }
                _ => {}
            }
        }
        fallback
    }
}
