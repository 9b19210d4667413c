//! Per-file export tables.

use std::collections::BTreeMap;

use crate::syntax::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExportEntry {
    /// Declared in this file under `symbol`.
    Local { symbol: String },
    /// Forwarded from another module under its original name.
    ReExport { from: String, original: String },
    /// `export * as ns from` or a re-exported namespace import.
    Namespace { from: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExportTable {
    pub file: String,
    pub entries: BTreeMap<String, ExportEntry>,
    /// `export * from` specifiers in source order.
    pub star_from: Vec<String>,
}

/// An import binding as seen from the importing file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportTarget {
    pub specifier: String,
    pub imported: ImportedName,
    pub type_only: bool,
}

/// Import bindings by local name; the first binding of a name wins.
pub fn import_bindings(ast: &SourceFileAst) -> BTreeMap<String, ImportTarget> {
    let mut out = BTreeMap::new();
    for stmt in &ast.statements {
        if let StatementKind::Import(decl) = &stmt.kind {
            for b in &decl.bindings {
                out.entry(b.local.clone()).or_insert_with(|| ImportTarget {
                    specifier: decl.specifier.clone(),
                    imported: b.imported.clone(),
                    type_only: decl.is_type_only || b.is_type_only,
                });
            }
        }
    }
    out
}

pub fn build_export_table(ast: &SourceFileAst, package_path: &str) -> ExportTable {
    let imports = import_bindings(ast);
    let mut table = ExportTable {
        file: package_path.to_string(),
        ..ExportTable::default()
    };
    let forward = |local: &str| match imports.get(local) {
        Some(ImportTarget {
            specifier,
            imported: ImportedName::Namespace,
            ..
        }) => ExportEntry::Namespace {
            from: specifier.clone(),
        },
        Some(ImportTarget {
            specifier, imported, ..
        }) => ExportEntry::ReExport {
            from: specifier.clone(),
            original: match imported {
                ImportedName::Named(n) => n.clone(),
                _ => "default".to_string(),
            },
        },
        None => ExportEntry::Local {
            symbol: local.to_string(),
        },
    };
    let mut add = |name: &str, entry: ExportEntry| {
        table.entries.entry(name.to_string()).or_insert(entry);
    };
    for stmt in &ast.statements {
        let export = match &stmt.kind {
            StatementKind::Function(f) => Some(f.export),
            StatementKind::Class(c) => Some(c.export),
            StatementKind::Interface(i) => Some(i.export),
            StatementKind::TypeAlias(t) => Some(t.export),
            StatementKind::Enum(e) => Some(e.export),
            StatementKind::Variable(v) => Some(v.export),
            _ => None,
        };
        if let Some(flags) = export.filter(|f| f.is_exported) {
            if let StatementKind::Variable(v) = &stmt.kind {
                for d in &v.declarators {
                    for n in &d.pattern.names {
                        add(&n.name, ExportEntry::Local { symbol: n.name.clone() });
                    }
                }
                continue;
            }
            let symbol = stmt.kind.declared_name().unwrap_or("default").to_string();
            let exported = if flags.is_default { "default" } else { symbol.as_str() };
            add(exported, ExportEntry::Local { symbol: symbol.clone() });
            continue;
        }
        let StatementKind::Export(decl) = &stmt.kind else {
            continue;
        };
        match decl {
            ExportDecl::Named {
                specifiers,
                from: Some(from),
                ..
            } => {
                for s in specifiers {
                    add(
                        &s.exported,
                        ExportEntry::ReExport {
                            from: from.clone(),
                            original: s.local.clone(),
                        },
                    );
                }
            }
            ExportDecl::Named {
                specifiers, from: None, ..
            } => {
                for s in specifiers {
                    add(&s.exported, forward(&s.local));
                }
            }
            ExportDecl::Star {
                from,
                alias: Some(alias),
            } => {
                add(alias, ExportEntry::Namespace { from: from.clone() });
            }
            ExportDecl::Star { from, alias: None } => {
                if !table.star_from.contains(from) {
                    table.star_from.push(from.clone());
                }
            }
            ExportDecl::Default(expr) => match &expr.kind {
                ExprKind::Identifier(name) => add("default", forward(name)),
                _ => add(
                    "default",
                    ExportEntry::Local {
                        symbol: "default".to_string(),
                    },
                ),
            },
        }
    }
    table
}

/// Every module specifier a file mentions in imports and re-exports.
pub fn module_specifiers(ast: &SourceFileAst) -> Vec<String> {
    let mut out = Vec::new();
    for stmt in &ast.statements {
        match &stmt.kind {
            StatementKind::Import(decl) => out.push(decl.specifier.clone()),
            StatementKind::Export(ExportDecl::Named { from: Some(f), .. })
            | StatementKind::Export(ExportDecl::Star { from: f, .. }) => out.push(f.clone()),
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(src: &str) -> ExportTable {
        build_export_table(&parse_file("f.ts", src), "f.ts")
    }

    fn local(s: &str) -> ExportEntry {
        ExportEntry::Local { symbol: s.into() }
    }

    #[test]
    fn listing_tables() {
        let t = table("export { UserRepo as Repo } from \"./user-repo\";\n");
        assert_eq!(
            t.entries.into_iter().collect::<Vec<_>>(),
            [(
                "Repo".to_string(),
                ExportEntry::ReExport {
                    from: "./user-repo".into(),
                    original: "UserRepo".into()
                }
            )]
        );
        let t = table("export class UserRepo {\n  getById(id: string) { return id; }\n}\n");
        assert_eq!(
            t.entries.into_iter().collect::<Vec<_>>(),
            [("UserRepo".to_string(), local("UserRepo"))]
        );
    }

    #[test]
    fn star_exports_keep_order() {
        let t = table("export * from './a'; export * from './b'; export * from './a';");
        assert!(t.entries.is_empty());
        assert_eq!(t.star_from, ["./a", "./b"]);
    }

    #[test]
    fn local_forms() {
        let src = "import D, { x as y } from './m';\nimport * as ns from './n';\n\
                   function f() {}\nconst a = 1, { b } = o;\nexport default f;\n\
                   export { a as alias, y, ns, D as d2 };\nexport * as all from './all';";
        let t = table(src);
        let e = |k: &str| t.entries[k].clone();
        assert_eq!(e("default"), local("f"));
        assert_eq!(e("alias"), local("a"));
        assert_eq!(
            e("y"),
            ExportEntry::ReExport {
                from: "./m".into(),
                original: "x".into()
            }
        );
        assert_eq!(e("ns"), ExportEntry::Namespace { from: "./n".into() });
        assert_eq!(
            e("d2"),
            ExportEntry::ReExport {
                from: "./m".into(),
                original: "default".into()
            }
        );
        assert_eq!(e("all"), ExportEntry::Namespace { from: "./all".into() });
        assert!(!t.entries.contains_key("b"));
    }

    #[test]
    fn declarations() {
        let t = table("export default class {}\nexport const p = 1, q = 2;\nexport interface I {}\nexport default function g() {}");
        assert_eq!(t.entries["default"], local("default"));
        assert_eq!(t.entries["p"], local("p"));
        assert_eq!(t.entries["q"], local("q"));
        assert_eq!(t.entries["I"], local("I"));
        let t = table("export default function g() {}");
        assert_eq!(t.entries["default"], local("g"));
        assert!(!t.entries.contains_key("g"));
    }
}
