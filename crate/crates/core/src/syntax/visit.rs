//! Generic traversal over AST nodes, used to check structural invariants.

use super::ast::*;
use super::span::Span;

#[derive(Debug, Clone, Copy)]
pub enum NodeRef<'a> {
    Statement(&'a Statement),
    Expr(&'a Expr),
    Pattern(&'a Pattern),
    Param(&'a Param),
    Type(&'a TypeAnnotation),
    TypeRef(&'a TypeRef),
    TypeParam(&'a TypeParam),
    Heritage(&'a Heritage),
    Member(&'a ClassMember),
    Function(&'a FunctionLike),
    Declarator(&'a Declarator),
    EnumMember(&'a EnumMember),
    ImportBinding(&'a ImportBinding),
    ExportSpecifier(&'a ExportSpecifier),
    Ident(&'a Ident),
}

impl<'a> NodeRef<'a> {
    pub fn span(&self) -> Span {
        match self {
            NodeRef::Statement(n) => n.span,
            NodeRef::Expr(n) => n.span,
            NodeRef::Pattern(n) => n.span,
            NodeRef::Param(n) => n.span,
            NodeRef::Type(n) => n.span,
            NodeRef::TypeRef(n) => n.span,
            NodeRef::TypeParam(n) => n.span,
            NodeRef::Heritage(n) => n.span,
            NodeRef::Member(n) => n.span(),
            NodeRef::Function(n) => n.span,
            NodeRef::Declarator(n) => n.span,
            NodeRef::EnumMember(n) => n.span,
            NodeRef::ImportBinding(n) => n.span,
            NodeRef::ExportSpecifier(n) => n.span,
            NodeRef::Ident(n) => n.span,
        }
    }

    pub fn children(&self) -> Vec<NodeRef<'a>> {
        let mut out = Vec::new();
        match *self {
            NodeRef::Statement(s) => statement_children(s, &mut out),
            NodeRef::Expr(e) => match &e.kind {
                ExprKind::Identifier(_) | ExprKind::Literal => {}
                ExprKind::PropertyAccess { object, .. } => out.push(NodeRef::Expr(object)),
                ExprKind::Call {
                    callee,
                    type_args,
                    args,
                }
                | ExprKind::New {
                    callee,
                    type_args,
                    args,
                } => {
                    out.push(NodeRef::Expr(callee));
                    out.extend(type_args.iter().map(NodeRef::Type));
                    out.extend(args.iter().map(NodeRef::Expr));
                }
                ExprKind::ArrowFunction { name, func } => {
                    out.extend(name.iter().map(NodeRef::Ident));
                    out.push(NodeRef::Function(func));
                }
                ExprKind::Class(c) => class_children(c, &mut out),
                ExprKind::Other { children, types } => {
                    out.extend(children.iter().map(NodeRef::Expr));
                    out.extend(types.iter().map(NodeRef::Type));
                }
            },
            NodeRef::Pattern(p) => {
                out.extend(p.names.iter().map(NodeRef::Ident));
                out.extend(p.exprs.iter().map(NodeRef::Expr));
            }
            NodeRef::Param(p) => {
                out.push(NodeRef::Pattern(&p.pattern));
                out.extend(p.type_ann.iter().map(NodeRef::Type));
                out.extend(p.default.iter().map(NodeRef::Expr));
            }
            NodeRef::Type(t) => out.extend(t.refs.iter().map(NodeRef::TypeRef)),
            NodeRef::TypeRef(_) | NodeRef::Ident(_) => {}
            NodeRef::TypeParam(tp) => {
                out.push(NodeRef::Ident(&tp.name));
                out.extend(tp.constraint.iter().map(NodeRef::Type));
                out.extend(tp.default.iter().map(NodeRef::Type));
            }
            NodeRef::Heritage(h) => out.extend(h.type_args.iter().map(NodeRef::Type)),
            NodeRef::Member(m) => match m {
                ClassMember::Method { func, .. } => out.push(NodeRef::Function(func)),
                ClassMember::Property { type_ann, init, .. } => {
                    out.extend(type_ann.iter().map(NodeRef::Type));
                    out.extend(init.iter().map(NodeRef::Expr));
                }
                ClassMember::StaticBlock { statements, .. } => out.extend(statements.iter().map(NodeRef::Statement)),
                ClassMember::Other { types, exprs, .. } => {
                    out.extend(types.iter().map(NodeRef::Type));
                    out.extend(exprs.iter().map(NodeRef::Expr));
                }
                ClassMember::Error { .. } => {}
            },
            NodeRef::Function(f) => {
                out.extend(f.type_params.iter().map(NodeRef::TypeParam));
                out.extend(f.params.iter().map(NodeRef::Param));
                out.extend(f.return_type.iter().map(NodeRef::Type));
                match &f.body {
                    Some(FunctionBody::Block { statements, .. }) => {
                        out.extend(statements.iter().map(NodeRef::Statement))
                    }
                    Some(FunctionBody::Expr(e)) => out.push(NodeRef::Expr(e)),
                    None => {}
                }
            }
            NodeRef::Declarator(d) => {
                out.push(NodeRef::Pattern(&d.pattern));
                out.extend(d.type_ann.iter().map(NodeRef::Type));
                out.extend(d.init.iter().map(NodeRef::Expr));
            }
            NodeRef::EnumMember(m) => out.extend(m.init.iter().map(NodeRef::Expr)),
            NodeRef::ImportBinding(_) | NodeRef::ExportSpecifier(_) => {}
        }
        out
    }
}

fn class_children<'a>(c: &'a ClassDecl, out: &mut Vec<NodeRef<'a>>) {
    out.extend(c.name.iter().map(NodeRef::Ident));
    out.extend(c.type_params.iter().map(NodeRef::TypeParam));
    out.extend(c.extends.iter().map(NodeRef::Heritage));
    out.extend(c.extends_expr.iter().map(NodeRef::Expr));
    out.extend(c.implements.iter().map(NodeRef::Heritage));
    out.extend(c.members.iter().map(NodeRef::Member));
}

fn statement_children<'a>(s: &'a Statement, out: &mut Vec<NodeRef<'a>>) {
    match &s.kind {
        StatementKind::Import(i) => out.extend(i.bindings.iter().map(NodeRef::ImportBinding)),
        StatementKind::Export(ExportDecl::Named { specifiers, .. }) => {
            out.extend(specifiers.iter().map(NodeRef::ExportSpecifier))
        }
        StatementKind::Export(ExportDecl::Star { .. }) => {}
        StatementKind::Export(ExportDecl::Default(e)) => out.push(NodeRef::Expr(e)),
        StatementKind::Function(f) => {
            out.extend(f.name.iter().map(NodeRef::Ident));
            out.push(NodeRef::Function(&f.func));
        }
        StatementKind::Class(c) => class_children(c, out),
        StatementKind::Interface(i) => {
            out.push(NodeRef::Ident(&i.name));
            out.extend(i.type_params.iter().map(NodeRef::TypeParam));
            out.extend(i.extends.iter().map(NodeRef::Heritage));
            out.push(NodeRef::Type(&i.body));
        }
        StatementKind::TypeAlias(t) => {
            out.push(NodeRef::Ident(&t.name));
            out.extend(t.type_params.iter().map(NodeRef::TypeParam));
            out.push(NodeRef::Type(&t.aliased));
        }
        StatementKind::Enum(e) => {
            out.push(NodeRef::Ident(&e.name));
            out.extend(e.members.iter().map(NodeRef::EnumMember));
        }
        StatementKind::Variable(v) => out.extend(v.declarators.iter().map(NodeRef::Declarator)),
        StatementKind::Expression(e) => out.push(NodeRef::Expr(e)),
        StatementKind::Block(b) => out.extend(b.iter().map(NodeRef::Statement)),
        StatementKind::Jump { value, .. } => out.extend(value.iter().map(NodeRef::Expr)),
        StatementKind::Control {
            bindings,
            exprs,
            bodies,
            ..
        } => {
            out.extend(bindings.iter().map(NodeRef::Pattern));
            out.extend(exprs.iter().map(NodeRef::Expr));
            out.extend(bodies.iter().map(NodeRef::Statement));
        }
        StatementKind::Opaque | StatementKind::Error(_) => {}
    }
}

/// Calls `f(parent, child)` for every parent/child pair below `root`.
pub fn walk_pairs<'a>(root: NodeRef<'a>, f: &mut dyn FnMut(NodeRef<'a>, NodeRef<'a>)) {
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        for child in node.children() {
            f(node, child);
            stack.push(child);
        }
    }
}

/// Counts error-recovery nodes (statements and class members) in a file.
pub fn count_error_nodes(file: &SourceFileAst) -> usize {
    let mut n = 0;
    for s in &file.statements {
        let root = NodeRef::Statement(s);
        if is_error(root) {
            n += 1;
        }
        walk_pairs(root, &mut |_, child| {
            if is_error(child) {
                n += 1;
            }
        });
    }
    n
}

fn is_error(node: NodeRef<'_>) -> bool {
    matches!(
        node,
        NodeRef::Statement(Statement {
            kind: StatementKind::Error(_),
            ..
        }) | NodeRef::Member(ClassMember::Error { .. })
    )
}
