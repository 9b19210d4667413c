use super::span::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub span: Span,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceFileAst {
    pub path: String,
    pub statements: Vec<Statement>,
    pub errors: Vec<SyntaxError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub kind: StatementKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StatementKind {
    Import(ImportDecl),
    Export(ExportDecl),
    Function(FunctionDecl),
    Class(ClassDecl),
    Interface(InterfaceDecl),
    TypeAlias(TypeAliasDecl),
    Enum(EnumDecl),
    Variable(VariableStatement),
    Expression(Expr),
    Block(Vec<Statement>),
    /// `return`, `throw`, `break`, `continue`.
    Jump {
        keyword: String,
        value: Option<Expr>,
    },
    /// `if`, `for`, `while`, `do`, `try`, `switch` and labeled statements.
    /// `bindings` scope over `exprs` and `bodies`.
    Control {
        keyword: String,
        bindings: Vec<Pattern>,
        exprs: Vec<Expr>,
        bodies: Vec<Statement>,
    },
    /// Out-of-grammar region consumed as balanced tokens (namespaces,
    /// `export =`, `import x = a.b`, empty statements).
    Opaque,
    Error(ErrorNode),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorNode {
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImportedName {
    Named(String),
    Default,
    Namespace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportBinding {
    pub local: String,
    pub imported: ImportedName,
    pub is_type_only: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportDecl {
    pub bindings: Vec<ImportBinding>,
    pub specifier: String,
    pub is_type_only: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportSpecifier {
    /// Name in the exporting scope (or in the source module for re-exports).
    pub local: String,
    pub exported: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExportDecl {
    /// `export { a, b as c }` or `export { a as b } from "./x"`.
    Named {
        specifiers: Vec<ExportSpecifier>,
        from: Option<String>,
        is_type_only: bool,
    },
    /// `export * from "./x"` or `export * as ns from "./x"`.
    Star { from: String, alias: Option<String> },
    /// `export default <expression>`.
    Default(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExportFlags {
    pub is_exported: bool,
    pub is_default: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDecl {
    /// `None` only for `export default function () {}`.
    pub name: Option<Ident>,
    pub func: FunctionLike,
    pub export: ExportFlags,
    /// Header range used for the signature: from the first modifier
    /// through the parameter list and return annotation.
    pub header: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionLike {
    pub type_params: Vec<TypeParam>,
    pub params: Vec<Param>,
    pub return_type: Option<TypeAnnotation>,
    pub body: Option<FunctionBody>,
    pub is_arrow: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionBody {
    Block { statements: Vec<Statement>, span: Span },
    Expr(Box<Expr>),
}

impl FunctionBody {
    pub fn span(&self) -> Span {
        match self {
            FunctionBody::Block { span, .. } => *span,
            FunctionBody::Expr(e) => e.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub pattern: Pattern,
    pub type_ann: Option<TypeAnnotation>,
    pub default: Option<Expr>,
    pub span: Span,
}

/// A binding pattern flattened into the names it binds plus any expressions
/// it evaluates (defaults and computed keys).
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub names: Vec<Ident>,
    pub exprs: Vec<Expr>,
    pub span: Span,
}

impl Pattern {
    /// The bound name when the pattern is a plain identifier.
    pub fn simple_name(&self) -> Option<&Ident> {
        match self.names.as_slice() {
            [only] if only.span == self.span => Some(only),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeParam {
    pub name: Ident,
    pub constraint: Option<TypeAnnotation>,
    pub default: Option<TypeAnnotation>,
    pub span: Span,
}

/// A type expression reduced to the names it references.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeAnnotation {
    pub refs: Vec<TypeRef>,
    /// Set when the whole annotation is a single named type, possibly with
    /// type arguments (`Repo`, `ns.Repo`, `Repo<T>`).
    pub simple_name: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRef {
    /// Possibly dotted (`ns.Type`).
    pub name: String,
    /// True for `typeof x`, which names a value.
    pub is_value: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heritage {
    pub name: String,
    pub type_args: Vec<TypeAnnotation>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDecl {
    pub name: Option<Ident>,
    pub type_params: Vec<TypeParam>,
    pub extends: Option<Heritage>,
    /// Set when the `extends` clause is not a plain (dotted) name.
    pub extends_expr: Option<Expr>,
    pub implements: Vec<Heritage>,
    pub members: Vec<ClassMember>,
    pub export: ExportFlags,
    pub header: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Method,
    Getter,
    Setter,
    Constructor,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassMember {
    Method {
        /// `None` for computed or private names.
        name: Option<String>,
        kind: MethodKind,
        is_static: bool,
        func: FunctionLike,
        header: Span,
        span: Span,
    },
    Property {
        name: Option<String>,
        is_static: bool,
        type_ann: Option<TypeAnnotation>,
        init: Option<Expr>,
        span: Span,
    },
    StaticBlock {
        statements: Vec<Statement>,
        span: Span,
    },
    /// Index signatures, computed keys and other unsupported members.
    Other {
        types: Vec<TypeAnnotation>,
        exprs: Vec<Expr>,
        span: Span,
    },
    /// A member that failed to parse.
    Error {
        message: String,
        span: Span,
    },
}

impl ClassMember {
    pub fn span(&self) -> Span {
        match self {
            ClassMember::Method { span, .. }
            | ClassMember::Property { span, .. }
            | ClassMember::StaticBlock { span, .. }
            | ClassMember::Other { span, .. }
            | ClassMember::Error { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceDecl {
    pub name: Ident,
    pub type_params: Vec<TypeParam>,
    pub extends: Vec<Heritage>,
    pub body: TypeAnnotation,
    pub export: ExportFlags,
    pub header: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeAliasDecl {
    pub name: Ident,
    pub type_params: Vec<TypeParam>,
    pub aliased: TypeAnnotation,
    pub export: ExportFlags,
    pub header: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumMember {
    pub name: String,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumDecl {
    pub name: Ident,
    pub members: Vec<EnumMember>,
    pub is_const: bool,
    pub export: ExportFlags,
    pub header: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Const,
    Let,
    Var,
}

impl VarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::Const => "const",
            VarKind::Let => "let",
            VarKind::Var => "var",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub pattern: Pattern,
    pub type_ann: Option<TypeAnnotation>,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableStatement {
    pub kind: VarKind,
    pub declarators: Vec<Declarator>,
    pub export: ExportFlags,
    pub is_declare: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Identifier(String),
    PropertyAccess {
        object: Box<Expr>,
        property: String,
    },
    Call {
        callee: Box<Expr>,
        type_args: Vec<TypeAnnotation>,
        args: Vec<Expr>,
    },
    New {
        callee: Box<Expr>,
        type_args: Vec<TypeAnnotation>,
        args: Vec<Expr>,
    },
    Literal,
    /// Arrow functions, function expressions and object-literal methods.
    ArrowFunction {
        name: Option<Ident>,
        func: Box<FunctionLike>,
    },
    Class(Box<ClassDecl>),
    /// Any other expression; keeps its subexpressions and the type
    /// annotations it contains (`as T`, `satisfies T`, `<T>x`).
    Other {
        children: Vec<Expr>,
        types: Vec<TypeAnnotation>,
    },
}

impl Expr {
    /// The dotted name of an identifier or a chain of property accesses on
    /// an identifier (`a`, `a.b.c`).
    pub fn dotted_name(&self) -> Option<String> {
        match &self.kind {
            ExprKind::Identifier(name) => Some(name.clone()),
            ExprKind::PropertyAccess { object, property } => {
                let mut base = object.dotted_name()?;
                base.push('.');
                base.push_str(property);
                Some(base)
            }
            _ => None,
        }
    }
}

impl StatementKind {
    /// Name of the declaration this statement introduces, if any.
    pub fn declared_name(&self) -> Option<&str> {
        match self {
            StatementKind::Function(f) => f.name.as_ref().map(|n| n.name.as_str()),
            StatementKind::Class(c) => c.name.as_ref().map(|n| n.name.as_str()),
            StatementKind::Interface(i) => Some(&i.name.name),
            StatementKind::TypeAlias(t) => Some(&t.name.name),
            StatementKind::Enum(e) => Some(&e.name.name),
            _ => None,
        }
    }
}
