//! Recursive-descent parser for the supported TypeScript subset.
//!
//! Parsing is total: a syntax error inside a statement list turns the
//! offending statement into an [`ErrorNode`], records the error, and parsing
//! resumes at the next plausible statement start.

use super::ast::*;
use super::lexer::{lex_range, scan_template_parts, TokenKind};
use super::span::{LineIndex, Span};

/// Maximum nesting of statements, expressions and types before the parser
/// gives up on a region.
const MAX_DEPTH: usize = 96;

/// Keywords that may begin a statement; used as resynchronization points.
const STATEMENT_START: &[&str] = &[
    "export",
    "import",
    "function",
    "class",
    "interface",
    "enum",
    "const",
    "let",
    "var",
];

const ASSIGN_OPS: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>>=", "&=", "|=", "^=", "&&=", "||=", "??=",
];

const BINARY_OPS: &[&str] = &[
    "+",
    "-",
    "*",
    "/",
    "%",
    "**",
    "==",
    "!=",
    "===",
    "!==",
    "<",
    ">",
    "<=",
    "&&",
    "||",
    "??",
    "&",
    "|",
    "^",
    "<<",
    "instanceof",
    "in",
];

/// Reserved words that are still usable as identifiers in expressions and
/// bindings outside strict contexts.
const SOFT_KEYWORDS: &[&str] = &[
    "let",
    "static",
    "implements",
    "package",
    "private",
    "protected",
    "public",
    "interface",
    "yield",
    "await",
];

const MEMBER_MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "readonly",
    "abstract",
    "override",
    "declare",
    "accessor",
    "async",
];

pub fn parse_file(path: &str, source: &str) -> SourceFileAst {
    let index = LineIndex::new(source);
    let mut parser = Parser::new(source, &index, 0, source.len(), 0);
    let statements = parser.parse_statement_list(&[], true);
    SourceFileAst {
        path: path.to_string(),
        statements,
        errors: parser.errors,
    }
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokenKind,
    start: usize,
    end: usize,
    nl_before: bool,
}

#[derive(Debug, Clone)]
struct ParseError {
    span: Span,
    message: String,
}

type PResult<T> = Result<T, ParseError>;

struct Parser<'a> {
    src: &'a str,
    index: &'a LineIndex<'a>,
    toks: Vec<Tok>,
    pos: usize,
    range_start: usize,
    range_end: usize,
    depth: usize,
    /// Disallows `in` as a binary operator (for-statement heads).
    no_in: bool,
    /// Type names introduced inside the type being parsed (`infer X`,
    /// generic function type parameters, mapped type keys).
    type_locals: Vec<String>,
    errors: Vec<SyntaxError>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, index: &'a LineIndex<'a>, start: usize, end: usize, depth: usize) -> Self {
        let mut toks = Vec::new();
        let mut nl = false;
        for t in lex_range(src, start, end) {
            match t.kind {
                TokenKind::Newline => nl = true,
                TokenKind::Whitespace => {}
                TokenKind::Comment => {
                    if src[t.start..t.end].contains(['\n', '\r', '\u{2028}', '\u{2029}']) {
                        nl = true;
                    }
                }
                kind => {
                    toks.push(Tok {
                        kind,
                        start: t.start,
                        end: t.end,
                        nl_before: nl,
                    });
                    nl = false;
                }
            }
        }
        Parser {
            src,
            index,
            toks,
            pos: 0,
            range_start: start,
            range_end: end,
            depth,
            no_in: false,
            type_locals: Vec::new(),
            errors: Vec::new(),
        }
    }

    // ----- token access -------------------------------------------------

    fn at_eof(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn text_at(&self, i: usize) -> &'a str {
        match self.toks.get(i) {
            Some(t) => &self.src[t.start..t.end],
            None => "",
        }
    }

    fn text(&self) -> &'a str {
        self.text_at(self.pos)
    }

    fn kind_at(&self, i: usize) -> Option<TokenKind> {
        self.toks.get(i).map(|t| t.kind)
    }

    fn kind(&self) -> Option<TokenKind> {
        self.kind_at(self.pos)
    }

    fn is_punct(&self, s: &str) -> bool {
        self.kind() == Some(TokenKind::Punct) && self.text() == s
    }

    fn is_punct_at(&self, i: usize, s: &str) -> bool {
        self.kind_at(i) == Some(TokenKind::Punct) && self.text_at(i) == s
    }

    /// Matches keywords and contextual identifiers by text.
    fn is_word(&self, s: &str) -> bool {
        matches!(self.kind(), Some(TokenKind::Keyword) | Some(TokenKind::Identifier)) && self.text() == s
    }

    fn is_word_at(&self, i: usize, s: &str) -> bool {
        matches!(self.kind_at(i), Some(TokenKind::Keyword) | Some(TokenKind::Identifier)) && self.text_at(i) == s
    }

    fn nl_before(&self) -> bool {
        self.toks.get(self.pos).is_some_and(|t| t.nl_before)
    }

    fn nl_before_at(&self, i: usize) -> bool {
        self.toks.get(i).is_some_and(|t| t.nl_before)
    }

    fn cur_start(&self) -> usize {
        self.toks.get(self.pos).map_or(self.range_end, |t| t.start)
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            self.range_start
        } else {
            self.toks[self.pos - 1].end
        }
    }

    fn bump(&mut self) -> usize {
        let i = self.pos;
        if self.pos < self.toks.len() {
            self.pos += 1;
        }
        i
    }

    fn eat_punct(&mut self, s: &str) -> bool {
        if self.is_punct(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, s: &str) -> bool {
        if self.is_word(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, s: &str) -> PResult<()> {
        if self.eat_punct(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{s}'")))
        }
    }

    fn expect_word(&mut self, s: &str) -> PResult<()> {
        if self.eat_word(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{s}'")))
        }
    }

    fn span(&self, start: usize, end: usize) -> Span {
        self.index.span(start, end.max(start))
    }

    fn span_from(&self, start: usize) -> Span {
        self.span(start, self.prev_end())
    }

    fn tok_span(&self, i: usize) -> Span {
        match self.toks.get(i) {
            Some(t) => self.span(t.start, t.end),
            None => self.span(self.range_end, self.range_end),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let found = if self.at_eof() {
            "end of input".to_string()
        } else {
            format!("'{}'", self.text())
        };
        ParseError {
            span: self.tok_span(self.pos),
            message: format!("{}, found {}", message.into(), found),
        }
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        if self.depth >= MAX_DEPTH {
            return Err(self.error("nesting too deep"));
        }
        self.depth += 1;
        let result = f(self);
        self.depth -= 1;
        result
    }

    /// Runs `f` speculatively; on failure the position and any recorded
    /// errors are rolled back.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let pos = self.pos;
        let errors = self.errors.len();
        let locals = self.type_locals.len();
        let depth = self.depth;
        match f(self) {
            Ok(v) => Some(v),
            Err(_) => {
                self.pos = pos;
                self.errors.truncate(errors);
                self.type_locals.truncate(locals);
                self.depth = depth;
                None
            }
        }
    }

    fn is_identifier(&self) -> bool {
        match self.kind() {
            Some(TokenKind::Identifier) => !self.text().starts_with('#'),
            Some(TokenKind::Keyword) => SOFT_KEYWORDS.contains(&self.text()),
            _ => false,
        }
    }

    fn is_identifier_at(&self, i: usize) -> bool {
        match self.kind_at(i) {
            Some(TokenKind::Identifier) => !self.text_at(i).starts_with('#'),
            Some(TokenKind::Keyword) => SOFT_KEYWORDS.contains(&self.text_at(i)),
            _ => false,
        }
    }

    /// Identifier, keyword or private name: anything usable as a property name.
    fn is_name(&self) -> bool {
        matches!(self.kind(), Some(TokenKind::Identifier) | Some(TokenKind::Keyword))
    }

    fn ident(&mut self) -> PResult<Ident> {
        if self.is_identifier() {
            let i = self.bump();
            Ok(Ident {
                name: self.text_at(i).to_string(),
                span: self.tok_span(i),
            })
        } else {
            Err(self.error("expected identifier"))
        }
    }

    fn name(&mut self) -> PResult<Ident> {
        if self.is_name() {
            let i = self.bump();
            Ok(Ident {
                name: self.text_at(i).to_string(),
                span: self.tok_span(i),
            })
        } else {
            Err(self.error("expected name"))
        }
    }

    fn string_literal(&mut self) -> PResult<String> {
        if self.kind() == Some(TokenKind::String) {
            let i = self.bump();
            Ok(unquote(self.text_at(i)))
        } else {
            Err(self.error("expected string literal"))
        }
    }

    /// Statement terminator with automatic semicolon insertion.
    fn expect_end(&mut self) -> PResult<()> {
        if self.eat_punct(";") || self.is_punct("}") || self.at_eof() || self.nl_before() {
            Ok(())
        } else {
            Err(self.error("expected ';'"))
        }
    }

    fn can_start_expression_here(&self) -> bool {
        !(self.at_eof()
            || self.nl_before()
            || self.is_punct(";")
            || self.is_punct("}")
            || self.is_punct(")")
            || self.is_punct("]")
            || self.is_punct(",")
            || self.is_punct(":"))
    }

    /// Consumes a bracketed region starting at the current opener, through
    /// its matching closer (or end of input).
    fn skip_balanced(&mut self) {
        let mut depth = 0usize;
        while !self.at_eof() {
            let t = self.text();
            let is_punct = self.kind() == Some(TokenKind::Punct);
            self.bump();
            if is_punct {
                match t {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        depth = depth.saturating_sub(1);
                        if depth == 0 {
                            return;
                        }
                    }
                    _ => {}
                }
            }
            if depth == 0 {
                return;
            }
        }
    }

    /// Consumes a `<...>` region, counting only angle brackets.
    fn skip_angles(&mut self) {
        let mut depth = 0usize;
        while !self.at_eof() {
            let t = self.text();
            self.bump();
            match t {
                "<" => depth += 1,
                ">" => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        return;
                    }
                }
                "{" | "(" | ";" if depth == 0 => return,
                _ => {}
            }
        }
    }

    /// Index of the token closing the bracket at `open`, if any.
    fn matching_close(&self, open: usize) -> Option<usize> {
        let mut depth = 0usize;
        let mut i = open;
        while i < self.toks.len() {
            if self.kind_at(i) == Some(TokenKind::Punct) {
                match self.text_at(i) {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        depth = depth.checked_sub(1)?;
                        if depth == 0 {
                            return Some(i);
                        }
                    }
                    _ => {}
                }
            }
            i += 1;
        }
        None
    }

    fn skip_decorators(&mut self) {
        while self.is_punct("@") {
            self.bump();
            if self.is_punct("(") {
                self.skip_balanced();
            } else {
                while self.is_name() {
                    self.bump();
                    if !self.eat_punct(".") {
                        break;
                    }
                }
            }
            if self.is_punct("<") {
                self.skip_angles();
            }
            if self.is_punct("(") && !self.nl_before() {
                self.skip_balanced();
            }
        }
    }

    // ----- statements ---------------------------------------------------

    fn parse_statement_list(&mut self, closers: &[&str], top: bool) -> Vec<Statement> {
        let mut out = Vec::new();
        while !self.at_eof() {
            if self.kind() == Some(TokenKind::Punct) && closers.contains(&self.text()) {
                break;
            }
            if !top && (self.is_word("case") || self.is_word("default")) && closers.contains(&"case") {
                break;
            }
            let start = self.pos;
            let errors = self.errors.len();
            match self.parse_statement() {
                Ok(stmt) => out.push(stmt),
                Err(err) => {
                    // the failed subtree is dropped, so are the errors it recorded
                    self.errors.truncate(errors);
                    out.push(self.recover(start, err, top));
                }
            }
        }
        out
    }

    fn is_statement_start_at(&self, i: usize) -> bool {
        let t = self.text_at(i);
        (self.kind_at(i) == Some(TokenKind::Keyword) && STATEMENT_START.contains(&t))
            || (t == "type"
                && self.kind_at(i) == Some(TokenKind::Identifier)
                && self.kind_at(i + 1) == Some(TokenKind::Identifier))
    }

    fn recover(&mut self, start: usize, err: ParseError, top: bool) -> Statement {
        let mut j = start + 1;
        let mut depth = 0usize;
        let end = loop {
            if j >= self.toks.len() {
                break self.toks.len();
            }
            if self.is_statement_start_at(j) && (depth == 0 || self.nl_before_at(j)) {
                break j;
            }
            if depth == 0 && self.nl_before_at(j) {
                break j;
            }
            if self.kind_at(j) == Some(TokenKind::Punct) {
                match self.text_at(j) {
                    "{" | "(" | "[" => depth += 1,
                    "}" if depth == 0 => break if top { j + 1 } else { j },
                    "}" | ")" | "]" => {
                        if depth > 0 {
                            depth -= 1;
                            if depth == 0 && self.text_at(j) == "}" {
                                break j + 1;
                            }
                        }
                    }
                    ";" if depth == 0 => break j + 1,
                    _ => {}
                }
            }
            j += 1;
        };
        let end = end.max(start + 1).min(self.toks.len());
        let span = self.span(self.toks[start].start, self.toks[end - 1].end);
        self.pos = end;
        self.errors.push(SyntaxError {
            span: err.span,
            message: err.message.clone(),
        });
        Statement {
            kind: StatementKind::Error(ErrorNode { message: err.message }),
            span,
        }
    }

    fn parse_statement(&mut self) -> PResult<Statement> {
        self.nested(|p| p.parse_statement_inner())
    }

    fn parse_statement_inner(&mut self) -> PResult<Statement> {
        let start = self.cur_start();
        if self.kind() == Some(TokenKind::Error) {
            return Err(self.error("unexpected token"));
        }
        self.skip_decorators();
        let header_start = self.cur_start();
        let t = self.text();
        let kind = self.kind();

        if kind == Some(TokenKind::Keyword) {
            match t {
                "import" if !(self.is_punct_at(self.pos + 1, "(") || self.is_punct_at(self.pos + 1, ".")) => {
                    return self.parse_import(start)
                }
                "export" => return self.parse_export(start),
                "function" => {
                    let decl = self.parse_function_decl(header_start, ExportFlags::default(), false)?;
                    return Ok(self.stmt(StatementKind::Function(decl), start));
                }
                "class" => {
                    let decl = self.parse_class(header_start, ExportFlags::default(), false)?;
                    return Ok(self.stmt(StatementKind::Class(decl), start));
                }
                "interface" if self.is_identifier_at(self.pos + 1) => {
                    let decl = self.parse_interface(header_start, ExportFlags::default())?;
                    return Ok(self.stmt(StatementKind::Interface(decl), start));
                }
                "enum" => {
                    let decl = self.parse_enum(header_start, ExportFlags::default())?;
                    return Ok(self.stmt(StatementKind::Enum(decl), start));
                }
                "const" if self.is_word_at(self.pos + 1, "enum") => {
                    let decl = self.parse_enum(header_start, ExportFlags::default())?;
                    return Ok(self.stmt(StatementKind::Enum(decl), start));
                }
                "const" | "var" => {
                    let decl = self.parse_variable_statement(ExportFlags::default(), false)?;
                    return Ok(self.stmt(StatementKind::Variable(decl), start));
                }
                "let"
                    if self.is_identifier_at(self.pos + 1)
                        || self.is_punct_at(self.pos + 1, "{")
                        || self.is_punct_at(self.pos + 1, "[") =>
                {
                    let decl = self.parse_variable_statement(ExportFlags::default(), false)?;
                    return Ok(self.stmt(StatementKind::Variable(decl), start));
                }
                "return" | "throw" | "break" | "continue" => return self.parse_jump(start),
                "if" | "for" | "while" | "do" | "try" | "switch" | "with" => return self.parse_control(start),
                "debugger" => {
                    self.bump();
                    self.expect_end()?;
                    return Ok(self.stmt(StatementKind::Opaque, start));
                }
                _ => {}
            }
        }
        if kind == Some(TokenKind::Identifier) {
            let next = self.pos + 1;
            let same_line = !self.nl_before_at(next);
            match t {
                "type" if self.is_identifier_at(next) && same_line => {
                    let decl = self.parse_type_alias(header_start, ExportFlags::default())?;
                    return Ok(self.stmt(StatementKind::TypeAlias(decl), start));
                }
                "async" if self.is_word_at(next, "function") && same_line => {
                    let decl = self.parse_function_decl(header_start, ExportFlags::default(), false)?;
                    return Ok(self.stmt(StatementKind::Function(decl), start));
                }
                "abstract" if self.is_word_at(next, "class") && same_line => {
                    self.bump();
                    let decl = self.parse_class(header_start, ExportFlags::default(), false)?;
                    return Ok(self.stmt(StatementKind::Class(decl), start));
                }
                "declare" if same_line && self.is_declaration_word_at(next) => {
                    self.bump();
                    return self.parse_declaration(start, header_start, ExportFlags::default(), true);
                }
                "namespace" | "module" | "global"
                    if same_line
                        && (self.is_identifier_at(next)
                            || self.kind_at(next) == Some(TokenKind::String)
                            || (t == "global" && self.is_punct_at(next, "{"))) =>
                {
                    self.skip_namespace()?;
                    return Ok(self.stmt(StatementKind::Opaque, start));
                }
                _ => {}
            }
            if self.is_punct_at(next, ":") && !self.text().starts_with('#') {
                self.bump();
                self.bump();
                let body = self.parse_statement()?;
                return Ok(self.stmt(
                    StatementKind::Control {
                        keyword: "label".into(),
                        bindings: Vec::new(),
                        exprs: Vec::new(),
                        bodies: vec![body],
                    },
                    start,
                ));
            }
        }
        if self.is_punct("{") {
            let (statements, _) = self.parse_block()?;
            return Ok(self.stmt(StatementKind::Block(statements), start));
        }
        if self.eat_punct(";") {
            return Ok(self.stmt(StatementKind::Opaque, start));
        }
        if start != header_start {
            return Err(self.error("expected declaration after decorator"));
        }
        let expr = self.parse_expression()?;
        self.expect_end()?;
        Ok(self.stmt(StatementKind::Expression(expr), start))
    }

    fn stmt(&self, kind: StatementKind, start: usize) -> Statement {
        Statement {
            kind,
            span: self.span_from(start),
        }
    }

    fn is_declaration_word_at(&self, i: usize) -> bool {
        matches!(
            self.text_at(i),
            "const"
                | "let"
                | "var"
                | "function"
                | "class"
                | "enum"
                | "interface"
                | "type"
                | "namespace"
                | "module"
                | "global"
                | "abstract"
                | "async"
        )
    }

    /// Declarations after `export` or `declare`.
    fn parse_declaration(
        &mut self,
        start: usize,
        header_start: usize,
        export: ExportFlags,
        is_declare: bool,
    ) -> PResult<Statement> {
        self.skip_decorators();
        if self.eat_word("declare") {
            return self.parse_declaration(start, header_start, export, true);
        }
        let t = self.text();
        let next = self.pos + 1;
        let kind = match t {
            "function" => StatementKind::Function(self.parse_function_decl(header_start, export, false)?),
            "async" if self.is_word_at(next, "function") => {
                StatementKind::Function(self.parse_function_decl(header_start, export, false)?)
            }
            "class" => StatementKind::Class(self.parse_class(header_start, export, false)?),
            "abstract" if self.is_word_at(next, "class") => {
                self.bump();
                StatementKind::Class(self.parse_class(header_start, export, false)?)
            }
            "interface" => StatementKind::Interface(self.parse_interface(header_start, export)?),
            "type" => StatementKind::TypeAlias(self.parse_type_alias(header_start, export)?),
            "enum" => StatementKind::Enum(self.parse_enum(header_start, export)?),
            "const" if self.is_word_at(next, "enum") => StatementKind::Enum(self.parse_enum(header_start, export)?),
            "const" | "let" | "var" => StatementKind::Variable(self.parse_variable_statement(export, is_declare)?),
            "namespace" | "module" | "global" => {
                self.skip_namespace()?;
                StatementKind::Opaque
            }
            _ => return Err(self.error("expected declaration")),
        };
        Ok(self.stmt(kind, start))
    }

    fn skip_namespace(&mut self) -> PResult<()> {
        self.bump();
        while !self.at_eof() && !self.is_punct("{") && !self.is_punct(";") && !self.nl_before() {
            self.bump();
        }
        if self.is_punct("{") {
            let open = self.pos;
            if self.matching_close(open).is_none() {
                return Err(self.error("unterminated namespace body"));
            }
            self.skip_balanced();
            Ok(())
        } else {
            self.expect_end()
        }
    }

    fn parse_import(&mut self, start: usize) -> PResult<Statement> {
        self.expect_word("import")?;
        if self.kind() == Some(TokenKind::String) {
            let specifier = self.string_literal()?;
            self.skip_import_attributes();
            self.expect_end()?;
            return Ok(self.stmt(
                StatementKind::Import(ImportDecl {
                    bindings: Vec::new(),
                    specifier,
                    is_type_only: false,
                }),
                start,
            ));
        }
        let mut is_type_only = false;
        if self.is_word("type")
            && !(self.is_word_at(self.pos + 1, "from") && self.kind_at(self.pos + 2) == Some(TokenKind::String))
            && !self.is_punct_at(self.pos + 1, ",")
            && !self.is_punct_at(self.pos + 1, "=")
        {
            self.bump();
            is_type_only = true;
        }
        let mut bindings = Vec::new();
        if self.is_identifier() {
            let local = self.ident()?;
            if self.eat_punct("=") {
                if self.is_word("require") && self.is_punct_at(self.pos + 1, "(") {
                    self.bump();
                    self.bump();
                    let specifier = self.string_literal()?;
                    self.expect_punct(")")?;
                    self.expect_end()?;
                    bindings.push(ImportBinding {
                        span: local.span,
                        local: local.name,
                        imported: ImportedName::Namespace,
                        is_type_only,
                    });
                    return Ok(self.stmt(
                        StatementKind::Import(ImportDecl {
                            bindings,
                            specifier,
                            is_type_only,
                        }),
                        start,
                    ));
                }
                // `import A = B.C` alias: out of grammar.
                self.parse_expression()?;
                self.expect_end()?;
                return Ok(self.stmt(StatementKind::Opaque, start));
            }
            bindings.push(ImportBinding {
                span: local.span,
                local: local.name,
                imported: ImportedName::Default,
                is_type_only,
            });
            if !self.eat_punct(",") {
                return self.finish_import(start, bindings, is_type_only);
            }
        }
        if self.is_punct("*") {
            let star = self.cur_start();
            self.bump();
            self.expect_word("as")?;
            let local = self.ident()?;
            bindings.push(ImportBinding {
                span: self.span_from(star),
                local: local.name,
                imported: ImportedName::Namespace,
                is_type_only,
            });
        } else if self.eat_punct("{") {
            while !self.is_punct("}") {
                let spec_start = self.cur_start();
                let mut spec_type_only = is_type_only;
                // `type X`, `type "x"` and `type as as y` mark a type-only specifier
                let marker = if self.is_word_at(self.pos + 1, "as") {
                    self.is_word_at(self.pos + 2, "as")
                } else {
                    self.is_name_at(self.pos + 1) || self.kind_at(self.pos + 1) == Some(TokenKind::String)
                };
                if self.is_word("type") && marker {
                    self.bump();
                    spec_type_only = true;
                }
                let imported = self.module_export_name()?;
                let local = if self.eat_word("as") {
                    self.ident()?.name
                } else {
                    imported.clone()
                };
                let imported = if imported == "default" {
                    ImportedName::Default
                } else {
                    ImportedName::Named(imported)
                };
                bindings.push(ImportBinding {
                    span: self.span_from(spec_start),
                    local,
                    imported,
                    is_type_only: spec_type_only,
                });
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct("}")?;
        } else {
            return Err(self.error("expected import bindings"));
        }
        self.finish_import(start, bindings, is_type_only)
    }

    fn is_name_at(&self, i: usize) -> bool {
        matches!(self.kind_at(i), Some(TokenKind::Identifier) | Some(TokenKind::Keyword))
    }

    fn module_export_name(&mut self) -> PResult<String> {
        if self.kind() == Some(TokenKind::String) {
            self.string_literal()
        } else {
            Ok(self.name()?.name)
        }
    }

    fn finish_import(&mut self, start: usize, bindings: Vec<ImportBinding>, is_type_only: bool) -> PResult<Statement> {
        self.expect_word("from")?;
        let specifier = self.string_literal()?;
        self.skip_import_attributes();
        self.expect_end()?;
        Ok(self.stmt(
            StatementKind::Import(ImportDecl {
                bindings,
                specifier,
                is_type_only,
            }),
            start,
        ))
    }

    fn skip_import_attributes(&mut self) {
        if (self.is_word("with") || self.is_word("assert")) && !self.nl_before() && self.is_punct_at(self.pos + 1, "{")
        {
            self.bump();
            self.skip_balanced();
        }
    }

    fn parse_export(&mut self, start: usize) -> PResult<Statement> {
        let header_start = self.cur_start();
        self.expect_word("export")?;
        self.skip_decorators();
        if self.eat_word("default") {
            let flags = ExportFlags {
                is_exported: true,
                is_default: true,
            };
            let next = self.pos + 1;
            let kind = if self.is_word("function") || (self.is_word("async") && self.is_word_at(next, "function")) {
                StatementKind::Function(self.parse_function_decl(header_start, flags, true)?)
            } else if self.is_word("class") {
                StatementKind::Class(self.parse_class(header_start, flags, true)?)
            } else if self.is_word("abstract") && self.is_word_at(next, "class") {
                self.bump();
                StatementKind::Class(self.parse_class(header_start, flags, true)?)
            } else if self.is_word("interface") && self.is_identifier_at(next) {
                StatementKind::Interface(self.parse_interface(header_start, flags)?)
            } else {
                let expr = self.parse_assignment()?;
                self.expect_end()?;
                StatementKind::Export(ExportDecl::Default(expr))
            };
            return Ok(self.stmt(kind, start));
        }
        if self.is_punct("*") {
            self.bump();
            let alias = if self.eat_word("as") {
                Some(self.module_export_name()?)
            } else {
                None
            };
            self.expect_word("from")?;
            let from = self.string_literal()?;
            self.skip_import_attributes();
            self.expect_end()?;
            return Ok(self.stmt(StatementKind::Export(ExportDecl::Star { from, alias }), start));
        }
        let is_type_only = self.is_word("type") && self.is_punct_at(self.pos + 1, "{");
        if is_type_only {
            self.bump();
        }
        if self.eat_punct("{") {
            let mut specifiers = Vec::new();
            while !self.is_punct("}") {
                let spec_start = self.cur_start();
                if self.is_word("type") && self.is_name_at(self.pos + 1) && !self.is_word_at(self.pos + 1, "as") {
                    self.bump();
                }
                let local = self.module_export_name()?;
                let exported = if self.eat_word("as") {
                    self.module_export_name()?
                } else {
                    local.clone()
                };
                specifiers.push(ExportSpecifier {
                    local,
                    exported,
                    span: self.span_from(spec_start),
                });
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct("}")?;
            let from = if self.eat_word("from") {
                Some(self.string_literal()?)
            } else {
                None
            };
            self.skip_import_attributes();
            self.expect_end()?;
            return Ok(self.stmt(
                StatementKind::Export(ExportDecl::Named {
                    specifiers,
                    from,
                    is_type_only,
                }),
                start,
            ));
        }
        if self.eat_punct("=") {
            self.parse_expression()?;
            self.expect_end()?;
            return Ok(self.stmt(StatementKind::Opaque, start));
        }
        if self.is_word("as") && self.is_word_at(self.pos + 1, "namespace") {
            self.bump();
            self.bump();
            self.ident()?;
            self.expect_end()?;
            return Ok(self.stmt(StatementKind::Opaque, start));
        }
        if self.is_word("import") {
            self.bump();
            self.ident()?;
            self.expect_punct("=")?;
            self.parse_expression()?;
            self.expect_end()?;
            return Ok(self.stmt(StatementKind::Opaque, start));
        }
        let flags = ExportFlags {
            is_exported: true,
            is_default: false,
        };
        self.parse_declaration(start, header_start, flags, false)
    }

    fn parse_function_decl(
        &mut self,
        header_start: usize,
        export: ExportFlags,
        name_optional: bool,
    ) -> PResult<FunctionDecl> {
        let func_start = self.cur_start();
        self.eat_word("async");
        self.expect_word("function")?;
        self.eat_punct("*");
        let name = if self.is_identifier() {
            Some(self.ident()?)
        } else if name_optional {
            None
        } else {
            return Err(self.error("expected function name"));
        };
        let type_params = self.parse_type_params_opt()?;
        let params = self.parse_params()?;
        let return_type = self.parse_return_type_opt()?;
        let header = self.span_from(header_start);
        let body = if self.is_punct("{") {
            let (statements, span) = self.parse_block()?;
            Some(FunctionBody::Block { statements, span })
        } else {
            self.expect_end()?;
            None
        };
        Ok(FunctionDecl {
            name,
            func: FunctionLike {
                type_params,
                params,
                return_type,
                body,
                is_arrow: false,
                span: self.span_from(func_start),
            },
            export,
            header,
        })
    }

    fn parse_return_type_opt(&mut self) -> PResult<Option<TypeAnnotation>> {
        if self.eat_punct(":") {
            Ok(Some(self.parse_type()?))
        } else {
            Ok(None)
        }
    }

    /// Parses `{ statements }`. A missing closing brace at end of input is
    /// recorded as an error node rather than failing the enclosing statement.
    fn parse_block(&mut self) -> PResult<(Vec<Statement>, Span)> {
        let start = self.cur_start();
        self.expect_punct("{")?;
        let mut statements = self.parse_statement_list(&["}"], false);
        if !self.eat_punct("}") {
            let err = self.error("expected '}'");
            let at = self.prev_end();
            self.errors.push(SyntaxError {
                span: err.span,
                message: err.message.clone(),
            });
            statements.push(Statement {
                kind: StatementKind::Error(ErrorNode { message: err.message }),
                span: self.span(at, at),
            });
        }
        Ok((statements, self.span_from(start)))
    }

    fn parse_params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        while !self.is_punct(")") {
            params.push(self.parse_param()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    fn parse_param(&mut self) -> PResult<Param> {
        let start = self.cur_start();
        self.skip_decorators();
        while matches!(
            self.text(),
            "public" | "private" | "protected" | "readonly" | "override"
        ) && (self.is_name_at(self.pos + 1)
            || self.is_punct_at(self.pos + 1, "{")
            || self.is_punct_at(self.pos + 1, "["))
        {
            self.bump();
        }
        self.eat_punct("...");
        let pattern = if self.is_word("this") {
            let i = self.bump();
            Pattern {
                names: Vec::new(),
                exprs: Vec::new(),
                span: self.tok_span(i),
            }
        } else {
            self.parse_pattern()?
        };
        self.eat_punct("?");
        let type_ann = if self.eat_punct(":") {
            Some(self.parse_type()?)
        } else {
            None
        };
        let default = if self.eat_punct("=") {
            Some(self.parse_assignment()?)
        } else {
            None
        };
        Ok(Param {
            pattern,
            type_ann,
            default,
            span: self.span_from(start),
        })
    }

    fn parse_pattern(&mut self) -> PResult<Pattern> {
        self.nested(|p| p.parse_pattern_inner())
    }

    fn parse_pattern_inner(&mut self) -> PResult<Pattern> {
        let start = self.cur_start();
        let mut names = Vec::new();
        let mut exprs = Vec::new();
        if self.eat_punct("{") {
            while !self.is_punct("}") {
                if self.eat_punct("...") {
                    let inner = self.parse_pattern()?;
                    names.extend(inner.names);
                    exprs.extend(inner.exprs);
                } else {
                    let key_is_ident = self.is_identifier();
                    let key = if self.eat_punct("[") {
                        exprs.push(self.parse_assignment()?);
                        self.expect_punct("]")?;
                        None
                    } else if matches!(self.kind(), Some(TokenKind::String) | Some(TokenKind::Number)) {
                        self.bump();
                        None
                    } else {
                        Some(self.name()?)
                    };
                    if self.eat_punct(":") {
                        let inner = self.parse_pattern()?;
                        names.extend(inner.names);
                        exprs.extend(inner.exprs);
                    } else {
                        match key {
                            Some(k) if key_is_ident => names.push(k),
                            _ => return Err(self.error("expected ':' in binding pattern")),
                        }
                    }
                    if self.eat_punct("=") {
                        exprs.push(self.parse_assignment()?);
                    }
                }
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct("}")?;
        } else if self.eat_punct("[") {
            while !self.is_punct("]") {
                if self.eat_punct(",") {
                    continue;
                }
                self.eat_punct("...");
                let inner = self.parse_pattern()?;
                names.extend(inner.names);
                exprs.extend(inner.exprs);
                if self.eat_punct("=") {
                    exprs.push(self.parse_assignment()?);
                }
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct("]")?;
        } else {
            names.push(self.ident()?);
        }
        Ok(Pattern {
            names,
            exprs,
            span: self.span_from(start),
        })
    }

    fn parse_class(&mut self, header_start: usize, export: ExportFlags, name_optional: bool) -> PResult<ClassDecl> {
        self.expect_word("class")?;
        let name = if self.is_identifier() && !self.is_word("implements") {
            Some(self.ident()?)
        } else if name_optional {
            None
        } else {
            return Err(self.error("expected class name"));
        };
        let type_params = self.parse_type_params_opt()?;
        let mut extends = None;
        let mut extends_expr = None;
        if self.eat_word("extends") {
            let start = self.cur_start();
            let expr = self.parse_postfix()?;
            match expr.dotted_name() {
                Some(name) => {
                    let type_args = if self.is_punct("<") {
                        self.parse_type_args()?
                    } else {
                        Vec::new()
                    };
                    extends = Some(Heritage {
                        name,
                        type_args,
                        span: self.span_from(start),
                    });
                }
                None => {
                    if self.is_punct("<") {
                        self.parse_type_args()?;
                    }
                    extends_expr = Some(expr);
                }
            }
        }
        let mut implements = Vec::new();
        if self.eat_word("implements") {
            loop {
                implements.push(self.parse_heritage()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        let header = self.span_from(header_start);
        self.expect_punct("{")?;
        let mut members = Vec::new();
        while !self.is_punct("}") && !self.at_eof() {
            if self.eat_punct(";") {
                continue;
            }
            let start = self.pos;
            let errors = self.errors.len();
            match self.parse_member() {
                Ok(m) => members.push(m),
                Err(err) => {
                    self.errors.truncate(errors);
                    members.push(self.recover_member(start, err));
                }
            }
        }
        self.expect_punct("}")?;
        Ok(ClassDecl {
            name,
            type_params,
            extends,
            extends_expr,
            implements,
            members,
            export,
            header,
        })
    }

    fn parse_heritage(&mut self) -> PResult<Heritage> {
        let start = self.cur_start();
        let mut name = self.name()?.name;
        while self.eat_punct(".") {
            name.push('.');
            name.push_str(&self.name()?.name);
        }
        let type_args = if self.is_punct("<") {
            self.parse_type_args()?
        } else {
            Vec::new()
        };
        Ok(Heritage {
            name,
            type_args,
            span: self.span_from(start),
        })
    }

    fn recover_member(&mut self, start: usize, err: ParseError) -> ClassMember {
        let mut j = start + 1;
        let mut depth = 0usize;
        let end = loop {
            if j >= self.toks.len() {
                break self.toks.len();
            }
            if depth == 0 && self.nl_before_at(j) {
                break j;
            }
            if self.kind_at(j) == Some(TokenKind::Punct) {
                match self.text_at(j) {
                    "{" | "(" | "[" => depth += 1,
                    "}" if depth == 0 => break j,
                    "}" | ")" | "]" => {
                        depth = depth.saturating_sub(1);
                        if depth == 0 && self.text_at(j) == "}" {
                            break j + 1;
                        }
                    }
                    ";" if depth == 0 => break j + 1,
                    _ => {}
                }
            }
            j += 1;
        };
        let end = end.max(start + 1).min(self.toks.len());
        let span = self.span(self.toks[start].start, self.toks[end - 1].end);
        self.pos = end;
        self.errors.push(SyntaxError {
            span: err.span,
            message: err.message.clone(),
        });
        ClassMember::Error {
            message: err.message,
            span,
        }
    }

    fn is_member_modifier(&self) -> bool {
        if !MEMBER_MODIFIERS.contains(&self.text()) || !self.is_name() {
            return false;
        }
        let next = self.pos + 1;
        if self.nl_before_at(next) && self.text() != "static" {
            return false;
        }
        self.is_name_at(next)
            || matches!(self.kind_at(next), Some(TokenKind::String) | Some(TokenKind::Number))
            || self.is_punct_at(next, "[")
            || self.is_punct_at(next, "*")
            || self.is_punct_at(next, "{")
    }

    fn parse_member(&mut self) -> PResult<ClassMember> {
        let start = self.cur_start();
        self.skip_decorators();
        let header_start = self.cur_start();
        let mut is_static = false;
        while self.is_member_modifier() {
            if self.text() == "static" {
                if self.is_punct_at(self.pos + 1, "{") {
                    self.bump();
                    let (statements, _) = self.parse_block()?;
                    return Ok(ClassMember::StaticBlock {
                        statements,
                        span: self.span_from(start),
                    });
                }
                is_static = true;
            }
            self.bump();
        }
        self.eat_punct("*");
        let mut kind = MethodKind::Method;
        if (self.is_word("get") || self.is_word("set"))
            && !self.nl_before_at(self.pos + 1)
            && (self.is_name_at(self.pos + 1)
                || matches!(
                    self.kind_at(self.pos + 1),
                    Some(TokenKind::String) | Some(TokenKind::Number)
                )
                || self.is_punct_at(self.pos + 1, "["))
        {
            kind = if self.text() == "get" {
                MethodKind::Getter
            } else {
                MethodKind::Setter
            };
            self.bump();
        }
        let mut exprs = Vec::new();
        let name: Option<String> = if self.is_punct("[") {
            let open = self.pos;
            // Index signature `[key: string]: T`.
            if self.is_name_at(open + 1) && self.is_punct_at(open + 2, ":") {
                self.bump();
                self.bump();
                self.bump();
                let key_type = self.parse_type()?;
                self.expect_punct("]")?;
                let mut types = vec![key_type];
                self.eat_punct("?");
                if self.eat_punct(":") {
                    types.push(self.parse_type()?);
                }
                self.expect_end()?;
                return Ok(ClassMember::Other {
                    types,
                    exprs: Vec::new(),
                    span: self.span_from(start),
                });
            }
            self.bump();
            exprs.push(self.parse_assignment()?);
            self.expect_punct("]")?;
            None
        } else if matches!(self.kind(), Some(TokenKind::String) | Some(TokenKind::Number)) {
            let i = self.bump();
            Some(unquote(self.text_at(i)))
        } else if self.is_name() {
            let i = self.bump();
            let n = self.text_at(i);
            if n.starts_with('#') {
                None
            } else {
                Some(n.to_string())
            }
        } else {
            return Err(self.error("expected class member"));
        };
        self.eat_punct("?");
        self.eat_punct("!");
        if self.is_punct("(") || self.is_punct("<") {
            if kind == MethodKind::Method && name.as_deref() == Some("constructor") {
                kind = MethodKind::Constructor;
            }
            let func_start = self.cur_start();
            let type_params = self.parse_type_params_opt()?;
            let params = self.parse_params()?;
            let return_type = self.parse_return_type_opt()?;
            let header = self.span_from(header_start);
            let body = if self.is_punct("{") {
                let (statements, span) = self.parse_block()?;
                Some(FunctionBody::Block { statements, span })
            } else {
                self.expect_end()?;
                None
            };
            let func = FunctionLike {
                type_params,
                params,
                return_type,
                body,
                is_arrow: false,
                span: self.span_from(func_start),
            };
            if !exprs.is_empty() {
                return Ok(ClassMember::Other {
                    types: Vec::new(),
                    exprs: {
                        let span = func.span;
                        exprs.push(Expr {
                            kind: ExprKind::ArrowFunction {
                                name: None,
                                func: Box::new(func),
                            },
                            span,
                        });
                        exprs
                    },
                    span: self.span_from(start),
                });
            }
            return Ok(ClassMember::Method {
                name,
                kind,
                is_static,
                func,
                header,
                span: self.span_from(start),
            });
        }
        let type_ann = if self.eat_punct(":") {
            Some(self.parse_type()?)
        } else {
            None
        };
        let init = if self.eat_punct("=") {
            Some(self.parse_assignment()?)
        } else {
            None
        };
        self.expect_end()?;
        if !exprs.is_empty() {
            exprs.extend(init);
            return Ok(ClassMember::Other {
                types: type_ann.into_iter().collect(),
                exprs,
                span: self.span_from(start),
            });
        }
        Ok(ClassMember::Property {
            name,
            is_static,
            type_ann,
            init,
            span: self.span_from(start),
        })
    }

    fn parse_interface(&mut self, header_start: usize, export: ExportFlags) -> PResult<InterfaceDecl> {
        self.expect_word("interface")?;
        let name = self.ident()?;
        let type_params = self.parse_type_params_opt()?;
        let mut extends = Vec::new();
        if self.eat_word("extends") {
            loop {
                extends.push(self.parse_heritage()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        let header = self.span_from(header_start);
        if !self.is_punct("{") {
            return Err(self.error("expected '{'"));
        }
        let body = self.parse_type()?;
        Ok(InterfaceDecl {
            name,
            type_params,
            extends,
            body,
            export,
            header,
        })
    }

    fn parse_type_alias(&mut self, header_start: usize, export: ExportFlags) -> PResult<TypeAliasDecl> {
        self.expect_word("type")?;
        let name = self.ident()?;
        let type_params = self.parse_type_params_opt()?;
        let header = self.span_from(header_start);
        self.expect_punct("=")?;
        let aliased = self.parse_type()?;
        self.expect_end()?;
        Ok(TypeAliasDecl {
            name,
            type_params,
            aliased,
            export,
            header,
        })
    }

    fn parse_enum(&mut self, header_start: usize, export: ExportFlags) -> PResult<EnumDecl> {
        let is_const = self.eat_word("const");
        self.expect_word("enum")?;
        let name = self.ident()?;
        let header = self.span_from(header_start);
        self.expect_punct("{")?;
        let mut members = Vec::new();
        while !self.is_punct("}") {
            let start = self.cur_start();
            let member_name = if self.kind() == Some(TokenKind::String) {
                self.string_literal()?
            } else if self.eat_punct("[") {
                let n = self.string_literal()?;
                self.expect_punct("]")?;
                n
            } else {
                self.name()?.name
            };
            let init = if self.eat_punct("=") {
                Some(self.parse_assignment()?)
            } else {
                None
            };
            members.push(EnumMember {
                name: member_name,
                init,
                span: self.span_from(start),
            });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct("}")?;
        Ok(EnumDecl {
            name,
            members,
            is_const,
            export,
            header,
        })
    }

    fn parse_variable_statement(&mut self, export: ExportFlags, is_declare: bool) -> PResult<VariableStatement> {
        let kind = self.parse_var_kind()?;
        let declarators = self.parse_declarators()?;
        self.expect_end()?;
        Ok(VariableStatement {
            kind,
            declarators,
            export,
            is_declare,
        })
    }

    fn parse_var_kind(&mut self) -> PResult<VarKind> {
        let kind = match self.text() {
            "const" => VarKind::Const,
            "let" => VarKind::Let,
            "var" => VarKind::Var,
            _ => return Err(self.error("expected variable declaration")),
        };
        self.bump();
        Ok(kind)
    }

    fn parse_declarators(&mut self) -> PResult<Vec<Declarator>> {
        let mut declarators = Vec::new();
        loop {
            let start = self.cur_start();
            let pattern = self.parse_pattern()?;
            self.eat_punct("!");
            let type_ann = if self.eat_punct(":") {
                Some(self.parse_type()?)
            } else {
                None
            };
            let init = if self.eat_punct("=") {
                Some(self.parse_assignment()?)
            } else {
                None
            };
            declarators.push(Declarator {
                pattern,
                type_ann,
                init,
                span: self.span_from(start),
            });
            if !self.eat_punct(",") {
                break;
            }
        }
        Ok(declarators)
    }

    fn parse_jump(&mut self, start: usize) -> PResult<Statement> {
        let i = self.bump();
        let keyword = self.text_at(i).to_string();
        let value = match keyword.as_str() {
            "return" | "throw" if self.can_start_expression_here() => Some(self.parse_expression()?),
            "break" | "continue" if self.is_identifier() && !self.nl_before() => {
                self.bump();
                None
            }
            _ => None,
        };
        self.expect_end()?;
        Ok(self.stmt(StatementKind::Jump { keyword, value }, start))
    }

    fn paren_expression(&mut self) -> PResult<Expr> {
        self.expect_punct("(")?;
        let e = self.parse_expression()?;
        self.expect_punct(")")?;
        Ok(e)
    }

    fn parse_control(&mut self, start: usize) -> PResult<Statement> {
        let i = self.bump();
        let keyword = self.text_at(i).to_string();
        let mut bindings = Vec::new();
        let mut exprs = Vec::new();
        let mut bodies = Vec::new();
        match keyword.as_str() {
            "if" => {
                exprs.push(self.paren_expression()?);
                bodies.push(self.parse_statement()?);
                if self.eat_word("else") {
                    bodies.push(self.parse_statement()?);
                }
            }
            "while" | "with" => {
                exprs.push(self.paren_expression()?);
                bodies.push(self.parse_statement()?);
            }
            "do" => {
                bodies.push(self.parse_statement()?);
                self.expect_word("while")?;
                exprs.push(self.paren_expression()?);
                self.eat_punct(";");
            }
            "for" => {
                self.eat_word("await");
                self.expect_punct("(")?;
                let saved = self.no_in;
                self.no_in = true;
                let head = self.parse_for_init(&mut bindings, &mut exprs);
                self.no_in = saved;
                head?;
                if self.eat_word("of") || self.eat_word("in") {
                    exprs.push(self.parse_expression()?);
                } else {
                    self.expect_punct(";")?;
                    if !self.is_punct(";") {
                        exprs.push(self.parse_expression()?);
                    }
                    self.expect_punct(";")?;
                    if !self.is_punct(")") {
                        exprs.push(self.parse_expression()?);
                    }
                }
                self.expect_punct(")")?;
                bodies.push(self.parse_statement()?);
            }
            "try" => {
                let (b, span) = self.parse_block()?;
                bodies.push(Statement {
                    kind: StatementKind::Block(b),
                    span,
                });
                if self.eat_word("catch") {
                    if self.eat_punct("(") {
                        bindings.push(self.parse_pattern()?);
                        if self.eat_punct(":") {
                            self.parse_type()?;
                        }
                        self.expect_punct(")")?;
                    }
                    let (b, span) = self.parse_block()?;
                    bodies.push(Statement {
                        kind: StatementKind::Block(b),
                        span,
                    });
                }
                if self.eat_word("finally") {
                    let (b, span) = self.parse_block()?;
                    bodies.push(Statement {
                        kind: StatementKind::Block(b),
                        span,
                    });
                }
            }
            "switch" => {
                exprs.push(self.paren_expression()?);
                self.expect_punct("{")?;
                while !self.is_punct("}") {
                    let case_start = self.cur_start();
                    if self.eat_word("case") {
                        exprs.push(self.parse_expression()?);
                    } else {
                        self.expect_word("default")?;
                    }
                    self.expect_punct(":")?;
                    let statements = self.parse_statement_list(&["}", "case"], false);
                    bodies.push(Statement {
                        kind: StatementKind::Block(statements),
                        span: self.span_from(case_start),
                    });
                    if self.at_eof() {
                        break;
                    }
                }
                self.expect_punct("}")?;
            }
            _ => return Err(self.error("unsupported statement")),
        }
        Ok(self.stmt(
            StatementKind::Control {
                keyword,
                bindings,
                exprs,
                bodies,
            },
            start,
        ))
    }

    fn parse_for_init(&mut self, bindings: &mut Vec<Pattern>, exprs: &mut Vec<Expr>) -> PResult<()> {
        if self.is_punct(";") {
            return Ok(());
        }
        if self.is_word("const") || self.is_word("var") || (self.is_word("let") && !self.is_punct_at(self.pos + 1, "="))
        {
            self.bump();
            for d in self.parse_declarators()? {
                exprs.extend(d.pattern.exprs.iter().cloned());
                bindings.push(d.pattern);
                exprs.extend(d.init);
            }
        } else {
            exprs.push(self.parse_expression()?);
        }
        Ok(())
    }

    // ----- expressions --------------------------------------------------

    fn parse_expression(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        let first = self.parse_assignment()?;
        if !self.is_punct(",") {
            return Ok(first);
        }
        let mut children = vec![first];
        while self.eat_punct(",") {
            children.push(self.parse_assignment()?);
        }
        Ok(Expr {
            kind: ExprKind::Other {
                children,
                types: Vec::new(),
            },
            span: self.span_from(start),
        })
    }

    fn parse_assignment(&mut self) -> PResult<Expr> {
        self.nested(|p| p.parse_assignment_inner())
    }

    fn parse_assignment_inner(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        if let Some(arrow) = self.try_arrow()? {
            return Ok(arrow);
        }
        if self.is_word("yield") {
            self.bump();
            self.eat_punct("*");
            let mut children = Vec::new();
            if self.can_start_expression_here() {
                children.push(self.parse_assignment()?);
            }
            return Ok(Expr {
                kind: ExprKind::Other {
                    children,
                    types: Vec::new(),
                },
                span: self.span_from(start),
            });
        }
        let lhs = self.parse_conditional()?;
        if self.kind() == Some(TokenKind::Punct) && ASSIGN_OPS.contains(&self.text()) {
            self.bump();
            let rhs = self.parse_assignment()?;
            return Ok(Expr {
                kind: ExprKind::Other {
                    children: vec![lhs, rhs],
                    types: Vec::new(),
                },
                span: self.span_from(start),
            });
        }
        // `a >>= b`, `a >= b` arrive as separate `>` tokens.
        Ok(lhs)
    }

    /// Recognizes and parses an arrow function at the current position.
    fn try_arrow(&mut self) -> PResult<Option<Expr>> {
        let start = self.cur_start();
        let mut i = self.pos;
        let is_async = self.is_word("async")
            && !self.nl_before_at(i + 1)
            && (self.is_identifier_at(i + 1) || self.is_punct_at(i + 1, "(") || self.is_punct_at(i + 1, "<"));
        if is_async {
            i += 1;
        }
        // `x => ...`
        if self.is_identifier_at(i) && self.is_punct_at(i + 1, "=>") && !self.nl_before_at(i + 1) {
            self.pos = i;
            let ident = self.ident()?;
            self.bump();
            let params = vec![Param {
                pattern: Pattern {
                    names: vec![ident.clone()],
                    exprs: Vec::new(),
                    span: ident.span,
                },
                type_ann: None,
                default: None,
                span: ident.span,
            }];
            return self.finish_arrow(start, Vec::new(), params, None).map(Some);
        }
        let paren = self.is_punct_at(i, "(");
        let angle = self.is_punct_at(i, "<");
        if !paren && !angle {
            return Ok(None);
        }
        if paren {
            let close = match self.matching_close(i) {
                Some(c) => c,
                None => return Ok(None),
            };
            let after = close + 1;
            let definitely = self.is_punct_at(after, "=>");
            if !definitely && !self.is_punct_at(after, ":") {
                return Ok(None);
            }
        }
        let saved = self.pos;
        self.pos = i;
        let head = self.attempt(|p| {
            let type_params = p.parse_type_params_opt()?;
            let params = p.parse_params()?;
            let return_type = p.parse_return_type_opt()?;
            if !p.is_punct("=>") || p.nl_before() {
                return Err(p.error("expected '=>'"));
            }
            p.bump();
            Ok((type_params, params, return_type))
        });
        match head {
            Some((type_params, params, return_type)) => {
                self.finish_arrow(start, type_params, params, return_type).map(Some)
            }
            None => {
                self.pos = saved;
                Ok(None)
            }
        }
    }

    fn finish_arrow(
        &mut self,
        start: usize,
        type_params: Vec<TypeParam>,
        params: Vec<Param>,
        return_type: Option<TypeAnnotation>,
    ) -> PResult<Expr> {
        let body = if self.is_punct("{") {
            let (statements, span) = self.parse_block()?;
            FunctionBody::Block { statements, span }
        } else {
            let saved = self.no_in;
            self.no_in = false;
            let e = self.parse_assignment();
            self.no_in = saved;
            FunctionBody::Expr(Box::new(e?))
        };
        let span = self.span_from(start);
        Ok(Expr {
            kind: ExprKind::ArrowFunction {
                name: None,
                func: Box::new(FunctionLike {
                    type_params,
                    params,
                    return_type,
                    body: Some(body),
                    is_arrow: true,
                    span,
                }),
            },
            span,
        })
    }

    fn parse_conditional(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        let cond = self.parse_binary()?;
        if !self.is_punct("?") {
            return Ok(cond);
        }
        self.bump();
        let saved = self.no_in;
        self.no_in = false;
        let then = self.parse_assignment();
        self.no_in = saved;
        let then = then?;
        self.expect_punct(":")?;
        let otherwise = self.parse_assignment()?;
        Ok(Expr {
            kind: ExprKind::Other {
                children: vec![cond, then, otherwise],
                types: Vec::new(),
            },
            span: self.span_from(start),
        })
    }

    fn at_binary_op(&self) -> bool {
        match self.kind() {
            Some(TokenKind::Punct) => BINARY_OPS.contains(&self.text()),
            Some(TokenKind::Keyword) => self.text() == "instanceof" || (self.text() == "in" && !self.no_in),
            Some(TokenKind::Identifier) => (self.text() == "as" || self.text() == "satisfies") && !self.nl_before(),
            _ => false,
        }
    }

    fn parse_binary(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        let first = self.parse_unary()?;
        if !self.at_binary_op() {
            return Ok(first);
        }
        let mut children = vec![first];
        let mut types = Vec::new();
        while self.at_binary_op() {
            if self.is_word("as") || self.is_word("satisfies") {
                self.bump();
                if !self.eat_word("const") {
                    types.push(self.parse_type()?);
                }
                continue;
            }
            let op = self.bump();
            if self.text_at(op) == ">" {
                // Re-join `>=`, `>>`, `>>>` split by the lexer.
                while (self.is_punct(">") || self.is_punct("=") || self.is_punct("==") || self.is_punct(">>>="))
                    && self.cur_start() == self.prev_end()
                {
                    let joined_assign = self.is_punct("=") && self.text_at(op) == ">" && {
                        // `a >>= b` is an assignment.
                        self.pos >= 2 && self.text_at(self.pos - 1) == ">" && self.text_at(self.pos - 2) == ">"
                    };
                    self.bump();
                    if joined_assign {
                        break;
                    }
                }
            }
            children.push(self.parse_unary()?);
        }
        Ok(Expr {
            kind: ExprKind::Other { children, types },
            span: self.span_from(start),
        })
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        self.nested(|p| p.parse_unary_inner())
    }

    fn parse_unary_inner(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        let is_prefix = match self.kind() {
            Some(TokenKind::Punct) => matches!(self.text(), "!" | "~" | "+" | "-" | "++" | "--"),
            Some(TokenKind::Keyword) => {
                matches!(self.text(), "typeof" | "void" | "delete")
                    || (self.text() == "await" && self.can_start_expression_at(self.pos + 1))
            }
            _ => false,
        };
        if is_prefix {
            self.bump();
            let operand = self.parse_unary()?;
            return Ok(Expr {
                kind: ExprKind::Other {
                    children: vec![operand],
                    types: Vec::new(),
                },
                span: self.span_from(start),
            });
        }
        if self.is_punct("<") {
            // `<T>expr` type assertion.
            self.bump();
            let ty = self.parse_type()?;
            self.expect_punct(">")?;
            let operand = self.parse_unary()?;
            return Ok(Expr {
                kind: ExprKind::Other {
                    children: vec![operand],
                    types: vec![ty],
                },
                span: self.span_from(start),
            });
        }
        self.parse_postfix()
    }

    fn can_start_expression_at(&self, i: usize) -> bool {
        match self.kind_at(i) {
            None => false,
            Some(TokenKind::Punct) => matches!(
                self.text_at(i),
                "(" | "[" | "{" | "!" | "~" | "+" | "-" | "++" | "--" | "<" | "/" | "@"
            ),
            Some(TokenKind::Keyword) => !matches!(self.text_at(i), "in" | "instanceof" | "of"),
            _ => true,
        }
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        let mut expr = self.parse_primary()?;
        loop {
            if self.is_punct(".") || (self.is_punct("?.") && self.is_name_at(self.pos + 1)) {
                self.bump();
                let property = self.name()?.name;
                expr = Expr {
                    kind: ExprKind::PropertyAccess {
                        object: Box::new(expr),
                        property,
                    },
                    span: self.span_from(start),
                };
            } else if self.is_punct("?.") {
                self.bump();
                if self.is_punct("(") {
                    let args = self.parse_args()?;
                    expr = self.call(expr, Vec::new(), args, start);
                } else {
                    self.expect_punct("[")?;
                    let index = self.parse_expression()?;
                    self.expect_punct("]")?;
                    expr = self.other(vec![expr, index], start);
                }
            } else if self.is_punct("[") {
                self.bump();
                let saved = self.no_in;
                self.no_in = false;
                let index = self.parse_expression();
                self.no_in = saved;
                let index = index?;
                self.expect_punct("]")?;
                expr = self.other(vec![expr, index], start);
            } else if self.is_punct("(") {
                let args = self.parse_args()?;
                expr = self.call(expr, Vec::new(), args, start);
            } else if self.is_punct("!") && !self.nl_before() {
                self.bump();
                expr.span = self.span_from(start);
            } else if self.kind() == Some(TokenKind::Template) {
                let template = self.parse_template()?;
                expr = self.call(expr, Vec::new(), vec![template], start);
            } else if (self.is_punct("++") || self.is_punct("--")) && !self.nl_before() {
                self.bump();
                expr = self.other(vec![expr], start);
            } else if self.is_punct("<") {
                let type_args = self.attempt(|p| {
                    let args = p.parse_type_args()?;
                    if p.is_punct("(") || p.kind() == Some(TokenKind::Template) {
                        Ok(args)
                    } else {
                        Err(p.error("not a type argument list"))
                    }
                });
                match type_args {
                    Some(type_args) => {
                        let args = if self.kind() == Some(TokenKind::Template) {
                            vec![self.parse_template()?]
                        } else {
                            self.parse_args()?
                        };
                        expr = self.call(expr, type_args, args, start);
                    }
                    None => break,
                }
            } else {
                break;
            }
        }
        Ok(expr)
    }

    fn call(&self, callee: Expr, type_args: Vec<TypeAnnotation>, args: Vec<Expr>, start: usize) -> Expr {
        Expr {
            kind: ExprKind::Call {
                callee: Box::new(callee),
                type_args,
                args,
            },
            span: self.span_from(start),
        }
    }

    fn other(&self, children: Vec<Expr>, start: usize) -> Expr {
        Expr {
            kind: ExprKind::Other {
                children,
                types: Vec::new(),
            },
            span: self.span_from(start),
        }
    }

    fn parse_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let saved = self.no_in;
        self.no_in = false;
        let result = (|| {
            let mut args = Vec::new();
            while !self.is_punct(")") {
                self.eat_punct("...");
                args.push(self.parse_assignment()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct(")")?;
            Ok(args)
        })();
        self.no_in = saved;
        result
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        let leaf = |p: &Self, kind: ExprKind| Expr {
            kind,
            span: p.span_from(start),
        };
        match self.kind() {
            None => Err(self.error("expected expression")),
            Some(TokenKind::Identifier) => {
                let i = self.bump();
                Ok(leaf(self, ExprKind::Identifier(self.text_at(i).to_string())))
            }
            Some(TokenKind::Number) | Some(TokenKind::String) | Some(TokenKind::Regex) => {
                self.bump();
                Ok(leaf(self, ExprKind::Literal))
            }
            Some(TokenKind::Template) => self.parse_template(),
            Some(TokenKind::Keyword) => match self.text() {
                "this" | "super" => {
                    let i = self.bump();
                    Ok(leaf(self, ExprKind::Identifier(self.text_at(i).to_string())))
                }
                "true" | "false" | "null" => {
                    self.bump();
                    Ok(leaf(self, ExprKind::Literal))
                }
                "function" => {
                    self.bump();
                    self.eat_punct("*");
                    let name = if self.is_identifier() {
                        Some(self.ident()?)
                    } else {
                        None
                    };
                    let type_params = self.parse_type_params_opt()?;
                    let params = self.parse_params()?;
                    let return_type = self.parse_return_type_opt()?;
                    let (statements, span) = self.parse_block()?;
                    let func = FunctionLike {
                        type_params,
                        params,
                        return_type,
                        body: Some(FunctionBody::Block { statements, span }),
                        is_arrow: false,
                        span: self.span_from(start),
                    };
                    Ok(leaf(
                        self,
                        ExprKind::ArrowFunction {
                            name,
                            func: Box::new(func),
                        },
                    ))
                }
                "class" => {
                    let decl = self.parse_class(start, ExportFlags::default(), true)?;
                    Ok(leaf(self, ExprKind::Class(Box::new(decl))))
                }
                "new" => self.parse_new(),
                "import" => {
                    self.bump();
                    if self.eat_punct(".") {
                        self.name()?;
                        return Ok(leaf(self, ExprKind::Literal));
                    }
                    let args = self.parse_args()?;
                    Ok(self.other(args, start))
                }
                t if SOFT_KEYWORDS.contains(&t) => {
                    let i = self.bump();
                    Ok(leaf(self, ExprKind::Identifier(self.text_at(i).to_string())))
                }
                _ => Err(self.error("expected expression")),
            },
            Some(TokenKind::Punct) => match self.text() {
                "(" => {
                    self.bump();
                    let saved = self.no_in;
                    self.no_in = false;
                    let inner = self.parse_expression();
                    self.no_in = saved;
                    let inner = inner?;
                    self.expect_punct(")")?;
                    Ok(self.other(vec![inner], start))
                }
                "[" => {
                    self.bump();
                    let mut children = Vec::new();
                    while !self.is_punct("]") {
                        if self.eat_punct(",") {
                            continue;
                        }
                        self.eat_punct("...");
                        children.push(self.parse_assignment()?);
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                    self.expect_punct("]")?;
                    Ok(self.other(children, start))
                }
                "{" => self.parse_object_literal(),
                "@" => {
                    self.skip_decorators();
                    let decl = self.parse_class(start, ExportFlags::default(), true)?;
                    Ok(leaf(self, ExprKind::Class(Box::new(decl))))
                }
                _ => Err(self.error("expected expression")),
            },
            Some(_) => Err(self.error("unexpected token")),
        }
    }

    fn parse_new(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        self.expect_word("new")?;
        if self.eat_punct(".") {
            self.name()?;
            return Ok(Expr {
                kind: ExprKind::Literal,
                span: self.span_from(start),
            });
        }
        let callee_start = self.cur_start();
        let mut callee = if self.is_word("new") {
            self.parse_new()?
        } else {
            self.parse_primary()?
        };
        loop {
            if self.eat_punct(".") {
                let property = self.name()?.name;
                callee = Expr {
                    kind: ExprKind::PropertyAccess {
                        object: Box::new(callee),
                        property,
                    },
                    span: self.span_from(callee_start),
                };
            } else if self.is_punct("[") {
                self.bump();
                let index = self.parse_expression()?;
                self.expect_punct("]")?;
                callee = self.other(vec![callee, index], callee_start);
            } else {
                break;
            }
        }
        let type_args = if self.is_punct("<") {
            self.parse_type_args()?
        } else {
            Vec::new()
        };
        let args = if self.is_punct("(") {
            self.parse_args()?
        } else {
            Vec::new()
        };
        Ok(Expr {
            kind: ExprKind::New {
                callee: Box::new(callee),
                type_args,
                args,
            },
            span: self.span_from(start),
        })
    }

    fn parse_object_literal(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        self.expect_punct("{")?;
        let saved = self.no_in;
        self.no_in = false;
        let result = self.parse_object_members();
        self.no_in = saved;
        let children = result?;
        self.expect_punct("}")?;
        Ok(self.other(children, start))
    }

    fn parse_object_members(&mut self) -> PResult<Vec<Expr>> {
        let mut children = Vec::new();
        while !self.is_punct("}") {
            if self.eat_punct("...") {
                children.push(self.parse_assignment()?);
            } else {
                let member_start = self.cur_start();
                let mut modified = false;
                if (self.is_word("get") || self.is_word("set") || self.is_word("async"))
                    && !self.nl_before_at(self.pos + 1)
                    && (self.is_name_at(self.pos + 1)
                        || matches!(
                            self.kind_at(self.pos + 1),
                            Some(TokenKind::String) | Some(TokenKind::Number)
                        )
                        || self.is_punct_at(self.pos + 1, "[")
                        || self.is_punct_at(self.pos + 1, "*"))
                {
                    self.bump();
                    modified = true;
                }
                if self.eat_punct("*") {
                    modified = true;
                }
                let key_is_ident = self.is_identifier();
                let key_tok = self.pos;
                if self.eat_punct("[") {
                    children.push(self.parse_assignment()?);
                    self.expect_punct("]")?;
                } else if matches!(self.kind(), Some(TokenKind::String) | Some(TokenKind::Number)) || self.is_name() {
                    self.bump();
                } else {
                    return Err(self.error("expected property name"));
                }
                if self.is_punct("(") || self.is_punct("<") {
                    let type_params = self.parse_type_params_opt()?;
                    let params = self.parse_params()?;
                    let return_type = self.parse_return_type_opt()?;
                    let (statements, span) = self.parse_block()?;
                    let func_span = self.span_from(member_start);
                    children.push(Expr {
                        kind: ExprKind::ArrowFunction {
                            name: None,
                            func: Box::new(FunctionLike {
                                type_params,
                                params,
                                return_type,
                                body: Some(FunctionBody::Block { statements, span }),
                                is_arrow: false,
                                span: func_span,
                            }),
                        },
                        span: func_span,
                    });
                } else if !modified && self.eat_punct(":") {
                    children.push(self.parse_assignment()?);
                } else if !modified && key_is_ident {
                    children.push(Expr {
                        kind: ExprKind::Identifier(self.text_at(key_tok).to_string()),
                        span: self.tok_span(key_tok),
                    });
                    if self.eat_punct("=") {
                        children.push(self.parse_assignment()?);
                    }
                } else {
                    return Err(self.error("expected ':'"));
                }
            }
            if !self.eat_punct(",") {
                break;
            }
        }
        Ok(children)
    }

    fn parse_template(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        if self.kind() != Some(TokenKind::Template) {
            return Err(self.error("expected template literal"));
        }
        let i = self.bump();
        let tok_start = self.toks[i].start;
        let mut subs = Vec::new();
        scan_template_parts(self.src, tok_start, &mut subs);
        let mut children = Vec::new();
        for (s, e) in subs {
            let mut sub = Parser::new(self.src, self.index, s, e, self.depth + 1);
            if sub.depth >= MAX_DEPTH {
                return Err(self.error("nesting too deep"));
            }
            let expr = sub.parse_expression()?;
            if !sub.at_eof() {
                return Err(sub.error("unexpected token in template substitution"));
            }
            children.push(expr);
        }
        Ok(self.other(children, start))
    }

    // ----- types --------------------------------------------------------

    fn parse_type_params_opt(&mut self) -> PResult<Vec<TypeParam>> {
        if !self.is_punct("<") {
            return Ok(Vec::new());
        }
        self.bump();
        let mut params = Vec::new();
        while !self.is_punct(">") {
            let start = self.cur_start();
            while (self.is_word("const") || self.is_word("in") || self.is_word("out"))
                && self.is_identifier_at(self.pos + 1)
            {
                self.bump();
            }
            let name = self.ident()?;
            let constraint = if self.eat_word("extends") {
                Some(self.parse_type_no_conditional()?)
            } else {
                None
            };
            let default = if self.eat_punct("=") {
                Some(self.parse_type()?)
            } else {
                None
            };
            params.push(TypeParam {
                name,
                constraint,
                default,
                span: self.span_from(start),
            });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(">")?;
        Ok(params)
    }

    fn parse_type_args(&mut self) -> PResult<Vec<TypeAnnotation>> {
        self.expect_punct("<")?;
        let mut args = Vec::new();
        while !self.is_punct(">") {
            args.push(self.parse_type()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(">")?;
        Ok(args)
    }

    fn type_args_into(&mut self, refs: &mut Vec<TypeRef>) -> PResult<()> {
        self.expect_punct("<")?;
        while !self.is_punct(">") {
            self.type_union(refs, false)?;
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(">")
    }

    fn parse_type(&mut self) -> PResult<TypeAnnotation> {
        self.parse_type_with(false)
    }

    fn parse_type_no_conditional(&mut self) -> PResult<TypeAnnotation> {
        self.parse_type_with(true)
    }

    fn parse_type_with(&mut self, no_conditional: bool) -> PResult<TypeAnnotation> {
        let start = self.cur_start();
        let locals = self.type_locals.len();
        let mut refs = Vec::new();
        let simple = self.type_union(&mut refs, no_conditional);
        self.type_locals.truncate(locals);
        let simple_name = simple?;
        Ok(TypeAnnotation {
            refs,
            simple_name,
            span: self.span_from(start),
        })
    }

    fn type_union(&mut self, refs: &mut Vec<TypeRef>, no_conditional: bool) -> PResult<Option<String>> {
        self.nested(|p| {
            let leading = p.eat_punct("|") || p.eat_punct("&");
            let mut simple = p.type_operand(refs)?;
            if leading {
                simple = None;
            }
            while p.is_punct("|") || p.is_punct("&") {
                p.bump();
                p.type_operand(refs)?;
                simple = None;
            }
            if !no_conditional && p.is_word("extends") && !p.nl_before() {
                p.bump();
                p.type_union(refs, true)?;
                p.expect_punct("?")?;
                p.type_union(refs, false)?;
                p.expect_punct(":")?;
                p.type_union(refs, false)?;
                simple = None;
            }
            Ok(simple)
        })
    }

    fn push_type_ref(&self, refs: &mut Vec<TypeRef>, name: String, is_value: bool, span: Span) {
        let head = name.split('.').next().unwrap_or(&name);
        if !is_value && self.type_locals.iter().any(|l| l == head) {
            return;
        }
        refs.push(TypeRef { name, is_value, span });
    }

    fn dotted_type_name(&mut self) -> PResult<String> {
        let mut name = self.name()?.name;
        while self.is_punct(".") && self.is_name_at(self.pos + 1) {
            self.bump();
            name.push('.');
            name.push_str(&self.name()?.name);
        }
        Ok(name)
    }

    fn type_operand(&mut self, refs: &mut Vec<TypeRef>) -> PResult<Option<String>> {
        let mut simple = None;
        // Prefix operators.
        loop {
            if (self.is_word("keyof") || self.is_word("unique") || self.is_word("readonly"))
                && self.can_start_type_at(self.pos + 1)
            {
                self.bump();
                continue;
            }
            if self.is_word("asserts") && self.is_name_at(self.pos + 1) && !self.nl_before_at(self.pos + 1) {
                self.bump();
                self.bump();
                if self.eat_word("is") {
                    continue;
                }
                return Ok(None);
            }
            if self.is_name() && self.is_word_at(self.pos + 1, "is") && !self.nl_before_at(self.pos + 1) {
                self.bump();
                self.bump();
                continue;
            }
            break;
        }
        if self.is_word("infer") && self.is_identifier_at(self.pos + 1) {
            self.bump();
            let name = self.ident()?;
            self.type_locals.push(name.name);
            if self.is_word("extends") && !self.is_punct_at(self.pos + 2, "?") {
                let saved = self.pos;
                self.bump();
                if self.type_operand(refs).is_err() {
                    self.pos = saved;
                }
            }
            return Ok(None);
        }
        let start = self.cur_start();
        match self.kind() {
            Some(TokenKind::Identifier) => {
                let name = self.dotted_type_name()?;
                self.push_type_ref(refs, name.clone(), false, self.span_from(start));
                if self.is_punct("<") && !self.nl_before() {
                    self.type_args_into(refs)?;
                }
                simple = Some(name);
            }
            Some(TokenKind::Keyword) => match self.text() {
                "typeof" => {
                    self.bump();
                    if self.is_word("import") {
                        self.bump();
                        self.skip_balanced();
                        while self.eat_punct(".") {
                            self.name()?;
                        }
                    } else {
                        let s = self.cur_start();
                        let name = self.dotted_type_name()?;
                        self.push_type_ref(refs, name, true, self.span_from(s));
                    }
                    if self.is_punct("<") && !self.nl_before() {
                        self.type_args_into(refs)?;
                    }
                }
                "import" => {
                    self.bump();
                    self.skip_balanced();
                    while self.eat_punct(".") {
                        self.name()?;
                    }
                    if self.is_punct("<") {
                        self.type_args_into(refs)?;
                    }
                }
                "new" => {
                    self.bump();
                    self.function_type(refs)?;
                }
                "void" | "null" | "this" | "true" | "false" | "undefined" => {
                    self.bump();
                }
                _ => return Err(self.error("expected type")),
            },
            Some(TokenKind::String) | Some(TokenKind::Number) | Some(TokenKind::Template) => {
                self.bump();
            }
            Some(TokenKind::Punct) => match self.text() {
                "-" if self.kind_at(self.pos + 1) == Some(TokenKind::Number) => {
                    self.bump();
                    self.bump();
                }
                "(" => {
                    let close = self.matching_close(self.pos);
                    if close.is_some_and(|c| self.is_punct_at(c + 1, "=>")) {
                        self.function_type(refs)?;
                    } else {
                        self.bump();
                        self.type_union(refs, false)?;
                        self.expect_punct(")")?;
                    }
                }
                "<" => self.function_type(refs)?,
                "{" => self.object_type(refs)?,
                "[" => self.tuple_type(refs)?,
                _ => return Err(self.error("expected type")),
            },
            _ => return Err(self.error("expected type")),
        }
        // Postfix `[]` and indexed access.
        while self.is_punct("[") && !self.nl_before() {
            simple = None;
            self.bump();
            if !self.is_punct("]") {
                self.type_union(refs, false)?;
            }
            self.expect_punct("]")?;
        }
        Ok(simple)
    }

    fn can_start_type_at(&self, i: usize) -> bool {
        match self.kind_at(i) {
            None => false,
            Some(TokenKind::Punct) => matches!(self.text_at(i), "(" | "[" | "{" | "<" | "-"),
            _ => true,
        }
    }

    fn function_type(&mut self, refs: &mut Vec<TypeRef>) -> PResult<()> {
        let locals = self.type_locals.len();
        let result = (|| {
            if self.is_punct("<") {
                let tps = self.parse_type_params_opt()?;
                for tp in &tps {
                    self.type_locals.push(tp.name.name.clone());
                }
                for tp in tps {
                    for t in tp.constraint.into_iter().chain(tp.default) {
                        refs.extend(
                            t.refs
                                .into_iter()
                                .filter(|r| !self.type_locals.contains(&head(&r.name))),
                        );
                    }
                }
            }
            let params = self.parse_params()?;
            for p in params {
                if let Some(t) = p.type_ann {
                    refs.extend(
                        t.refs
                            .into_iter()
                            .filter(|r| !self.type_locals.contains(&head(&r.name))),
                    );
                }
            }
            self.expect_punct("=>")?;
            self.type_union(refs, false)?;
            Ok(())
        })();
        self.type_locals.truncate(locals);
        result
    }

    fn object_type(&mut self, refs: &mut Vec<TypeRef>) -> PResult<()> {
        self.expect_punct("{")?;
        while !self.is_punct("}") && !self.at_eof() {
            if self.eat_punct(";") || self.eat_punct(",") {
                continue;
            }
            let member_start = self.pos;
            let saved_refs = refs.len();
            if self.object_type_member(refs).is_err() {
                // Out-of-grammar member: skip to the next separator.
                refs.truncate(saved_refs);
                self.pos = member_start;
                self.skip_type_member();
            }
        }
        self.expect_punct("}")
    }

    fn skip_type_member(&mut self) {
        let start = self.pos;
        while !self.at_eof() {
            if self.pos > start && self.nl_before() {
                return;
            }
            match self.text() {
                "(" | "[" | "{" if self.kind() == Some(TokenKind::Punct) => self.skip_balanced(),
                "}" => return,
                ";" | "," => {
                    self.bump();
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn object_type_member(&mut self, refs: &mut Vec<TypeRef>) -> PResult<()> {
        let locals = self.type_locals.len();
        let result = self.object_type_member_inner(refs);
        self.type_locals.truncate(locals);
        result?;
        if self.eat_punct(";") || self.eat_punct(",") || self.is_punct("}") || self.nl_before() {
            Ok(())
        } else {
            Err(self.error("expected ';' in type member"))
        }
    }

    fn object_type_member_inner(&mut self, refs: &mut Vec<TypeRef>) -> PResult<()> {
        if self.is_punct("+") || self.is_punct("-") {
            self.bump();
        }
        if self.is_word("readonly")
            && !self.is_punct_at(self.pos + 1, ":")
            && !self.is_punct_at(self.pos + 1, "?")
            && !self.is_punct_at(self.pos + 1, "(")
        {
            self.bump();
        }
        if (self.is_word("get") || self.is_word("set"))
            && (self.is_name_at(self.pos + 1) || self.is_punct_at(self.pos + 1, "["))
        {
            self.bump();
        }
        if self.is_word("new") && (self.is_punct_at(self.pos + 1, "(") || self.is_punct_at(self.pos + 1, "<")) {
            self.bump();
        }
        if self.is_punct("(") || self.is_punct("<") {
            return self.signature_tail(refs);
        }
        if self.eat_punct("[") {
            if self.is_identifier() && self.is_word_at(self.pos + 1, "in") {
                // Mapped type key.
                let key = self.ident()?;
                self.bump();
                self.type_locals.push(key.name);
                self.type_union(refs, false)?;
                if self.eat_word("as") {
                    self.type_union(refs, false)?;
                }
                self.expect_punct("]")?;
            } else if self.is_name() && self.is_punct_at(self.pos + 1, ":") {
                self.bump();
                self.bump();
                self.type_union(refs, false)?;
                self.expect_punct("]")?;
            } else {
                // Computed key such as `[Symbol.iterator]`.
                let close = self.pos.checked_sub(1).and_then(|o| self.matching_close(o));
                match close {
                    Some(c) => self.pos = c + 1,
                    None => return Err(self.error("unterminated computed key")),
                }
            }
        } else if self.is_name() || matches!(self.kind(), Some(TokenKind::String) | Some(TokenKind::Number)) {
            self.bump();
        } else {
            return Err(self.error("expected type member"));
        }
        if self.is_punct("+") || self.is_punct("-") {
            self.bump();
        }
        self.eat_punct("?");
        if self.is_punct("(") || self.is_punct("<") {
            return self.signature_tail(refs);
        }
        if self.eat_punct(":") {
            self.type_union(refs, false)?;
        }
        Ok(())
    }

    fn signature_tail(&mut self, refs: &mut Vec<TypeRef>) -> PResult<()> {
        let tps = self.parse_type_params_opt()?;
        for tp in &tps {
            self.type_locals.push(tp.name.name.clone());
        }
        let params = self.parse_params()?;
        for p in params {
            if let Some(t) = p.type_ann {
                refs.extend(
                    t.refs
                        .into_iter()
                        .filter(|r| !self.type_locals.contains(&head(&r.name))),
                );
            }
        }
        if self.eat_punct(":") {
            self.type_union(refs, false)?;
        }
        Ok(())
    }

    fn tuple_type(&mut self, refs: &mut Vec<TypeRef>) -> PResult<()> {
        self.expect_punct("[")?;
        while !self.is_punct("]") {
            self.eat_punct("...");
            if self.is_name()
                && (self.is_punct_at(self.pos + 1, ":")
                    || (self.is_punct_at(self.pos + 1, "?") && self.is_punct_at(self.pos + 2, ":")))
            {
                self.bump();
                self.eat_punct("?");
                self.bump();
            }
            self.type_union(refs, false)?;
            self.eat_punct("?");
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct("]")
    }
}

fn head(name: &str) -> String {
    name.split('.').next().unwrap_or(name).to_string()
}

/// Strips the quotes from a string literal and resolves simple escapes.
pub(crate) fn unquote(lit: &str) -> String {
    let inner = if lit.len() >= 2 { &lit[1..lit.len() - 1] } else { lit };
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(other) => out.push(other),
                None => {}
            }
        } else {
            out.push(c);
        }
    }
    out
}
