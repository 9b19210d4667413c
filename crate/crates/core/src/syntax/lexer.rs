//! Lossless tokenizer. Every byte of the input belongs to exactly one token,
//! trivia included, so concatenating the lexemes reproduces the source.

use super::span::{LineIndex, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Punct,
    String,
    Number,
    Template,
    Regex,
    Comment,
    Whitespace,
    Newline,
    /// Unknown character or unterminated literal.
    Error,
}

impl TokenKind {
    pub fn is_trivia(self) -> bool {
        matches!(self, TokenKind::Comment | TokenKind::Whitespace | TokenKind::Newline)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'src> {
    pub kind: TokenKind,
    pub lexeme: &'src str,
    pub span: Span,
}

/// Reserved words, including those reserved only in strict mode.
pub const KEYWORDS: &[&str] = &[
    "await",
    "break",
    "case",
    "catch",
    "class",
    "const",
    "continue",
    "debugger",
    "default",
    "delete",
    "do",
    "else",
    "enum",
    "export",
    "extends",
    "false",
    "finally",
    "for",
    "function",
    "if",
    "implements",
    "import",
    "in",
    "instanceof",
    "interface",
    "let",
    "new",
    "null",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "static",
    "super",
    "switch",
    "this",
    "throw",
    "true",
    "try",
    "typeof",
    "var",
    "void",
    "while",
    "with",
    "yield",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

const PUNCTUATORS: &[&str] = &[
    ">>>=", "...", "===", "!==", "**=", "<<=", "&&=", "||=", "??=", "=>", "==", "!=", "<=", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "&&", "||", "??", "?.", "++", "--", "**", "<<",
];

/// Raw token before line/column resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct RawToken {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

pub fn tokenize(source: &str) -> Vec<Token<'_>> {
    let index = LineIndex::new(source);
    lex_range(source, 0, source.len())
        .into_iter()
        .map(|t| Token {
            kind: t.kind,
            lexeme: &source[t.start..t.end],
            span: index.span(t.start, t.end),
        })
        .collect()
}

/// Lexes `source[start..end]`, reporting offsets relative to `source`.
pub(crate) fn lex_range(source: &str, start: usize, end: usize) -> Vec<RawToken> {
    let mut lexer = Lexer {
        src: &source[..end],
        pos: start,
        regex_allowed: true,
        out: Vec::new(),
    };
    lexer.run();
    lexer.out
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    /// Whether a `/` at this point starts a regular expression literal.
    regex_allowed: bool,
    out: Vec<RawToken>,
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c == '$' || c == '\u{200c}' || c == '\u{200d}' || c.is_alphanumeric()
}

fn is_newline(c: char) -> bool {
    matches!(c, '\n' | '\r' | '\u{2028}' | '\u{2029}')
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.src.get(self.pos + offset..)?.chars().next()
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        self.out.push(RawToken {
            kind,
            start,
            end: self.pos,
        });
        if !kind.is_trivia() {
            self.regex_allowed = match kind {
                TokenKind::Identifier
                | TokenKind::Number
                | TokenKind::String
                | TokenKind::Template
                | TokenKind::Regex => false,
                TokenKind::Keyword => {
                    !matches!(&self.src[start..self.pos], "this" | "super" | "true" | "false" | "null")
                }
                TokenKind::Punct => !matches!(&self.src[start..self.pos], ")" | "]" | "}"),
                _ => true,
            };
        }
    }

    fn run(&mut self) {
        if self.pos == 0 && self.rest().starts_with("#!") {
            self.skip_line();
            self.push(TokenKind::Comment, 0);
        }
        while let Some(c) = self.peek() {
            let start = self.pos;
            if is_newline(c) {
                self.pos += c.len_utf8();
                if c == '\r' && self.peek() == Some('\n') {
                    self.pos += 1;
                }
                self.push(TokenKind::Newline, start);
            } else if c.is_whitespace() || c == '\u{feff}' {
                while let Some(c) = self.peek() {
                    if is_newline(c) || !(c.is_whitespace() || c == '\u{feff}') {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
                self.push(TokenKind::Whitespace, start);
            } else if self.rest().starts_with("//") {
                self.skip_line();
                self.push(TokenKind::Comment, start);
            } else if self.rest().starts_with("/*") {
                let kind = match self.rest()[2..].find("*/") {
                    Some(i) => {
                        self.pos += 2 + i + 2;
                        TokenKind::Comment
                    }
                    None => {
                        self.pos = self.src.len();
                        TokenKind::Error
                    }
                };
                self.push(kind, start);
            } else if is_ident_start(c) || (c == '#' && self.peek_at(1).is_some_and(is_ident_start)) {
                self.pos += c.len_utf8();
                while let Some(c) = self.peek() {
                    if !is_ident_continue(c) {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
                let word = &self.src[start..self.pos];
                let kind = if is_keyword(word) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                };
                self.push(kind, start);
            } else if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
                self.lex_number();
                self.push(TokenKind::Number, start);
            } else if c == '"' || c == '\'' {
                let kind = self.lex_string(c);
                self.push(kind, start);
            } else if c == '`' {
                let kind = match scan_template(self.src, self.pos) {
                    Some(end) => {
                        self.pos = end;
                        TokenKind::Template
                    }
                    None => {
                        self.pos = self.src.len();
                        TokenKind::Error
                    }
                };
                self.push(kind, start);
            } else if c == '/' && self.regex_allowed {
                let kind = self.lex_regex();
                self.push(kind, start);
            } else if c.is_ascii_punctuation() {
                self.lex_punct(c);
                self.push(TokenKind::Punct, start);
            } else {
                self.pos += c.len_utf8();
                self.push(TokenKind::Error, start);
            }
        }
    }

    fn skip_line(&mut self) {
        while let Some(c) = self.peek() {
            if is_newline(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn lex_number(&mut self) {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                self.pos += 1;
                if (c == 'e' || c == 'E')
                    && matches!(self.peek(), Some('+') | Some('-'))
                    && !self.src[start..].starts_with("0x")
                    && !self.src[start..].starts_with("0X")
                {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn lex_string(&mut self, quote: char) -> TokenKind {
        self.pos += 1;
        while let Some(c) = self.peek() {
            if c == quote {
                self.pos += 1;
                return TokenKind::String;
            }
            if c == '\\' {
                self.pos += 1;
                if let Some(next) = self.peek() {
                    self.pos += next.len_utf8();
                    if next == '\r' && self.peek() == Some('\n') {
                        self.pos += 1;
                    }
                }
                continue;
            }
            if is_newline(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        TokenKind::Error
    }

    fn lex_regex(&mut self) -> TokenKind {
        let start = self.pos;
        self.pos += 1;
        let mut in_class = false;
        while let Some(c) = self.peek() {
            if is_newline(c) {
                // Not a regex after all: fall back to a lone slash.
                self.pos = start;
                self.lex_punct('/');
                return TokenKind::Punct;
            }
            self.pos += c.len_utf8();
            match c {
                '\\' => {
                    if let Some(n) = self.peek() {
                        if !is_newline(n) {
                            self.pos += n.len_utf8();
                        }
                    }
                }
                '[' => in_class = true,
                ']' => in_class = false,
                '/' if !in_class => {
                    while let Some(f) = self.peek() {
                        if !is_ident_continue(f) {
                            break;
                        }
                        self.pos += f.len_utf8();
                    }
                    return TokenKind::Regex;
                }
                _ => {}
            }
        }
        self.pos = start;
        self.lex_punct('/');
        TokenKind::Punct
    }

    fn lex_punct(&mut self, c: char) {
        let rest = self.rest();
        for p in PUNCTUATORS {
            if rest.starts_with(p) {
                if *p == "?." && rest[2..].starts_with(|d: char| d.is_ascii_digit()) {
                    continue;
                }
                self.pos += p.len();
                return;
            }
        }
        self.pos += c.len_utf8();
    }
}

/// Scans a template literal starting at the backtick at `start`. Returns the
/// offset just past the closing backtick, or `None` if unterminated.
pub(crate) fn scan_template(src: &str, start: usize) -> Option<usize> {
    scan_template_parts(src, start, &mut Vec::new())
}

/// Like [`scan_template`], also collecting the byte ranges of the code inside
/// each `${ ... }` substitution.
pub(crate) fn scan_template_parts(src: &str, start: usize, subs: &mut Vec<(usize, usize)>) -> Option<usize> {
    let bytes = src.as_bytes();
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'`' => return Some(i + 1),
            b'$' if bytes.get(i + 1) == Some(&b'{') => {
                let code_start = i + 2;
                let close = scan_code_to_brace(src, code_start)?;
                subs.push((code_start, close));
                i = close + 1;
            }
            _ => i += 1,
        }
    }
    None
}

/// Finds the `}` that closes a substitution whose code begins at `start`.
fn scan_code_to_brace(src: &str, start: usize) -> Option<usize> {
    let bytes = src.as_bytes();
    let mut depth = 0usize;
    let mut i = start;
    while i < bytes.len() {
        match bytes[i] {
            b'{' => depth += 1,
            b'}' => {
                if depth == 0 {
                    return Some(i);
                }
                depth -= 1;
            }
            b'`' => {
                i = scan_template(src, i)?;
                continue;
            }
            q @ (b'"' | b'\'') => {
                i += 1;
                while i < bytes.len() && bytes[i] != q && bytes[i] != b'\n' {
                    if bytes[i] == b'\\' {
                        i += 1;
                    }
                    i += 1;
                }
            }
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'/' if bytes.get(i + 1) == Some(&b'*') => {
                let rel = src[i + 2..].find("*/")?;
                i += 2 + rel + 2;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    None
}
