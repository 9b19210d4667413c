//! Lexing and parsing of TypeScript source files.

pub mod ast;
pub mod lexer;
mod parser;
pub mod span;
pub mod visit;

pub use ast::*;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse_file;
pub use span::{LineIndex, Span};
