//! Single-line signatures for entity records.

use crate::syntax::{ExportFlags, Span, TypeAnnotation, VarKind};

/// Joins whitespace runs (including newlines) into single spaces.
pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Header text of a function, method, class, interface, alias or enum.
pub fn header_signature(source: &str, header: Span) -> String {
    collapse_whitespace(header.slice(source))
}

fn export_prefix(export: ExportFlags) -> &'static str {
    match (export.is_exported, export.is_default) {
        (true, true) => "export default ",
        (true, false) => "export ",
        _ => "",
    }
}

/// `[export ][declare ]const name[: T]`.
pub fn variable_signature(
    source: &str,
    export: ExportFlags,
    is_declare: bool,
    kind: VarKind,
    name: &str,
    type_ann: Option<&TypeAnnotation>,
) -> String {
    let mut out = String::from(export_prefix(export));
    if is_declare {
        out.push_str("declare ");
    }
    out.push_str(kind.as_str());
    out.push(' ');
    out.push_str(name);
    if let Some(t) = type_ann {
        out.push_str(": ");
        out.push_str(&collapse_whitespace(t.span.slice(source)));
    }
    out
}

/// Signature of a function bound to a variable: the declaration text up to
/// the function body, without the arrow.
pub fn bound_function_signature(source: &str, prefix: &str, declarator_start: usize, body_start: usize) -> String {
    let head = source[declarator_start..body_start].trim_end();
    let head = head.strip_suffix("=>").unwrap_or(head);
    collapse_whitespace(&format!("{prefix}{head}"))
}

/// Signature for `export default <expression>`.
pub fn default_expression_signature() -> String {
    "export default".to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::LineIndex;

    #[test]
    fn collapses_multiline_headers() {
        let src = "export function f(\n  a: string,\n    b: number\n): void";
        let span = LineIndex::new(src).span(0, src.len());
        assert_eq!(
            header_signature(src, span),
            "export function f( a: string, b: number ): void"
        );
    }

    #[test]
    fn variables() {
        let src = "x";
        assert_eq!(
            variable_signature(src, ExportFlags::default(), false, VarKind::Const, "x", None),
            "const x"
        );
    }

    #[test]
    fn bound_functions_drop_the_arrow() {
        let src = "export const f = (x: T): R => x;";
        let body = src.rfind("x;").unwrap();
        assert_eq!(bound_function_signature(src, "", 0, body), "export const f = (x: T): R");
    }
}
