//! Go language adapter: a declaration-level scanner over a small lexer.
//!
//! Only top-level `func` and `type` declarations become elements. Function
//! literals, methods declared inside other blocks, and everything in `var`,
//! `const` or `import` blocks are tokens of whatever encloses them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::model::{
    line_count, slice_lines, CodeElement, ElementKind, LanguageAdapter, Parameter, Signature,
};
use crate::token::TokenBag;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Str,
    Punct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    /// Byte offsets into the lexed text.
    pub start: usize,
    pub end: usize,
    /// 1-based line of the first byte.
    pub line: u32,
}

const OPERATORS: [&str; 25] = [
    "<<=", ">>=", "&^=", "...", "&&", "||", "<-", "++", "--", "==", "!=", "<=", ">=", ":=", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "&^",
];

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

/// Lexes Go source. Whitespace and comments are dropped; string, rune and raw
/// string literals are single tokens including their quotes. Never fails.
pub fn lex(text: &str) -> Vec<Token<'_>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    let mut line = 1u32;

    while pos < text.len() {
        let c = text[pos..].chars().next().unwrap_or('\0');
        let start = pos;
        let start_line = line;

        if c == '\n' {
            line += 1;
            pos += 1;
            continue;
        }
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        if text[pos..].starts_with("//") {
            pos = text[pos..].find('\n').map_or(text.len(), |i| pos + i);
            continue;
        }
        if text[pos..].starts_with("/*") {
            let end = text[pos + 2..]
                .find("*/")
                .map_or(text.len(), |i| pos + 2 + i + 2);
            line += text[pos..end].matches('\n').count() as u32;
            pos = end;
            continue;
        }

        let kind;
        if is_ident_start(c) {
            pos += c.len_utf8();
            while let Some(n) = text[pos..].chars().next() {
                if !is_ident_continue(n) {
                    break;
                }
                pos += n.len_utf8();
            }
            kind = TokenKind::Ident;
        } else if c.is_ascii_digit()
            || (c == '.' && bytes.get(pos + 1).is_some_and(u8::is_ascii_digit))
        {
            let hex = text[pos..].starts_with("0x") || text[pos..].starts_with("0X");
            pos += 1;
            while pos < bytes.len() {
                let b = bytes[pos];
                let prev = bytes[pos - 1];
                let exponent_sign = (b == b'+' || b == b'-')
                    && (matches!(prev, b'p' | b'P') || (!hex && matches!(prev, b'e' | b'E')));
                if b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || exponent_sign {
                    pos += 1;
                } else {
                    break;
                }
            }
            kind = TokenKind::Number;
        } else if c == '"' || c == '\'' {
            pos += 1;
            while pos < bytes.len() {
                match bytes[pos] {
                    b'\\' => pos = (pos + 2).min(bytes.len()),
                    b'\n' => break,
                    b if b == c as u8 => {
                        pos += 1;
                        break;
                    }
                    _ => pos += 1,
                }
            }
            // an escape may have stepped into a multibyte char
            while !text.is_char_boundary(pos) {
                pos += 1;
            }
            kind = TokenKind::Str;
        } else if c == '`' {
            pos = text[pos + 1..]
                .find('`')
                .map_or(text.len(), |i| pos + 1 + i + 1);
            line += text[start..pos].matches('\n').count() as u32;
            kind = TokenKind::Str;
        } else {
            let op = OPERATORS.iter().find(|op| text[pos..].starts_with(*op));
            pos += op.map_or(c.len_utf8(), |op| op.len());
            kind = TokenKind::Punct;
        }

        out.push(Token {
            kind,
            text: &text[start..pos],
            start,
            end: pos,
            line: start_line,
        });
    }
    out
}

/// The shipped adapter for `.go` files.
#[derive(Debug, Clone, Copy, Default)]
pub struct GoAdapter;

impl LanguageAdapter for GoAdapter {
    fn name(&self) -> &'static str {
        "go"
    }

    fn claims(&self, path: &str) -> bool {
        path.ends_with(".go")
    }

    fn parse(&self, path: &str, text: &str) -> Vec<CodeElement> {
        Scanner::new(path, text).run()
    }

    fn tokenize(&self, text: &str) -> TokenBag {
        tokenize(text)
    }
}

pub fn tokenize(text: &str) -> TokenBag {
    lex(text).iter().map(|t| t.text).collect()
}

fn closing(open: &str) -> Option<&'static str> {
    match open {
        "(" => Some(")"),
        "[" => Some("]"),
        "{" => Some("}"),
        _ => None,
    }
}

struct Scanner<'a> {
    path: &'a str,
    text: &'a str,
    toks: Vec<Token<'a>>,
    seen: BTreeMap<String, u32>,
}

impl<'a> Scanner<'a> {
    fn new(path: &'a str, text: &'a str) -> Self {
        Self {
            path,
            text,
            toks: lex(text),
            seen: BTreeMap::new(),
        }
    }

    fn run(mut self) -> Vec<CodeElement> {
        let mut out = Vec::new();
        out.push(CodeElement {
            kind: ElementKind::File,
            name: self
                .path
                .rsplit('/')
                .next()
                .unwrap_or(self.path)
                .to_string(),
            qualified_name: self.path.to_string(),
            container: None,
            file_path: self.path.to_string(),
            start_line: 1,
            end_line: line_count(self.text),
            signature: None,
            body_text: self.text.to_string(),
            tokens: tokenize(self.text),
            block: None,
        });

        let mut depth = 0usize;
        let mut i = 0;
        while i < self.toks.len() {
            let t = self.toks[i];
            if depth == 0 && t.kind == TokenKind::Ident && self.starts_line(i) {
                if t.text == "func" {
                    if let Some((el, next)) = self.func_decl(i) {
                        out.push(el);
                        i = next;
                        continue;
                    }
                } else if t.text == "type" {
                    if let Some((els, next)) = self.type_decl(i) {
                        out.extend(els);
                        i = next;
                        continue;
                    }
                }
            }
            match t.text {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                _ => {}
            }
            i += 1;
        }

        out.sort_by_key(|e| (e.start_line, e.kind));
        out
    }

    fn starts_line(&self, i: usize) -> bool {
        i == 0 || self.toks[i - 1].line < self.toks[i].line
    }

    fn text_is(&self, i: usize, s: &str) -> bool {
        self.toks
            .get(i)
            .is_some_and(|t| t.text == s && t.kind == TokenKind::Punct)
    }

    /// Index of the bracket closing the one at `open`, counting all bracket kinds.
    fn matching(&self, open: usize) -> Option<usize> {
        let close = closing(self.toks.get(open)?.text)?;
        let mut stack = Vec::new();
        stack.push(close);
        for (j, t) in self.toks.iter().enumerate().skip(open + 1) {
            if t.kind != TokenKind::Punct {
                continue;
            }
            if let Some(c) = closing(t.text) {
                stack.push(c);
            } else if matches!(t.text, ")" | "]" | "}") {
                if stack.pop() != Some(t.text) {
                    return None;
                }
                if stack.is_empty() {
                    return Some(j);
                }
            }
        }
        None
    }

    /// Token texts re-joined with single spaces wherever the source had a gap.
    fn normalized(&self, range: core::ops::Range<usize>) -> String {
        let mut s = String::new();
        for j in range.clone() {
            let t = &self.toks[j];
            if j > range.start && self.toks[j - 1].end < t.start {
                s.push(' ');
            }
            s.push_str(t.text);
        }
        s
    }

    fn unique(&mut self, qualified: String) -> String {
        let n = self.seen.entry(qualified.clone()).or_insert(0);
        *n += 1;
        if *n == 1 {
            qualified
        } else {
            format!("{qualified}#{n}")
        }
    }

    fn line_start_offset(&self, line: u32) -> usize {
        let mut offset = 0;
        for _ in 1..line {
            match self.text[offset..].find('\n') {
                Some(p) => offset += p + 1,
                None => break,
            }
        }
        offset
    }

    #[allow(clippy::too_many_arguments)]
    fn element(
        &mut self,
        kind: ElementKind,
        name: &str,
        qualified: String,
        start_line: u32,
        end_line: u32,
        signature: Option<Signature>,
        block: Option<(usize, usize)>,
    ) -> CodeElement {
        let body = slice_lines(self.text, start_line, end_line);
        let base = self.line_start_offset(start_line);
        CodeElement {
            kind,
            name: name.to_string(),
            qualified_name: self.unique(qualified),
            container: Some(self.path.to_string()),
            file_path: self.path.to_string(),
            start_line,
            end_line,
            signature,
            body_text: body.to_string(),
            tokens: tokenize(body),
            block: block.map(|(s, e)| (s - base, e - base)),
        }
    }

    fn func_decl(&mut self, at: usize) -> Option<(CodeElement, usize)> {
        let mut j = at + 1;
        let mut receiver = None;
        if self.text_is(j, "(") {
            let close = self.matching(j)?;
            let params = self.parameters(j + 1, close);
            receiver = Some(
                params
                    .first()
                    .map(|p| p.type_text.clone())
                    .unwrap_or_default(),
            );
            j = close + 1;
        }
        let name_tok = *self.toks.get(j).filter(|t| t.kind == TokenKind::Ident)?;
        j += 1;
        if self.text_is(j, "[") {
            j = self.matching(j)? + 1;
        }
        if !self.text_is(j, "(") {
            return None;
        }
        let params_close = self.matching(j)?;
        let parameters = self.parameters(j + 1, params_close);
        j = params_close + 1;

        let mut results = Vec::new();
        if self.text_is(j, "(") && self.toks[j].line == self.toks[params_close].line {
            let close = self.matching(j)?;
            results = self
                .parameters(j + 1, close)
                .into_iter()
                .map(|p| p.type_text)
                .collect();
            j = close + 1;
        } else {
            let result_start = j;
            let mut last_line = self.toks[params_close].line;
            while let Some(t) = self.toks.get(j) {
                if t.line > last_line || self.text_is(j, "{") || self.text_is(j, ";") {
                    break;
                }
                if matches!(t.text, "struct" | "interface") && self.text_is(j + 1, "{") {
                    j = self.matching(j + 1)? + 1;
                } else if matches!(t.text, "(" | "[") && t.kind == TokenKind::Punct {
                    j = self.matching(j)? + 1;
                } else {
                    j += 1;
                }
                last_line = self.toks[j - 1].line;
            }
            if j > result_start {
                results.push(self.normalized(result_start..j));
            }
        }

        let (end_line, block, next) = if self.text_is(j, "{") {
            let close = self.matching(j)?;
            let block = (self.toks[j].end, self.toks[close].start);
            (self.toks[close].line, Some(block), close + 1)
        } else {
            (self.toks[j - 1].line, None, j)
        };

        let signature = Signature {
            receiver_or_owner: receiver,
            parameters,
            results,
        };
        let name = name_tok.text;
        let mut qualified = String::from(self.path);
        qualified.push_str("::");
        if let Some(owner) = signature.owner_type() {
            qualified.push_str(owner);
            qualified.push_str("::");
        }
        qualified.push_str(name);
        qualified.push('(');
        for (k, t) in signature.parameter_types().enumerate() {
            if k > 0 {
                qualified.push(',');
            }
            qualified.push_str(t);
        }
        qualified.push(')');

        let start_line = self.toks[at].line;
        let el = self.element(
            ElementKind::Function,
            name,
            qualified,
            start_line,
            end_line,
            Some(signature),
            block,
        );
        Some((el, next))
    }

    fn type_decl(&mut self, at: usize) -> Option<(Vec<CodeElement>, usize)> {
        if self.text_is(at + 1, "(") {
            let close = self.matching(at + 1)?;
            let mut els = Vec::new();
            let mut j = at + 2;
            while j < close {
                if self.text_is(j, ";") {
                    j += 1;
                    continue;
                }
                let start_line = self.toks[j].line;
                let (el, next) = self.type_spec(j, close, start_line)?;
                els.push(el);
                j = next.max(j + 1);
            }
            Some((els, close + 1))
        } else {
            let start_line = self.toks[at].line;
            let (el, next) = self.type_spec(at + 1, self.toks.len(), start_line)?;
            Some((alloc::vec![el], next))
        }
    }

    /// One `Name Type` spec ending at a line break, `;` or `limit`.
    fn type_spec(
        &mut self,
        at: usize,
        limit: usize,
        start_line: u32,
    ) -> Option<(CodeElement, usize)> {
        let name_tok = *self.toks.get(at).filter(|t| t.kind == TokenKind::Ident)?;
        let mut j = at + 1;
        let mut last_line = name_tok.line;
        while j < limit {
            let t = self.toks[j];
            if t.line > last_line || self.text_is(j, ";") {
                break;
            }
            if t.kind == TokenKind::Punct && closing(t.text).is_some() {
                let close = self.matching(j)?;
                if close > limit {
                    return None;
                }
                j = close + 1;
            } else if t.kind == TokenKind::Punct && matches!(t.text, ")" | "]" | "}") {
                break;
            } else {
                j += 1;
            }
            last_line = self.toks[j - 1].line;
        }
        if j == at + 1 {
            return None;
        }
        let end_line = self.toks[j - 1].line;
        let qualified = format!("{}::{}", self.path, name_tok.text);
        let el = self.element(
            ElementKind::TypeDecl,
            name_tok.text,
            qualified,
            start_line,
            end_line,
            None,
            None,
        );
        Some((el, j))
    }

    /// Parses a Go parameter list between `from` (inclusive) and `to` (exclusive).
    fn parameters(&self, from: usize, to: usize) -> Vec<Parameter> {
        let mut parts: Vec<core::ops::Range<usize>> = Vec::new();
        let mut depth = 0usize;
        let mut start = from;
        for j in from..to {
            let t = &self.toks[j];
            if t.kind != TokenKind::Punct {
                continue;
            }
            match t.text {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                "," if depth == 0 => {
                    parts.push(start..j);
                    start = j + 1;
                }
                _ => {}
            }
        }
        parts.push(start..to);
        parts.retain(|r| !r.is_empty());

        let is_named = |r: &core::ops::Range<usize>| {
            let first = &self.toks[r.start];
            first.kind == TokenKind::Ident
                && !matches!(first.text, "func" | "chan" | "map" | "struct" | "interface")
                && r.len() >= 2
                && self.toks[r.start + 1].text != "."
        };

        if !parts.iter().any(is_named) {
            return parts
                .into_iter()
                .map(|r| Parameter {
                    name: String::new(),
                    type_text: self.normalized(r),
                })
                .collect();
        }

        let mut params: Vec<Parameter> = Vec::with_capacity(parts.len());
        let mut pending_type = String::new();
        for r in parts.iter().rev() {
            if is_named(r) {
                pending_type = self.normalized(r.start + 1..r.end);
                params.push(Parameter {
                    name: self.toks[r.start].text.to_string(),
                    type_text: pending_type.clone(),
                });
            } else {
                params.push(Parameter {
                    name: self.normalized(r.clone()),
                    type_text: pending_type.clone(),
                });
            }
        }
        params.reverse();
        params
    }
}
