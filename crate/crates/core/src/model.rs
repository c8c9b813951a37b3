//! Code-structure model shared by all language adapters.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::token::TokenBag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ElementKind {
    File,
    TypeDecl,
    Function,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameter {
    /// Empty for unnamed parameters.
    pub name: String,
    pub type_text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    /// Receiver type text for methods (`*Server`), absent for plain functions.
    pub receiver_or_owner: Option<String>,
    pub parameters: Vec<Parameter>,
    pub results: Vec<String>,
}

impl Signature {
    /// Receiver type stripped of pointer and type arguments (`*Box[T]` -> `Box`).
    pub fn owner_type(&self) -> Option<&str> {
        let recv = self.receiver_or_owner.as_deref()?;
        let recv = recv.trim_start_matches('*').trim();
        Some(recv.split('[').next().unwrap_or(recv).trim())
    }

    pub fn parameter_types(&self) -> impl Iterator<Item = &str> {
        self.parameters.iter().map(|p| p.type_text.as_str())
    }

    /// True when parameter types or result types differ; names and receivers are ignored.
    pub fn shape_differs(&self, other: &Signature) -> bool {
        !self.parameter_types().eq(other.parameter_types()) || self.results != other.results
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.parameters.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if p.name.is_empty() {
                f.write_str(&p.type_text)?;
            } else {
                write!(f, "{} {}", p.name, p.type_text)?;
            }
        }
        f.write_str(")")?;
        match self.results.len() {
            0 => Ok(()),
            1 => write!(f, " {}", self.results[0]),
            _ => {
                f.write_str(" (")?;
                for (i, r) in self.results.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(r)?;
                }
                f.write_str(")")
            }
        }
    }
}

/// One node of the code-structure model: a file, a type declaration or a function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeElement {
    pub kind: ElementKind,
    pub name: String,
    /// `<path>::<owner>::<name>(<param types>)`; unique within one revision.
    pub qualified_name: String,
    /// Qualified name of the enclosing element; `None` for files.
    pub container: Option<String>,
    pub file_path: String,
    /// 1-based, inclusive.
    pub start_line: u32,
    pub end_line: u32,
    pub signature: Option<Signature>,
    /// Verbatim source lines `start_line..=end_line`, terminators included.
    pub body_text: String,
    pub tokens: TokenBag,
    /// Byte range of the block interior (between the outer braces) within `body_text`.
    #[serde(default)]
    pub block: Option<(usize, usize)>,
}

impl CodeElement {
    /// Name of the owning type for methods, `None` for everything else.
    pub fn owner(&self) -> Option<&str> {
        self.signature.as_ref().and_then(Signature::owner_type)
    }

    /// Text between the outer braces, or the whole body when there is no block.
    pub fn block_text(&self) -> &str {
        match self.block {
            Some((s, e)) if s <= e && e <= self.body_text.len() => &self.body_text[s..e],
            _ => &self.body_text,
        }
    }

    /// Zero-based indices (into the body's lines) of lines lying strictly inside the block.
    pub fn inner_line_range(&self) -> core::ops::Range<usize> {
        let Some((open, close)) = self.block else {
            return 0..0;
        };
        let mut offset = 0;
        let mut first = None;
        let mut last = 0;
        for (i, line) in self.body_text.split_inclusive('\n').enumerate() {
            let end = offset + line.len();
            if offset >= open && first.is_none() {
                first = Some(i);
            }
            if end <= close {
                last = i + 1;
            }
            offset = end;
        }
        match first {
            Some(f) if f < last => f..last,
            _ => 0..0,
        }
    }

    /// Display form used in descriptions, e.g. `Calc.Sum(int,int)`.
    pub fn display_name(&self) -> String {
        let mut s = String::new();
        if let Some(owner) = self.owner() {
            s.push_str(owner);
            s.push('.');
        }
        s.push_str(&self.name);
        if let Some(sig) = &self.signature {
            s.push('(');
            for (i, t) in sig.parameter_types().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(t);
            }
            s.push(')');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("no adapter claims `{0}`")]
    AdapterMismatch(String),
    #[error("element `{0}` is not a function")]
    KindMismatch(String),
}

/// Maps one source language onto the code-structure model.
pub trait LanguageAdapter: Sync + Send {
    fn name(&self) -> &'static str;

    fn claims(&self, path: &str) -> bool;

    /// Total parse: malformed regions are skipped, never reported as errors.
    fn parse(&self, path: &str, text: &str) -> Vec<CodeElement>;

    fn tokenize(&self, text: &str) -> TokenBag;

    fn signature_of(&self, element: &CodeElement) -> Result<Signature, ModelError> {
        signature_of(element)
    }
}

pub fn parse_source(
    path: &str,
    text: &str,
    adapter: &dyn LanguageAdapter,
) -> Result<Vec<CodeElement>, ModelError> {
    if !adapter.claims(path) {
        return Err(ModelError::AdapterMismatch(path.into()));
    }
    Ok(adapter.parse(path, text))
}

pub fn signature_of(element: &CodeElement) -> Result<Signature, ModelError> {
    match (&element.kind, &element.signature) {
        (ElementKind::Function, Some(sig)) => Ok(sig.clone()),
        _ => Err(ModelError::KindMismatch(element.qualified_name.clone())),
    }
}

/// Adapters keyed by the files they claim; first claimant wins.
pub struct AdapterRegistry {
    adapters: Vec<&'static dyn LanguageAdapter>,
}

impl AdapterRegistry {
    pub fn empty() -> Self {
        Self {
            adapters: Vec::new(),
        }
    }

    pub fn register(&mut self, adapter: &'static dyn LanguageAdapter) {
        self.adapters.push(adapter);
    }

    pub fn for_path(&self, path: &str) -> Option<&'static dyn LanguageAdapter> {
        self.adapters.iter().copied().find(|a| a.claims(path))
    }
}

impl Default for AdapterRegistry {
    /// Registry with every shipped adapter.
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(&crate::golang::GoAdapter);
        r
    }
}

/// Splits text into lines, keeping terminators. Empty text has no lines.
pub fn lines(text: &str) -> impl Iterator<Item = &str> {
    text.split_inclusive('\n')
}

/// Number of lines as displayed by an editor; an empty text still has one line.
pub fn line_count(text: &str) -> u32 {
    (lines(text).count() as u32).max(1)
}

/// Verbatim slice of lines `start..=end` (1-based).
pub fn slice_lines(text: &str, start: u32, end: u32) -> &str {
    let mut offset = 0;
    let mut from = None;
    let mut to = text.len();
    for (i, line) in lines(text).enumerate() {
        let n = i as u32 + 1;
        if n == start {
            from = Some(offset);
        }
        offset += line.len();
        if n == end {
            to = offset;
            break;
        }
    }
    match from {
        Some(f) => &text[f..to],
        None => "",
    }
}
