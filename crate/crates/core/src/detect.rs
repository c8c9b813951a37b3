//! Cross-revision element matching and refactoring classification.
//!
//! Elements are compared as token multisets under inverse-document-frequency
//! weights. Matching first pairs elements whose qualified names are unchanged,
//! then greedily pairs the rest by descending similarity. Each match is then
//! classified by comparing names, containers and signatures; unmatched
//! functions are checked for extract/inline relationships.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{AdapterRegistry, CodeElement, ElementKind};
use crate::revision::{FileChange, PairLabel};
use crate::token::TokenBag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RefactoringKind {
    MoveFunction,
    MoveAndRenameFunction,
    MoveType,
    MoveFile,
    ExtractFunction,
    InlineFunction,
    RenameFunction,
    RenameType,
    ChangeSignature,
    /// Representable but never produced by the Go adapter.
    PullUp,
    /// Representable but never produced by the Go adapter.
    PushDown,
}

impl RefactoringKind {
    pub const ALL: [RefactoringKind; 11] = [
        RefactoringKind::MoveFunction,
        RefactoringKind::MoveAndRenameFunction,
        RefactoringKind::MoveType,
        RefactoringKind::MoveFile,
        RefactoringKind::ExtractFunction,
        RefactoringKind::InlineFunction,
        RefactoringKind::RenameFunction,
        RefactoringKind::RenameType,
        RefactoringKind::ChangeSignature,
        RefactoringKind::PullUp,
        RefactoringKind::PushDown,
    ];

    /// Human name shown in window headers.
    pub fn title(&self) -> &'static str {
        match self {
            RefactoringKind::MoveFunction => "Move Function",
            RefactoringKind::MoveAndRenameFunction => "Move and Rename Function",
            RefactoringKind::MoveType => "Move Type",
            RefactoringKind::MoveFile => "Move File",
            RefactoringKind::ExtractFunction => "Extract Function",
            RefactoringKind::InlineFunction => "Inline Function",
            RefactoringKind::RenameFunction => "Rename Function",
            RefactoringKind::RenameType => "Rename Type",
            RefactoringKind::ChangeSignature => "Change Signature",
            RefactoringKind::PullUp => "Pull Up",
            RefactoringKind::PushDown => "Push Down",
        }
    }

    pub fn is_move(&self) -> bool {
        matches!(
            self,
            RefactoringKind::MoveFunction
                | RefactoringKind::MoveAndRenameFunction
                | RefactoringKind::MoveType
        )
    }
}

impl fmt::Display for RefactoringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub tau_match: f64,
    pub tau_extract: f64,
    pub min_extract_tokens: usize,
    pub idf_smoothing: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            tau_match: 0.5,
            tau_extract: 0.6,
            min_extract_tokens: 8,
            idf_smoothing: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{0} must lie in (0, 1], got {1}")]
    Threshold(&'static str, f64),
    #[error("min_extract_tokens must be at least 1")]
    MinExtractTokens,
    #[error("idf_smoothing must be finite and non-negative, got {0}")]
    Smoothing(f64),
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("tau_match", self.tau_match),
            ("tau_extract", self.tau_extract),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(ConfigError::Threshold(name, v));
            }
        }
        if self.min_extract_tokens < 1 {
            return Err(ConfigError::MinExtractTokens);
        }
        if !(self.idf_smoothing.is_finite() && self.idf_smoothing >= 0.0) {
            return Err(ConfigError::Smoothing(self.idf_smoothing));
        }
        Ok(())
    }
}

/// Per-token weights. Tokens outside the map get `fallback`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    map: BTreeMap<String, f64>,
    fallback: f64,
}

impl Weights {
    /// Every token weighs 1.
    pub fn unit() -> Self {
        Self {
            map: BTreeMap::new(),
            fallback: 1.0,
        }
    }

    pub fn get(&self, token: &str) -> f64 {
        self.map.get(token).copied().unwrap_or(self.fallback)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            map: self
                .map
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
            fallback: self.fallback * factor,
        }
    }
}

impl FromIterator<(String, f64)> for Weights {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        Self {
            map: iter.into_iter().collect(),
            fallback: 1.0,
        }
    }
}

/// `w(t) = ln(1 + N / (df(t) + smoothing))` over a corpus of N bags.
pub fn idf_weights<'a>(corpus: impl IntoIterator<Item = &'a TokenBag>, smoothing: f64) -> Weights {
    let mut df: BTreeMap<&str, u64> = BTreeMap::new();
    let mut n = 0u64;
    for bag in corpus {
        n += 1;
        for (t, _) in bag {
            *df.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let weight = |d: u64| libm::log(1.0 + n as f64 / (d as f64 + smoothing));
    Weights {
        map: df
            .into_iter()
            .map(|(t, d)| (t.to_string(), weight(d)))
            .collect(),
        fallback: weight(1),
    }
}

/// Weighted multiset Jaccard similarity. Two empty bags are identical.
pub fn similarity(a: &TokenBag, b: &TokenBag, w: &Weights) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut ia = a.iter().peekable();
    let mut ib = b.iter().peekable();
    loop {
        let (token, ca, cb) = match (ia.peek(), ib.peek()) {
            (None, None) => break,
            (Some(&(ta, &ca)), None) => {
                ia.next();
                (ta, ca, 0)
            }
            (None, Some(&(tb, &cb))) => {
                ib.next();
                (tb, 0, cb)
            }
            (Some(&(ta, &ca)), Some(&(tb, &cb))) => match ta.cmp(tb) {
                Ordering::Less => {
                    ia.next();
                    (ta, ca, 0)
                }
                Ordering::Greater => {
                    ib.next();
                    (tb, 0, cb)
                }
                Ordering::Equal => {
                    ia.next();
                    ib.next();
                    (ta, ca, cb)
                }
            },
        };
        let wt = w.get(token);
        num += wt * f64::from(ca.min(cb));
        den += wt * f64::from(ca.max(cb));
    }
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

/// A before/after pairing, by index into the respective element lists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementMatch {
    pub before: usize,
    pub after: usize,
    pub similarity: f64,
}

fn line_distance(a: &CodeElement, b: &CodeElement) -> u32 {
    a.start_line.abs_diff(b.start_line)
}

/// Matches elements with weights computed over both lists.
pub fn match_elements(
    before: &[CodeElement],
    after: &[CodeElement],
    cfg: &DetectorConfig,
) -> Vec<ElementMatch> {
    let w = idf_weights(
        before.iter().chain(after).map(|e| &e.tokens),
        cfg.idf_smoothing,
    );
    match_with_weights(before, after, &w, cfg)
}

pub fn match_with_weights(
    before: &[CodeElement],
    after: &[CodeElement],
    w: &Weights,
    cfg: &DetectorConfig,
) -> Vec<ElementMatch> {
    let mut matches = Vec::new();
    let mut used_before = alloc::vec![false; before.len()];
    let mut used_after = alloc::vec![false; after.len()];

    let by_name: BTreeMap<(&str, ElementKind), usize> = after
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.qualified_name.as_str(), e.kind), i))
        .collect();
    for (bi, b) in before.iter().enumerate() {
        if let Some(&ai) = by_name.get(&(b.qualified_name.as_str(), b.kind)) {
            matches.push(ElementMatch {
                before: bi,
                after: ai,
                similarity: similarity(&b.tokens, &after[ai].tokens, w),
            });
            used_before[bi] = true;
            used_after[ai] = true;
        }
    }

    let mut candidates = Vec::new();
    for (bi, b) in before.iter().enumerate().filter(|(i, _)| !used_before[*i]) {
        for (ai, a) in after.iter().enumerate().filter(|(i, _)| !used_after[*i]) {
            if a.kind != b.kind {
                continue;
            }
            let s = similarity(&b.tokens, &a.tokens, w);
            if s >= cfg.tau_match {
                candidates.push((s, bi, ai));
            }
        }
    }
    candidates.sort_by(|x, y| {
        y.0.total_cmp(&x.0)
            .then_with(|| {
                line_distance(&before[x.1], &after[x.2])
                    .cmp(&line_distance(&before[y.1], &after[y.2]))
            })
            .then_with(|| before[x.1].qualified_name.cmp(&before[y.1].qualified_name))
            .then_with(|| after[x.2].qualified_name.cmp(&after[y.2].qualified_name))
            .then_with(|| (x.1, x.2).cmp(&(y.1, y.2)))
    });
    for (s, bi, ai) in candidates {
        if used_before[bi] || used_after[ai] {
            continue;
        }
        used_before[bi] = true;
        used_after[ai] = true;
        matches.push(ElementMatch {
            before: bi,
            after: ai,
            similarity: s,
        });
    }

    matches.sort_by_key(|m| (m.before, m.after));
    matches
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Anchor {
    pub file: String,
    /// First line of the element, 1-based.
    pub line: u32,
}

impl Anchor {
    pub fn of(e: &CodeElement) -> Self {
        Self {
            file: e.file_path.clone(),
            line: e.start_line,
        }
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)
    }
}

/// A classified before/after relationship.
///
/// For moves, renames and signature changes `before_element`/`after_element`
/// are the two versions of the refactored element. For extract and inline they
/// are the host function before and after, and `extracted_element` holds the
/// extracted (new) or inlined (removed) function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refactoring {
    pub id: String,
    pub kind: RefactoringKind,
    pub description: String,
    pub before_anchor: Anchor,
    pub after_anchor: Anchor,
    pub before_element: Option<CodeElement>,
    pub after_element: Option<CodeElement>,
    #[serde(default)]
    pub extracted_element: Option<CodeElement>,
    pub similarity: f64,
    pub pair_label: PairLabel,
}

fn noun(e: &CodeElement) -> &'static str {
    match e.kind {
        ElementKind::File => "file",
        ElementKind::TypeDecl => "type",
        ElementKind::Function if e.owner().is_some() => "method",
        ElementKind::Function => "function",
    }
}

fn describe(kind: RefactoringKind, b: &CodeElement, a: &CodeElement) -> String {
    let n = noun(b);
    match kind {
        RefactoringKind::MoveFunction => format!("{n} {}() moved", b.name),
        RefactoringKind::MoveAndRenameFunction => {
            format!("{n} {}() moved and renamed to {}()", b.name, a.name)
        }
        RefactoringKind::RenameFunction => format!("{n} {}() renamed to {}()", b.name, a.name),
        RefactoringKind::ChangeSignature => {
            let (sb, sa) = match (&b.signature, &a.signature) {
                (Some(sb), Some(sa)) => (sb.to_string(), sa.to_string()),
                _ => (String::new(), String::new()),
            };
            format!("{n} {}() signature changed from {sb} to {sa}", b.name)
        }
        RefactoringKind::MoveType if b.name == a.name => format!("type {} moved", b.name),
        RefactoringKind::MoveType => format!("type {} moved and renamed to {}", b.name, a.name),
        RefactoringKind::RenameType => format!("type {} renamed to {}", b.name, a.name),
        RefactoringKind::MoveFile => format!("file {} moved to {}", b.file_path, a.file_path),
        RefactoringKind::PullUp => format!("{n} {}() pulled up", b.name),
        RefactoringKind::PushDown => format!("{n} {}() pushed down", b.name),
        RefactoringKind::ExtractFunction | RefactoringKind::InlineFunction => String::new(),
    }
}

fn directory(path: &str) -> &str {
    path.rsplit_once('/').map_or("", |(d, _)| d)
}

struct TypeMove<'a> {
    before_file: &'a str,
    after_file: &'a str,
    after_name: &'a str,
}

/// Classifies matches and unmatched functions of one revision pair.
///
/// `registry` supplies the tokenizer used for block interiors when checking
/// extract/inline candidates.
pub fn classify(
    before: &[CodeElement],
    after: &[CodeElement],
    matches: &[ElementMatch],
    w: &Weights,
    cfg: &DetectorConfig,
    label: PairLabel,
    registry: &AdapterRegistry,
) -> Vec<Refactoring> {
    let mut out = Vec::new();

    let mut file_map: BTreeMap<&str, &str> = BTreeMap::new();
    let mut type_map: BTreeMap<(&str, &str), TypeMove<'_>> = BTreeMap::new();
    for m in matches {
        let (b, a) = (&before[m.before], &after[m.after]);
        match b.kind {
            ElementKind::File => {
                file_map.insert(&b.file_path, &a.file_path);
            }
            ElementKind::TypeDecl => {
                type_map.insert(
                    (directory(&b.file_path), &b.name),
                    TypeMove {
                        before_file: &b.file_path,
                        after_file: &a.file_path,
                        after_name: &a.name,
                    },
                );
            }
            ElementKind::Function => {}
        }
    }
    let map_file = |p: &str| -> String { file_map.get(p).map_or(p, |v| *v).to_string() };

    let push = |out: &mut Vec<Refactoring>, kind, b: &CodeElement, a: &CodeElement, s: f64| {
        out.push(Refactoring {
            id: String::new(),
            kind,
            description: describe(kind, b, a),
            before_anchor: Anchor::of(b),
            after_anchor: Anchor::of(a),
            before_element: Some(b.clone()),
            after_element: Some(a.clone()),
            extracted_element: None,
            similarity: s,
            pair_label: label,
        });
    };

    // matched functions that may host an extract or inline
    let mut hosts: Vec<&ElementMatch> = Vec::new();

    for m in matches {
        let (b, a) = (&before[m.before], &after[m.after]);
        let same_name = b.name == a.name;
        match b.kind {
            ElementKind::File => {
                if b.file_path != a.file_path {
                    push(&mut out, RefactoringKind::MoveFile, b, a, m.similarity);
                }
            }
            ElementKind::TypeDecl => {
                let same_container = map_file(&b.file_path) == a.file_path;
                let kind = match (same_container, same_name) {
                    (true, true) => None,
                    (true, false) => Some(RefactoringKind::RenameType),
                    (false, _) => Some(RefactoringKind::MoveType),
                };
                if let Some(k) = kind {
                    push(&mut out, k, b, a, m.similarity);
                }
            }
            ElementKind::Function => {
                let mut mapped_file = map_file(&b.file_path);
                let mut mapped_owner = b.owner().map(str::to_string);
                if let Some(owner) = b.owner() {
                    if let Some(t) = type_map.get(&(directory(&b.file_path), owner)) {
                        mapped_owner = Some(t.after_name.to_string());
                        // methods travelling with their moved type are not moves of their own
                        if t.before_file == b.file_path && t.after_file == a.file_path {
                            mapped_file = a.file_path.clone();
                        }
                    }
                }
                let same_container =
                    mapped_file == a.file_path && mapped_owner.as_deref() == a.owner();
                let kind = match (same_container, same_name) {
                    (true, true) => {
                        let differs = match (&b.signature, &a.signature) {
                            (Some(sb), Some(sa)) => sb.shape_differs(sa),
                            _ => false,
                        };
                        differs.then_some(RefactoringKind::ChangeSignature)
                    }
                    (true, false) => Some(RefactoringKind::RenameFunction),
                    (false, true) => Some(RefactoringKind::MoveFunction),
                    (false, false) => Some(RefactoringKind::MoveAndRenameFunction),
                };
                if let Some(k) = kind {
                    push(&mut out, k, b, a, m.similarity);
                }
                if !kind.is_some_and(|k| k.is_move()) {
                    hosts.push(m);
                }
            }
        }
    }

    let matched_before: BTreeSet<usize> = matches.iter().map(|m| m.before).collect();
    let matched_after: BTreeSet<usize> = matches.iter().map(|m| m.after).collect();
    let block_tokens = |e: &CodeElement| -> TokenBag {
        match registry.for_path(&e.file_path) {
            Some(adapter) => adapter.tokenize(e.block_text()),
            None => e.tokens.clone(),
        }
    };

    // Extract: a new function whose body reproduces what a host lost, called by the host.
    for (fi, f) in after.iter().enumerate() {
        if f.kind != ElementKind::Function
            || matched_after.contains(&fi)
            || f.tokens.total() < cfg.min_extract_tokens as u64
        {
            continue;
        }
        let inner = block_tokens(f);
        let best = best_host(&hosts, before, after, cfg, |hb, ha| {
            (ha.tokens.get(&f.name) > hb.tokens.get(&f.name)).then(|| {
                (
                    similarity(&inner, &hb.tokens.difference(&ha.tokens), w),
                    line_distance(ha, f),
                )
            })
        });
        if let Some((m, s)) = best {
            let (hb, ha) = (&before[m.before], &after[m.after]);
            out.push(Refactoring {
                id: String::new(),
                kind: RefactoringKind::ExtractFunction,
                description: format!("{} {}() extracted from {}()", noun(f), f.name, hb.name),
                before_anchor: Anchor::of(hb),
                after_anchor: Anchor::of(f),
                before_element: Some(hb.clone()),
                after_element: Some(ha.clone()),
                extracted_element: Some(f.clone()),
                similarity: s,
                pair_label: label,
            });
        }
    }

    // Inline: a removed function whose body reappears in a host that used to call it.
    for (gi, g) in before.iter().enumerate() {
        if g.kind != ElementKind::Function
            || matched_before.contains(&gi)
            || g.tokens.total() < cfg.min_extract_tokens as u64
        {
            continue;
        }
        let inner = block_tokens(g);
        let best = best_host(&hosts, before, after, cfg, |hb, ha| {
            (hb.tokens.get(&g.name) > ha.tokens.get(&g.name)).then(|| {
                (
                    similarity(&inner, &ha.tokens.difference(&hb.tokens), w),
                    line_distance(hb, g),
                )
            })
        });
        if let Some((m, s)) = best {
            let (hb, ha) = (&before[m.before], &after[m.after]);
            out.push(Refactoring {
                id: String::new(),
                kind: RefactoringKind::InlineFunction,
                description: format!("{} {}() inlined into {}()", noun(g), g.name, ha.name),
                before_anchor: Anchor::of(g),
                after_anchor: Anchor::of(ha),
                before_element: Some(hb.clone()),
                after_element: Some(ha.clone()),
                extracted_element: Some(g.clone()),
                similarity: s,
                pair_label: label,
            });
        }
    }

    out.sort_by(|x, y| {
        x.after_anchor
            .cmp(&y.after_anchor)
            .then(x.kind.cmp(&y.kind))
            .then_with(|| x.before_anchor.cmp(&y.before_anchor))
            .then_with(|| x.description.cmp(&y.description))
    });
    let slug = label.slug();
    for (i, r) in out.iter_mut().enumerate() {
        r.id = format!("{slug}-{}", i + 1);
    }
    out
}

/// Picks the host with the highest score at or above `tau_extract`.
/// `score` returns `(similarity, line distance)` or `None` when the host does not qualify.
fn best_host<'m>(
    hosts: &[&'m ElementMatch],
    before: &[CodeElement],
    after: &[CodeElement],
    cfg: &DetectorConfig,
    score: impl Fn(&CodeElement, &CodeElement) -> Option<(f64, u32)>,
) -> Option<(&'m ElementMatch, f64)> {
    let mut best: Option<(&ElementMatch, f64, u32)> = None;
    for &m in hosts {
        let (hb, ha) = (&before[m.before], &after[m.after]);
        let Some((s, d)) = score(hb, ha) else {
            continue;
        };
        if s < cfg.tau_extract {
            continue;
        }
        let better = match best {
            None => true,
            Some((bm, bs, bd)) => match s.total_cmp(&bs) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => {
                    (d, &hb.qualified_name) < (bd, &before[bm.before].qualified_name)
                }
            },
        };
        if better {
            best = Some((m, s, d));
        }
    }
    best.map(|(m, s, _)| (m, s))
}

/// Parses both sides of every text file change that some adapter claims.
pub fn parse_changes(
    changes: &[FileChange],
    registry: &AdapterRegistry,
) -> (Vec<CodeElement>, Vec<CodeElement>) {
    let mut before = Vec::new();
    let mut after = Vec::new();
    for c in changes.iter().filter(|c| !c.binary) {
        if let (Some(path), Some(text)) = (&c.path_before, &c.content_before) {
            if let Some(adapter) = registry.for_path(path) {
                before.extend(adapter.parse(path, text));
            }
        }
        if let (Some(path), Some(text)) = (&c.path_after, &c.content_after) {
            if let Some(adapter) = registry.for_path(path) {
                after.extend(adapter.parse(path, text));
            }
        }
    }
    (before, after)
}

/// Runs parse, match and classify over the file changes of one pair.
pub fn detect_changes(
    changes: &[FileChange],
    label: PairLabel,
    registry: &AdapterRegistry,
    cfg: &DetectorConfig,
) -> Vec<Refactoring> {
    let (before, after) = parse_changes(changes, registry);
    let w = idf_weights(
        before.iter().chain(&after).map(|e| &e.tokens),
        cfg.idf_smoothing,
    );
    let matches = match_with_weights(&before, &after, &w, cfg);
    classify(&before, &after, &matches, &w, cfg, label, registry)
}
