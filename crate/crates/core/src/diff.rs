//! Line diffs: a linear-space Myers edit script grouped into zero-context hunks.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Range};

use serde::{Deserialize, Serialize};

use crate::model::lines;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditOp {
    /// Indices into the before and after sequences.
    Equal(usize, usize),
    Delete(usize),
    Insert(usize),
}

/// Furthest-reaching x per diagonal, indexed by signed diagonal number.
struct V {
    offset: isize,
    v: Vec<usize>,
}

impl V {
    fn new(max_d: usize) -> Self {
        Self {
            offset: max_d as isize + 1,
            v: vec![0; 2 * max_d + 3],
        }
    }
}

impl Index<isize> for V {
    type Output = usize;

    fn index(&self, k: isize) -> &usize {
        &self.v[(k + self.offset) as usize]
    }
}

impl IndexMut<isize> for V {
    fn index_mut(&mut self, k: isize) -> &mut usize {
        &mut self.v[(k + self.offset) as usize]
    }
}

fn max_d(n: usize, m: usize) -> usize {
    (n + m).div_ceil(2) + 1
}

/// Start of a middle snake on an optimal path through `a[ar] x b[br]`.
fn middle_snake<T: PartialEq>(
    a: &[T],
    ar: Range<usize>,
    b: &[T],
    br: Range<usize>,
    vf: &mut V,
    vb: &mut V,
) -> Option<(usize, usize)> {
    let n = ar.len();
    let m = br.len();
    let delta = n as isize - m as isize;
    let odd = delta & 1 == 1;
    vf[1] = 0;
    vb[1] = 0;

    for d in 0..max_d(n, m) as isize {
        let mut k = d;
        while k >= -d {
            let mut x = if k == -d || (k != d && vf[k - 1] < vf[k + 1]) {
                vf[k + 1]
            } else {
                vf[k - 1] + 1
            };
            let mut y = (x as isize - k) as usize;
            let (x0, y0) = (x, y);
            while x < n && y < m && a[ar.start + x] == b[br.start + y] {
                x += 1;
                y += 1;
            }
            vf[k] = x;
            if odd && (k - delta).abs() < d && vf[k] + vb[-(k - delta)] >= n {
                return Some((ar.start + x0, br.start + y0));
            }
            k -= 2;
        }

        let mut k = d;
        while k >= -d {
            let mut x = if k == -d || (k != d && vb[k - 1] < vb[k + 1]) {
                vb[k + 1]
            } else {
                vb[k - 1] + 1
            };
            let mut y = (x as isize - k) as usize;
            while x < n && y < m && a[ar.end - x - 1] == b[br.end - y - 1] {
                x += 1;
                y += 1;
            }
            vb[k] = x;
            if !odd && (k - delta).abs() <= d && vb[k] + vf[-(k - delta)] >= n {
                return Some((ar.start + n - x, br.start + m - y));
            }
            k -= 2;
        }
    }
    None
}

fn conquer<T: PartialEq>(
    a: &[T],
    mut ar: Range<usize>,
    b: &[T],
    mut br: Range<usize>,
    vf: &mut V,
    vb: &mut V,
    out: &mut Vec<EditOp>,
) {
    while !ar.is_empty() && !br.is_empty() && a[ar.start] == b[br.start] {
        out.push(EditOp::Equal(ar.start, br.start));
        ar.start += 1;
        br.start += 1;
    }
    let mut suffix = 0;
    while !ar.is_empty() && !br.is_empty() && a[ar.end - 1] == b[br.end - 1] {
        ar.end -= 1;
        br.end -= 1;
        suffix += 1;
    }

    if ar.is_empty() {
        out.extend(br.clone().map(EditOp::Insert));
    } else if br.is_empty() {
        out.extend(ar.clone().map(EditOp::Delete));
    } else if let Some((x, y)) = middle_snake(a, ar.clone(), b, br.clone(), vf, vb) {
        conquer(a, ar.start..x, b, br.start..y, vf, vb, out);
        conquer(a, x..ar.end, b, y..br.end, vf, vb, out);
    } else {
        out.extend(ar.clone().map(EditOp::Delete));
        out.extend(br.clone().map(EditOp::Insert));
    }

    out.extend((0..suffix).map(|i| EditOp::Equal(ar.end + i, br.end + i)));
}

/// Minimal edit script turning `a` into `b`.
///
/// Within every run of changes the deletions are listed before the insertions.
pub fn edit_script<T: PartialEq>(a: &[T], b: &[T]) -> Vec<EditOp> {
    let d = max_d(a.len(), b.len());
    let mut vf = V::new(d);
    let mut vb = V::new(d);
    let mut raw = Vec::with_capacity(a.len().max(b.len()));
    conquer(a, 0..a.len(), b, 0..b.len(), &mut vf, &mut vb, &mut raw);

    let mut out = Vec::with_capacity(raw.len());
    let mut i = 0;
    while i < raw.len() {
        if let EditOp::Equal(..) = raw[i] {
            out.push(raw[i]);
            i += 1;
            continue;
        }
        let end = raw[i..]
            .iter()
            .position(|op| matches!(op, EditOp::Equal(..)))
            .map_or(raw.len(), |p| i + p);
        out.extend(
            raw[i..end]
                .iter()
                .filter(|op| matches!(op, EditOp::Delete(_))),
        );
        out.extend(
            raw[i..end]
                .iter()
                .filter(|op| matches!(op, EditOp::Insert(_))),
        );
        i = end;
    }
    out
}

/// A contiguous run of deleted and added lines, with no context.
///
/// Starts are 1-based line numbers. A side with length zero uses the
/// unified-diff convention: its start is the number of lines preceding the hunk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hunk {
    pub before_start: u32,
    pub before_len: u32,
    pub after_start: u32,
    pub after_len: u32,
    pub deleted_lines: Vec<String>,
    pub added_lines: Vec<String>,
}

impl Hunk {
    /// Inclusive before-side line range, `None` for pure insertions.
    pub fn before_span(&self) -> Option<(u32, u32)> {
        (self.before_len > 0).then(|| (self.before_start, self.before_start + self.before_len - 1))
    }

    pub fn after_span(&self) -> Option<(u32, u32)> {
        (self.after_len > 0).then(|| (self.after_start, self.after_start + self.after_len - 1))
    }
}

/// Groups an edit script over `a`/`b` into hunks.
pub fn hunks<S: AsRef<str>>(ops: &[EditOp], a: &[S], b: &[S]) -> Vec<Hunk> {
    let mut out = Vec::new();
    let mut i = 0;
    // lines consumed so far on each side
    let (mut pa, mut pb) = (0usize, 0usize);
    while i < ops.len() {
        match ops[i] {
            EditOp::Equal(x, y) => {
                pa = x + 1;
                pb = y + 1;
                i += 1;
            }
            _ => {
                let mut h = Hunk {
                    before_start: 0,
                    before_len: 0,
                    after_start: 0,
                    after_len: 0,
                    deleted_lines: Vec::new(),
                    added_lines: Vec::new(),
                };
                while let Some(op) = ops.get(i) {
                    match *op {
                        EditOp::Delete(x) => h.deleted_lines.push(a[x].as_ref().into()),
                        EditOp::Insert(y) => h.added_lines.push(b[y].as_ref().into()),
                        EditOp::Equal(..) => break,
                    }
                    i += 1;
                }
                h.before_len = h.deleted_lines.len() as u32;
                h.after_len = h.added_lines.len() as u32;
                h.before_start = pa as u32 + u32::from(h.before_len > 0);
                h.after_start = pb as u32 + u32::from(h.after_len > 0);
                pa += h.deleted_lines.len();
                pb += h.added_lines.len();
                out.push(h);
            }
        }
    }
    out
}

/// Line-level diff of two texts. Lines keep their terminators, so whitespace
/// and line endings are significant.
pub fn line_diff(before: &str, after: &str) -> Vec<Hunk> {
    let a: Vec<&str> = lines(before).collect();
    let b: Vec<&str> = lines(after).collect();
    hunks(&edit_script(&a, &b), &a, &b)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiffError {
    #[error("hunk at before line {0} does not apply")]
    Mismatch(u32),
}

/// Applies hunks produced by [`line_diff`] to the before text.
pub fn apply_hunks(before: &str, hunks: &[Hunk]) -> Result<String, DiffError> {
    let a: Vec<&str> = lines(before).collect();
    let mut out = String::with_capacity(before.len());
    let mut pos = 0usize;
    for h in hunks {
        let at = if h.before_len > 0 {
            h.before_start as usize - 1
        } else {
            h.before_start as usize
        };
        if at < pos || at + h.deleted_lines.len() > a.len() {
            return Err(DiffError::Mismatch(h.before_start));
        }
        for line in &a[pos..at] {
            out.push_str(line);
        }
        if a[at..at + h.deleted_lines.len()]
            .iter()
            .zip(&h.deleted_lines)
            .any(|(x, y)| *x != y)
        {
            return Err(DiffError::Mismatch(h.before_start));
        }
        for line in &h.added_lines {
            out.push_str(line);
        }
        pos = at + h.deleted_lines.len();
    }
    for line in &a[pos..] {
        out.push_str(line);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChurnCount {
    pub added: u64,
    pub deleted: u64,
    pub total: u64,
}

impl ChurnCount {
    pub fn new(added: u64, deleted: u64) -> Self {
        Self {
            added,
            deleted,
            total: added + deleted,
        }
    }
}

impl core::ops::Add for ChurnCount {
    type Output = ChurnCount;

    fn add(self, rhs: ChurnCount) -> ChurnCount {
        ChurnCount::new(self.added + rhs.added, self.deleted + rhs.deleted)
    }
}

/// Raw diff of one changed file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHunks {
    pub path_before: Option<String>,
    pub path_after: Option<String>,
    pub hunks: Vec<Hunk>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Before,
    After,
}

/// An inclusive line range of one file on one side of the diff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span<'a> {
    pub side: Side,
    pub file: &'a str,
    pub start: u32,
    pub end: u32,
}

/// Plain diff churn: every hunk overlapping at least one span counts once, in full.
pub fn plain_churn(files: &[FileHunks], spans: &[Span<'_>]) -> ChurnCount {
    let mut churn = ChurnCount::default();
    for f in files {
        for h in &f.hunks {
            let overlaps = spans.iter().any(|s| {
                let (path, range) = match s.side {
                    Side::Before => (f.path_before.as_deref(), h.before_span()),
                    Side::After => (f.path_after.as_deref(), h.after_span()),
                };
                path == Some(s.file) && range.is_some_and(|(lo, hi)| lo <= s.end && s.start <= hi)
            });
            if overlaps {
                churn = churn + ChurnCount::new(h.after_len.into(), h.before_len.into());
            }
        }
    }
    churn
}

/// Total churn of a hunk list, regardless of spans.
pub fn total_churn(hunks: &[Hunk]) -> ChurnCount {
    hunks.iter().fold(ChurnCount::default(), |c, h| {
        c + ChurnCount::new(h.after_len.into(), h.before_len.into())
    })
}
