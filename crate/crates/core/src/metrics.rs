//! Review-effort proxies: diff code churn and move distance.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::align::{align_refactoring, enhanced_churn, AlignError, AlignedDiff};
use crate::detect::{Refactoring, RefactoringKind};
use crate::diff::{plain_churn, ChurnCount, FileHunks, Side, Span};
use crate::revision::PairLabel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DccRecord {
    pub refactoring_id: String,
    pub kind: RefactoringKind,
    pub plain: ChurnCount,
    pub enhanced: ChurnCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveDistance {
    pub refactoring_id: String,
    pub kind: RefactoringKind,
    pub same_file: bool,
    /// Present exactly for same-file moves.
    pub distance_lines: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub pair_label: PairLabel,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("{0} is not a move refactoring")]
    KindMismatch(RefactoringKind),
}

/// `|y - x|` for a same-file move from line x to line y; absent across files.
pub fn move_distance(r: &Refactoring) -> Result<MoveDistance, MetricsError> {
    if !r.kind.is_move() {
        return Err(MetricsError::KindMismatch(r.kind));
    }
    let same_file = r.before_anchor.file == r.after_anchor.file;
    Ok(MoveDistance {
        refactoring_id: r.id.clone(),
        kind: r.kind,
        same_file,
        distance_lines: same_file.then(|| r.after_anchor.line.abs_diff(r.before_anchor.line)),
    })
}

/// Line spans of every element a refactoring touches, on the side it lives on.
pub fn refactoring_spans(r: &Refactoring) -> Vec<Span<'_>> {
    let extracted_side = if r.kind == RefactoringKind::InlineFunction {
        Side::Before
    } else {
        Side::After
    };
    [
        (Side::Before, r.before_element.as_ref()),
        (Side::After, r.after_element.as_ref()),
        (extracted_side, r.extracted_element.as_ref()),
    ]
    .into_iter()
    .filter_map(|(side, e)| {
        e.map(|e| Span {
            side,
            file: &e.file_path,
            start: e.start_line,
            end: e.end_line,
        })
    })
    .collect()
}

pub fn dcc(r: &Refactoring, raw: &[FileHunks]) -> Result<DccRecord, AlignError> {
    let aligned = align_refactoring(r)?;
    Ok(dcc_with(r, &aligned, raw))
}

/// Same as [`dcc`] when the aligned diff is already at hand.
pub fn dcc_with(r: &Refactoring, aligned: &AlignedDiff, raw: &[FileHunks]) -> DccRecord {
    DccRecord {
        refactoring_id: r.id.clone(),
        kind: r.kind,
        plain: plain_churn(raw, &refactoring_spans(r)),
        enhanced: enhanced_churn(aligned),
    }
}

/// Order statistics of one sample. Quantiles interpolate linearly between
/// closest ranks, so an even-sized median is the mean of the two central values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Stats {
            count: v.len(),
            min: v[0],
            q1: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q3: quantile(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    Stats::of(values).map(|s| s.median)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindSummary {
    pub count: usize,
    pub plain_dcc: Option<Stats>,
    pub enhanced_dcc: Option<Stats>,
    /// Same-file moves only.
    pub move_distance: Option<Stats>,
}

pub type Summary = BTreeMap<RefactoringKind, KindSummary>;

/// Groups churn and distance samples by refactoring kind. Kinds without samples are omitted.
pub fn summarize(dcc: &[DccRecord], moves: &[MoveDistance]) -> Summary {
    let mut plain: BTreeMap<RefactoringKind, Vec<f64>> = BTreeMap::new();
    let mut enhanced: BTreeMap<RefactoringKind, Vec<f64>> = BTreeMap::new();
    let mut distance: BTreeMap<RefactoringKind, Vec<f64>> = BTreeMap::new();
    for d in dcc {
        plain.entry(d.kind).or_default().push(d.plain.total as f64);
        enhanced
            .entry(d.kind)
            .or_default()
            .push(d.enhanced.total as f64);
    }
    for m in moves {
        let entry = distance.entry(m.kind).or_default();
        if let Some(x) = m.distance_lines {
            entry.push(f64::from(x));
        }
    }

    let mut out = Summary::new();
    for kind in RefactoringKind::ALL {
        let p = plain.get(&kind).map_or(&[][..], Vec::as_slice);
        let e = enhanced.get(&kind).map_or(&[][..], Vec::as_slice);
        let d = distance.get(&kind).map_or(&[][..], Vec::as_slice);
        let count = p.len().max(moves.iter().filter(|m| m.kind == kind).count());
        if count == 0 {
            continue;
        }
        out.insert(
            kind,
            KindSummary {
                count,
                plain_dcc: Stats::of(p),
                enhanced_dcc: Stats::of(e),
                move_distance: Stats::of(d),
            },
        );
    }
    out
}
