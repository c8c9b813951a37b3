//! Pure per-pair analysis: detection, alignment and metrics over file changes.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::align::{align_refactoring, AlignError, AlignedDiff};
use crate::detect::{detect_changes, DetectorConfig, Refactoring};
use crate::diff::{line_diff, FileHunks};
use crate::metrics::{dcc_with, move_distance, DccRecord, MoveDistance};
use crate::model::AdapterRegistry;
use crate::revision::{FileChange, PairLabel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzedRefactoring {
    pub refactoring: Refactoring,
    pub aligned: AlignedDiff,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PairMetrics {
    pub dcc: Vec<DccRecord>,
    pub move_distances: Vec<MoveDistance>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairAnalysis {
    pub refactorings: Vec<AnalyzedRefactoring>,
    pub metrics: PairMetrics,
    /// Raw zero-context diff of every text file in the pair.
    pub files: Vec<FileHunks>,
}

/// Raw hunks of every text change, in the order given.
pub fn raw_hunks(changes: &[FileChange]) -> Vec<FileHunks> {
    changes
        .iter()
        .filter(|c| !c.binary)
        .map(|c| FileHunks {
            path_before: c.path_before.clone(),
            path_after: c.path_after.clone(),
            hunks: line_diff(
                c.content_before.as_deref().unwrap_or(""),
                c.content_after.as_deref().unwrap_or(""),
            ),
        })
        .collect()
}

pub fn analyze_changes(
    changes: &[FileChange],
    label: PairLabel,
    registry: &AdapterRegistry,
    cfg: &DetectorConfig,
) -> Result<PairAnalysis, AlignError> {
    let files = raw_hunks(changes);
    let mut out = PairAnalysis {
        files,
        ..PairAnalysis::default()
    };
    for r in detect_changes(changes, label, registry, cfg) {
        let aligned = align_refactoring(&r)?;
        out.metrics.dcc.push(dcc_with(&r, &aligned, &out.files));
        if let Ok(d) = move_distance(&r) {
            out.metrics.move_distances.push(d);
        }
        out.refactorings.push(AnalyzedRefactoring {
            refactoring: r,
            aligned,
        });
    }
    Ok(out)
}
