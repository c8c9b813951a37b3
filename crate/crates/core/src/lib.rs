//! Refactoring-aware diff engine.
//!
//! This crate holds the allocation-only core: the code-structure model and its
//! Go adapter, the similarity based refactoring detector, line diffs with the
//! aligned "internal diff" view, and the review-effort metrics built on top of
//! them. Repository access, persistence and the CLI live in the `refaware`
//! companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod align;
pub mod detect;
pub mod diff;
pub mod golang;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod revision;
pub mod token;

pub use align::{
    align_refactoring, enhanced_churn, AlignError, AlignedDiff, AlignedRow, RowStatus,
};
pub use detect::{
    classify, detect_changes, idf_weights, match_elements, similarity, DetectorConfig,
    ElementMatch, Refactoring, RefactoringKind, Weights,
};
pub use diff::{apply_hunks, line_diff, plain_churn, ChurnCount, FileHunks, Hunk};
pub use metrics::{dcc, move_distance, summarize, DccRecord, MoveDistance, Stats, Summary};
pub use model::{
    parse_source, AdapterRegistry, CodeElement, ElementKind, LanguageAdapter, Signature,
};
pub use revision::{enumerate_pairs, FileChange, FileStatus, PairLabel, RevisionPair, RevisionRef};
pub use token::TokenBag;
