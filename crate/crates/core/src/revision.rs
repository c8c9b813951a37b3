//! Revision identifiers, commit-pair enumeration and file-level changes.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RevisionRef {
    /// Full object id as understood by the repository (e.g. a 40-hex commit hash).
    pub id: String,
    pub short_label: String,
}

impl RevisionRef {
    pub fn new(id: impl Into<String>, short_label: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            short_label: short_label.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PairLabel {
    Main,
    /// 1-based position of the commit inside the change set.
    Commit {
        index: usize,
    },
}

impl PairLabel {
    /// Short stable token used to build refactoring ids (`main`, `c3`).
    pub fn slug(&self) -> String {
        match self {
            PairLabel::Main => String::from("main"),
            PairLabel::Commit { index } => format!("c{index}"),
        }
    }
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairLabel::Main => f.write_str("MAIN"),
            PairLabel::Commit { index } => write!(f, "COMMIT {index}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevisionPair {
    pub before: RevisionRef,
    pub after: RevisionRef,
    pub label: PairLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RevisionError {
    #[error("change set has no commits")]
    EmptyChangeSet,
}

/// Lists the comparisons analysed for one change set.
///
/// The main pair (`base`, last commit) comes first, followed by one pair per
/// commit from newest to oldest, each against its predecessor (the first commit
/// pairs with `base`). A pair whose ids repeat an earlier one is dropped.
pub fn enumerate_pairs(
    base: &RevisionRef,
    commits: &[RevisionRef],
) -> Result<Vec<RevisionPair>, RevisionError> {
    let last = commits.last().ok_or(RevisionError::EmptyChangeSet)?;
    let mut pairs = Vec::with_capacity(commits.len() + 1);
    pairs.push(RevisionPair {
        before: base.clone(),
        after: last.clone(),
        label: PairLabel::Main,
    });
    for index in (1..=commits.len()).rev() {
        let before = if index == 1 {
            base
        } else {
            &commits[index - 2]
        };
        let after = &commits[index - 1];
        let duplicate = pairs
            .iter()
            .any(|p| p.before.id == before.id && p.after.id == after.id);
        if !duplicate {
            pairs.push(RevisionPair {
                before: before.clone(),
                after: after.clone(),
                label: PairLabel::Commit { index },
            });
        }
    }
    Ok(pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FileStatus {
    Added,
    Deleted,
    Modified,
    Renamed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileChange {
    pub path_before: Option<String>,
    pub path_after: Option<String>,
    pub status: FileStatus,
    pub content_before: Option<String>,
    pub content_after: Option<String>,
    /// Set when either side could not be decoded as text; contents are then absent.
    #[serde(default)]
    pub binary: bool,
}

impl FileChange {
    pub fn modified(path: &str, before: &str, after: &str) -> Self {
        Self {
            path_before: Some(path.into()),
            path_after: Some(path.into()),
            status: FileStatus::Modified,
            content_before: Some(before.into()),
            content_after: Some(after.into()),
            binary: false,
        }
    }

    pub fn added(path: &str, after: &str) -> Self {
        Self {
            path_before: None,
            path_after: Some(path.into()),
            status: FileStatus::Added,
            content_before: None,
            content_after: Some(after.into()),
            binary: false,
        }
    }

    pub fn deleted(path: &str, before: &str) -> Self {
        Self {
            path_before: Some(path.into()),
            path_after: None,
            status: FileStatus::Deleted,
            content_before: Some(before.into()),
            content_after: None,
            binary: false,
        }
    }

    pub fn renamed(from: &str, to: &str, before: &str, after: &str) -> Self {
        Self {
            path_before: Some(from.into()),
            path_after: Some(to.into()),
            status: FileStatus::Renamed,
            content_before: Some(before.into()),
            content_after: Some(after.into()),
            binary: false,
        }
    }

    /// Path used to order and display the change (after-path when present).
    pub fn display_path(&self) -> &str {
        self.path_after
            .as_deref()
            .or(self.path_before.as_deref())
            .unwrap_or("")
    }
}
