//! The persisted analysis document, reviewer events, and their canonical encoding.

use chrono::{DateTime, Utc};
use refaware_core::metrics::TimingRecord;
use refaware_core::pipeline::{AnalyzedRefactoring, PairMetrics};
use refaware_core::{DetectorConfig, FileHunks, RevisionPair, Summary};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub pair: RevisionPair,
    pub refactorings: Vec<AnalyzedRefactoring>,
    pub metrics: PairMetrics,
    pub timing: TimingRecord,
    /// Zero-context diff of every text file in the pair.
    pub files: Vec<FileHunks>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub repo_id: String,
    pub change_set_id: String,
    pub created_at: DateTime<Utc>,
    pub detector_config: DetectorConfig,
    pub pairs: Vec<PairReport>,
    pub summary: Summary,
}

impl AnalysisReport {
    /// Pair entry whose revisions match `before..after` by id or short label.
    pub fn pair(&self, before: &str, after: &str) -> Option<&PairReport> {
        let hit = |r: &refaware_core::RevisionRef, s: &str| r.id == s || r.short_label == s;
        self.pairs
            .iter()
            .find(|p| hit(&p.pair.before, before) && hit(&p.pair.after, after))
    }

    /// Checks the invariants serde cannot express.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::validation(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        if self.repo_id.is_empty() {
            return Err(Error::validation("repo_id", "must not be empty"));
        }
        if self.change_set_id.is_empty() {
            return Err(Error::validation("change_set_id", "must not be empty"));
        }
        if let Err(e) = self.detector_config.validate() {
            return Err(Error::validation("detector_config", e.to_string()));
        }
        for (i, p) in self.pairs.iter().enumerate() {
            let key = (&p.pair.before.id, &p.pair.after.id);
            if self.pairs[..i]
                .iter()
                .any(|q| (&q.pair.before.id, &q.pair.after.id) == key)
            {
                return Err(Error::validation(
                    format!("pairs[{i}].pair"),
                    "duplicate revision pair",
                ));
            }
            if p.timing.wall_seconds.is_nan() || p.timing.wall_seconds < 0.0 {
                return Err(Error::validation(
                    format!("pairs[{i}].timing.wall_seconds"),
                    "must be non-negative",
                ));
            }
        }
        Ok(())
    }

    /// Copy with run-dependent fields (creation time, wall-clock timings) zeroed.
    pub fn normalized(&self) -> Self {
        let mut r = self.clone();
        r.created_at = DateTime::<Utc>::UNIX_EPOCH;
        for p in &mut r.pairs {
            p.timing.wall_seconds = 0.0;
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    RClickLeft,
    RClickRight,
    GoToSource,
    WindowOpen,
    WindowClose,
}

/// One reviewer interaction, keyed by the report it refers to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewEvent {
    pub repo_id: String,
    pub change_set_id: String,
    pub refactoring_id: String,
    pub event: EventKind,
    pub at: DateTime<Utc>,
    /// Client session; timestamps must not go backwards within one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
}

/// Sorted keys, two-space indentation, LF line endings, trailing newline.
pub fn to_canonical<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("documents serialize to JSON");
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values print");
    s.push('\n');
    s
}

/// Parses a document, reporting the path of the first offending field.
pub fn from_document<T: DeserializeOwned>(text: &[u8]) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_slice(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        Error::validation(path, e.into_inner().to_string())
    })
}

pub fn parse_report(text: &[u8]) -> Result<AnalysisReport> {
    let r: AnalysisReport = from_document(text)?;
    r.validate()?;
    Ok(r)
}
