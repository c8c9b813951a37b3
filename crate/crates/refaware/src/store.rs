//! Report and event persistence.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

use crate::error::{Error, Result};
use crate::report::{
    from_document, parse_report, to_canonical, AnalysisReport, EventKind, ReviewEvent,
};

/// `(repo_id, change_set_id)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReportKey {
    pub repo_id: String,
    pub change_set_id: String,
}

impl ReportKey {
    pub fn new(repo_id: impl Into<String>, change_set_id: impl Into<String>) -> Self {
        Self {
            repo_id: repo_id.into(),
            change_set_id: change_set_id.into(),
        }
    }

    pub fn of(report: &AnalysisReport) -> Self {
        Self::new(&report.repo_id, &report.change_set_id)
    }
}

impl std::fmt::Display for ReportKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.repo_id, self.change_set_id)
    }
}

/// Whether a store replaced an existing document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stored {
    Created,
    Replaced,
}

pub trait DocumentStore: Send + Sync {
    /// Last write wins per key.
    fn store(&self, report: &AnalysisReport) -> Result<Stored>;
    fn fetch(&self, key: &ReportKey) -> Result<AnalysisReport>;
    /// Appends after validating ordering against earlier events of the same report.
    fn record_event(&self, event: &ReviewEvent) -> Result<()>;
    fn list_events(&self, key: &ReportKey) -> Result<Vec<ReviewEvent>>;
}

const KEY_SET: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_');

fn file_component(s: &str) -> String {
    utf8_percent_encode(s, KEY_SET).to_string()
}

/// One canonical JSON file per report and one JSON-lines log per report's events.
pub struct FsStore {
    root: PathBuf,
    locks: Mutex<HashMap<ReportKey, Arc<Mutex<()>>>>,
}

impl FsStore {
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(root.join("reports"))?;
        fs::create_dir_all(root.join("events"))?;
        Ok(Self {
            root,
            locks: Mutex::new(HashMap::new()),
        })
    }

    fn lock(&self, key: &ReportKey) -> Arc<Mutex<()>> {
        let mut locks = self.locks.lock().unwrap_or_else(|e| e.into_inner());
        locks.entry(key.clone()).or_default().clone()
    }

    fn report_path(&self, key: &ReportKey) -> PathBuf {
        self.root
            .join("reports")
            .join(file_component(&key.repo_id))
            .join(format!("{}.json", file_component(&key.change_set_id)))
    }

    fn events_path(&self, key: &ReportKey) -> PathBuf {
        self.root
            .join("events")
            .join(file_component(&key.repo_id))
            .join(format!("{}.jsonl", file_component(&key.change_set_id)))
    }

    fn read_events(path: &Path) -> Result<Vec<ReviewEvent>> {
        let file = match fs::File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut out = Vec::new();
        for line in BufReader::new(file).lines() {
            let line = line?;
            if !line.trim().is_empty() {
                out.push(from_document(line.as_bytes())?);
            }
        }
        Ok(out)
    }
}

fn check_ordering(history: &[ReviewEvent], ev: &ReviewEvent) -> Result<()> {
    if let Some(session) = &ev.session_id {
        if let Some(last) = history
            .iter()
            .rev()
            .find(|e| e.session_id.as_ref() == Some(session))
        {
            if ev.at < last.at {
                return Err(Error::validation(
                    "at",
                    "earlier than the previous event of this session",
                ));
            }
        }
    }
    if ev.event == EventKind::WindowClose {
        let open = history.iter().rev().find(|e| {
            e.event == EventKind::WindowOpen
                && e.refactoring_id == ev.refactoring_id
                && e.session_id == ev.session_id
        });
        if let Some(open) = open {
            if ev.at < open.at {
                return Err(Error::validation(
                    "at",
                    "window closed before it was opened",
                ));
            }
        }
    }
    Ok(())
}

impl DocumentStore for FsStore {
    fn store(&self, report: &AnalysisReport) -> Result<Stored> {
        report.validate()?;
        let key = ReportKey::of(report);
        let path = self.report_path(&key);
        let dir = path.parent().expect("report files live in a directory");
        fs::create_dir_all(dir)?;
        let lock = self.lock(&key);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        let existed = path.exists();
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(to_canonical(report).as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
        Ok(if existed {
            Stored::Replaced
        } else {
            Stored::Created
        })
    }

    fn fetch(&self, key: &ReportKey) -> Result<AnalysisReport> {
        match fs::read(self.report_path(key)) {
            Ok(bytes) => parse_report(&bytes),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                Err(Error::NotFound(format!("report {key}")))
            }
            Err(e) => Err(e.into()),
        }
    }

    fn record_event(&self, event: &ReviewEvent) -> Result<()> {
        let key = ReportKey::new(&event.repo_id, &event.change_set_id);
        if !self.report_path(&key).exists() {
            return Err(Error::NotFound(format!("report {key}")));
        }
        let path = self.events_path(&key);
        fs::create_dir_all(path.parent().expect("event logs live in a directory"))?;
        let lock = self.lock(&key);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        check_ordering(&Self::read_events(&path)?, event)?;
        let mut line =
            serde_json::to_string(&serde_json::to_value(event).expect("events serialize"))
                .expect("JSON values print");
        line.push('\n');
        let mut f = OpenOptions::new().create(true).append(true).open(&path)?;
        f.write_all(line.as_bytes())?;
        Ok(())
    }

    fn list_events(&self, key: &ReportKey) -> Result<Vec<ReviewEvent>> {
        if !self.report_path(key).exists() {
            return Err(Error::NotFound(format!("report {key}")));
        }
        let lock = self.lock(key);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        Self::read_events(&self.events_path(key))
    }
}
