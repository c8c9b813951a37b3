//! Repository reading, change-set analysis, report storage and the review API.

pub mod analyze;
pub mod config;
pub mod error;
pub mod git;
pub mod render;
pub mod report;
pub mod server;
pub mod store;

pub use analyze::{analyze, AnalyzeRequest, CommitSource};
pub use config::ConfigOverrides;
pub use error::{Error, Result};
pub use git::GitRepo;
pub use report::{to_canonical, AnalysisReport, EventKind, PairReport, ReviewEvent};
pub use store::{DocumentStore, FsStore, ReportKey, Stored};
