//! Runs enumeration, detection, alignment and metrics over a change set.

use std::time::Instant;

use chrono::Utc;
use rayon::prelude::*;
use refaware_core::metrics::TimingRecord;
use refaware_core::pipeline::analyze_changes;
use refaware_core::{enumerate_pairs, summarize, AdapterRegistry, DetectorConfig, RevisionRef};

use crate::error::{Error, Result};
use crate::git::GitRepo;
use crate::report::{AnalysisReport, PairReport, SCHEMA_VERSION};

/// Which commits make up the change set.
#[derive(Debug, Clone)]
pub enum CommitSource {
    /// First-parent ancestry `base..head`.
    Range { head: String },
    /// Explicit list, oldest first.
    List(Vec<String>),
}

#[derive(Debug, Clone)]
pub struct AnalyzeRequest {
    pub repo_id: String,
    pub change_set_id: String,
    pub base: String,
    pub commits: CommitSource,
    pub config: DetectorConfig,
}

/// Resolves the base and commit list of a request.
pub fn resolve_change_set(
    repo: &GitRepo,
    base: &str,
    commits: &CommitSource,
) -> Result<(RevisionRef, Vec<RevisionRef>)> {
    let base = repo.resolve(base)?;
    let commits = match commits {
        CommitSource::Range { head } => {
            let head = repo.resolve(head)?;
            repo.commits_between(&base, &head)?
        }
        CommitSource::List(revs) => revs
            .iter()
            .map(|r| repo.resolve(r))
            .collect::<Result<_>>()?,
    };
    Ok((base, commits))
}

pub fn analyze(repo: &GitRepo, req: &AnalyzeRequest) -> Result<AnalysisReport> {
    req.config
        .validate()
        .map_err(|e| Error::Config(e.to_string()))?;
    let (base, commits) = resolve_change_set(repo, &req.base, &req.commits)?;
    let pairs = enumerate_pairs(&base, &commits)?;
    let registry = AdapterRegistry::default();

    let pairs: Vec<PairReport> = pairs
        .into_par_iter()
        .map(|pair| {
            let changes = repo.changed_files(&pair.before, &pair.after)?;
            let started = Instant::now();
            let analysis = analyze_changes(&changes, pair.label, &registry, &req.config)?;
            let wall_seconds = started.elapsed().as_secs_f64();
            log::debug!(
                "{} {}..{}: {} files, {} refactorings, {wall_seconds:.3}s",
                pair.label,
                pair.before.short_label,
                pair.after.short_label,
                changes.len(),
                analysis.refactorings.len(),
            );
            Ok(PairReport {
                timing: TimingRecord {
                    pair_label: pair.label,
                    wall_seconds,
                },
                pair,
                refactorings: analysis.refactorings,
                metrics: analysis.metrics,
                files: analysis.files,
            })
        })
        .collect::<Result<_>>()?;

    let dcc: Vec<_> = pairs
        .iter()
        .flat_map(|p| p.metrics.dcc.iter().cloned())
        .collect();
    let moves: Vec<_> = pairs
        .iter()
        .flat_map(|p| p.metrics.move_distances.iter().cloned())
        .collect();

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        repo_id: req.repo_id.clone(),
        change_set_id: req.change_set_id.clone(),
        created_at: Utc::now(),
        detector_config: req.config,
        summary: summarize(&dcc, &moves),
        pairs,
    })
}
