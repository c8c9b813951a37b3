use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

/// A temporary git repository whose commits are whole-tree snapshots.
pub struct FixtureRepo {
    dir: TempDir,
}

impl FixtureRepo {
    pub fn init() -> Self {
        let dir = tempfile::tempdir().expect("tempdir");
        let repo = Self { dir };
        repo.git(&["init", "-q"]);
        repo.git(&["config", "user.name", "Fixture"]);
        repo.git(&["config", "user.email", "fixture@example.com"]);
        repo.git(&["config", "commit.gpgsign", "false"]);
        repo.git(&["config", "core.autocrlf", "false"]);
        repo
    }

    pub fn path(&self) -> &Path {
        self.dir.path()
    }

    pub fn git(&self, args: &[&str]) -> String {
        let out = Command::new("git")
            .arg("-C")
            .arg(self.dir.path())
            .args(args)
            .env("GIT_AUTHOR_DATE", "2020-06-01T12:00:00Z")
            .env("GIT_COMMITTER_DATE", "2020-06-01T12:00:00Z")
            .output()
            .expect("git runs");
        assert!(
            out.status.success(),
            "git {:?} failed: {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout)
            .expect("utf8")
            .trim()
            .to_string()
    }

    /// Replaces the work tree with exactly `files` and commits it; returns the commit id.
    pub fn commit_snapshot(&self, files: &BTreeMap<String, String>, message: &str) -> String {
        self.commit_bytes(
            &files
                .iter()
                .map(|(k, v)| (k.clone(), v.as_bytes().to_vec()))
                .collect(),
            message,
        )
    }

    pub fn commit_bytes(&self, files: &BTreeMap<String, Vec<u8>>, message: &str) -> String {
        for tracked in self
            .git(&["ls-files", "-z"])
            .split('\0')
            .filter(|s| !s.is_empty())
        {
            if !files.contains_key(tracked) {
                fs::remove_file(self.dir.path().join(tracked)).expect("remove");
            }
        }
        for (path, content) in files {
            let full: PathBuf = self.dir.path().join(path);
            if let Some(parent) = full.parent() {
                fs::create_dir_all(parent).expect("mkdir");
            }
            fs::write(&full, content).expect("write");
        }
        self.git(&["add", "-A"]);
        self.git(&["commit", "-q", "--allow-empty", "-m", message]);
        self.git(&["rev-parse", "HEAD"])
    }

    /// One commit per snapshot, in order; returns the repository and the commit ids.
    pub fn with_history(snapshots: &[BTreeMap<String, String>]) -> (Self, Vec<String>) {
        let repo = Self::init();
        let ids = snapshots
            .iter()
            .enumerate()
            .map(|(i, s)| repo.commit_snapshot(s, &format!("snapshot {i}")))
            .collect();
        (repo, ids)
    }

    /// Base commit holding the instance's before snapshot and one commit holding its after snapshot.
    pub fn from_instance(inst: &crate::corpus::Instance) -> (Self, String, String) {
        let (repo, ids) = Self::with_history(&[inst.before.clone(), inst.after.clone()]);
        let [base, head]: [String; 2] = ids.try_into().expect("two commits");
        (repo, base, head)
    }
}
