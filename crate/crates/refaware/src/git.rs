//! Read-only repository access through the `git` executable.

use std::path::{Path, PathBuf};
use std::process::Command;

use refaware_core::{FileChange, FileStatus, RevisionRef};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GitRepo {
    root: PathBuf,
}

fn is_full_id(s: &str) -> bool {
    s.len() >= 40 && s.bytes().all(|b| b.is_ascii_hexdigit())
}

/// Text contents, or `None` for files git would treat as binary or that are not UTF-8.
fn decode_text(bytes: Vec<u8>) -> Option<String> {
    let probe = &bytes[..bytes.len().min(8000)];
    if probe.contains(&0) {
        return None;
    }
    String::from_utf8(bytes).ok()
}

impl GitRepo {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let repo = Self {
            root: path.as_ref().to_path_buf(),
        };
        repo.run(&["rev-parse", "--git-dir"])
            .map_err(|_| Error::Git(format!("{} is not a git repository", repo.root.display())))?;
        Ok(repo)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn command(&self) -> Command {
        let mut c = Command::new("git");
        c.arg("-C")
            .arg(&self.root)
            .args(["-c", "core.quotepath=off", "-c", "diff.renames=true"])
            .env("LC_ALL", "C")
            .env("GIT_TERMINAL_PROMPT", "0");
        c
    }

    fn run(&self, args: &[&str]) -> Result<Vec<u8>> {
        let out = self.command().args(args).output()?;
        if out.status.success() {
            Ok(out.stdout)
        } else {
            Err(Error::Git(format!(
                "`git {}` failed: {}",
                args.join(" "),
                String::from_utf8_lossy(&out.stderr).trim()
            )))
        }
    }

    /// Resolves any revision expression to a commit.
    pub fn resolve(&self, rev: &str) -> Result<RevisionRef> {
        let spec = format!("{rev}^{{commit}}");
        let out = self
            .run(&["rev-parse", "--verify", "--quiet", &spec])
            .map_err(|_| Error::RevisionNotFound(rev.to_string()))?;
        let id = String::from_utf8_lossy(&out).trim().to_string();
        let short_label = if is_full_id(rev) {
            id[..7].to_string()
        } else {
            rev.to_string()
        };
        Ok(RevisionRef { id, short_label })
    }

    /// Commits reachable from `head` but not `base`, oldest first, following first parents.
    pub fn commits_between(
        &self,
        base: &RevisionRef,
        head: &RevisionRef,
    ) -> Result<Vec<RevisionRef>> {
        let range = format!("{}..{}", base.id, head.id);
        let out = self.run(&["rev-list", "--first-parent", "--reverse", &range])?;
        Ok(String::from_utf8_lossy(&out)
            .lines()
            .map(|id| RevisionRef {
                id: id.to_string(),
                short_label: id[..7.min(id.len())].to_string(),
            })
            .collect())
    }

    /// Raw bytes of `path` at `rev`.
    pub fn read_bytes(&self, rev: &RevisionRef, path: &str) -> Result<Vec<u8>> {
        let object = format!("{}:{}", rev.id, path);
        self.run(&["cat-file", "blob", &object]).map_err(|_| {
            if self.resolve(&rev.id).is_err() {
                Error::RevisionNotFound(rev.id.clone())
            } else {
                Error::FileNotFound {
                    rev: rev.short_label.clone(),
                    path: path.to_string(),
                }
            }
        })
    }

    /// File text with invalid UTF-8 replaced; line endings untouched.
    pub fn read_file(&self, rev: &RevisionRef, path: &str) -> Result<String> {
        Ok(String::from_utf8_lossy(&self.read_bytes(rev, path)?).into_owned())
    }

    /// One entry per path that differs between the two trees, sorted by path.
    pub fn changed_files(
        &self,
        before: &RevisionRef,
        after: &RevisionRef,
    ) -> Result<Vec<FileChange>> {
        let out = self.run(&[
            "diff",
            "--no-ext-diff",
            "--no-color",
            "--name-status",
            "-z",
            "-M",
            &before.id,
            &after.id,
            "--",
        ])?;
        let text = String::from_utf8_lossy(&out);
        let mut fields = text.split('\0').filter(|s| !s.is_empty());
        let mut entries: Vec<(FileStatus, Option<String>, Option<String>)> = Vec::new();
        while let Some(code) = fields.next() {
            let mut path = || {
                fields
                    .next()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Git(format!("truncated diff entry `{code}`")))
            };
            let entry = match code.as_bytes()[0] {
                b'A' | b'C' => {
                    if code.starts_with('C') {
                        path()?;
                    }
                    (FileStatus::Added, None, Some(path()?))
                }
                b'D' => (FileStatus::Deleted, Some(path()?), None),
                b'R' => {
                    let from = path()?;
                    (FileStatus::Renamed, Some(from), Some(path()?))
                }
                _ => {
                    let p = path()?;
                    (FileStatus::Modified, Some(p.clone()), Some(p))
                }
            };
            entries.push(entry);
        }

        let mut changes = Vec::with_capacity(entries.len());
        for (status, path_before, path_after) in entries {
            let load = |rev: &RevisionRef, p: &Option<String>| -> Result<Option<Option<String>>> {
                match p {
                    Some(p) => Ok(Some(decode_text(self.read_bytes(rev, p)?))),
                    None => Ok(None),
                }
            };
            let b = load(before, &path_before)?;
            let a = load(after, &path_after)?;
            let binary = matches!(b, Some(None)) || matches!(a, Some(None));
            let (content_before, content_after) = if binary {
                (None, None)
            } else {
                (b.flatten(), a.flatten())
            };
            changes.push(FileChange {
                path_before,
                path_after,
                status,
                content_before,
                content_after,
                binary,
            });
        }
        changes.sort_by(|x, y| x.display_path().cmp(y.display_path()));
        Ok(changes)
    }
}
