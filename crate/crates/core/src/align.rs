//! Aligned internal diffs of refactored elements and the churn they show.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::detect::{Refactoring, RefactoringKind};
use crate::diff::{edit_script, ChurnCount, EditOp};
use crate::model::{lines, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RowStatus {
    Unchanged,
    Modified,
    Added,
    Removed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedRow {
    pub left: Option<String>,
    pub right: Option<String>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExtractedStatus {
    /// Declaration and closing lines of the function; not compared.
    Frame,
    /// Found verbatim (modulo indentation) in the host's lost or gained lines.
    Unchanged,
    /// Paired with a differing host line, kept in `original`.
    Modified,
    /// No counterpart in the host.
    Unmatched,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedLine {
    pub text: String,
    pub status: ExtractedStatus,
    pub original: Option<String>,
}

impl ExtractedLine {
    pub fn highlighted(&self) -> bool {
        matches!(
            self.status,
            ExtractedStatus::Modified | ExtractedStatus::Unmatched
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExtractedOrigin {
    /// New function carved out of the host.
    Extracted,
    /// Removed function whose body was merged into the host.
    Inlined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedBody {
    pub origin: ExtractedOrigin,
    pub lines: Vec<ExtractedLine>,
}

impl ExtractedBody {
    pub fn highlighted_count(&self) -> usize {
        self.lines.iter().filter(|l| l.highlighted()).count()
    }

    pub fn text(&self) -> String {
        self.lines.iter().map(|l| l.text.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureDelta {
    pub before: Signature,
    pub after: Signature,
}

/// Side-by-side internal diff of one refactoring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedDiff {
    pub rows: Vec<AlignedRow>,
    pub extracted_body: Option<ExtractedBody>,
    pub signature_delta: Option<SignatureDelta>,
}

impl AlignedDiff {
    /// Concatenation of the present left cells.
    pub fn left_text(&self) -> String {
        self.rows.iter().filter_map(|r| r.left.as_deref()).collect()
    }

    pub fn right_text(&self) -> String {
        self.rows
            .iter()
            .filter_map(|r| r.right.as_deref())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlignError {
    #[error("refactoring {0} does not carry the element bodies needed to align it")]
    MissingBody(String),
}

/// Pairs two texts row by row. In each run of changes the deletions and
/// insertions are paired positionally into MODIFIED rows; leftovers become
/// REMOVED or ADDED.
pub fn align_texts(before: &str, after: &str) -> Vec<AlignedRow> {
    let a: Vec<&str> = lines(before).collect();
    let b: Vec<&str> = lines(after).collect();
    let ops = edit_script(&a, &b);
    let mut rows = Vec::with_capacity(a.len().max(b.len()));
    let mut i = 0;
    while i < ops.len() {
        if let EditOp::Equal(x, y) = ops[i] {
            debug_assert_eq!(a[x], b[y]);
            rows.push(AlignedRow {
                left: Some(a[x].into()),
                right: Some(b[y].into()),
                status: RowStatus::Unchanged,
            });
            i += 1;
            continue;
        }
        let (dels, ins, next) = change_run(&ops, i);
        let paired = dels.len().min(ins.len());
        for k in 0..paired {
            rows.push(AlignedRow {
                left: Some(a[dels[k]].into()),
                right: Some(b[ins[k]].into()),
                status: RowStatus::Modified,
            });
        }
        for &x in &dels[paired..] {
            rows.push(AlignedRow {
                left: Some(a[x].into()),
                right: None,
                status: RowStatus::Removed,
            });
        }
        for &y in &ins[paired..] {
            rows.push(AlignedRow {
                left: None,
                right: Some(b[y].into()),
                status: RowStatus::Added,
            });
        }
        i = next;
    }
    rows
}

fn change_run(ops: &[EditOp], from: usize) -> (Vec<usize>, Vec<usize>, usize) {
    let mut dels = Vec::new();
    let mut ins = Vec::new();
    let mut i = from;
    while let Some(op) = ops.get(i) {
        match *op {
            EditOp::Delete(x) => dels.push(x),
            EditOp::Insert(y) => ins.push(y),
            EditOp::Equal(..) => break,
        }
        i += 1;
    }
    (dels, ins, i)
}

/// Compares the interior lines of an extracted or inlined function against the
/// host lines it came from (or went to). Indentation is ignored here because the
/// code changes nesting depth when it moves between functions.
fn align_extracted(
    body: &str,
    inner: core::ops::Range<usize>,
    host_lines: &[&str],
    origin: ExtractedOrigin,
) -> ExtractedBody {
    let body_lines: Vec<&str> = lines(body).collect();
    let inner = inner.start.min(body_lines.len())..inner.end.min(body_lines.len());
    let interior: Vec<&str> = body_lines[inner.clone()].iter().map(|l| l.trim()).collect();
    let host: Vec<&str> = host_lines.iter().map(|l| l.trim()).collect();
    let ops = edit_script(&host, &interior);

    let mut status = alloc::vec![(ExtractedStatus::Frame, None::<String>); body_lines.len()];
    let mut i = 0;
    while i < ops.len() {
        if let EditOp::Equal(x, y) = ops[i] {
            status[inner.start + y] = (ExtractedStatus::Unchanged, Some(host_lines[x].into()));
            i += 1;
            continue;
        }
        let (dels, ins, next) = change_run(&ops, i);
        for (k, &y) in ins.iter().enumerate() {
            status[inner.start + y] = match dels.get(k) {
                Some(&x) => (ExtractedStatus::Modified, Some(host_lines[x].into())),
                None => (ExtractedStatus::Unmatched, None),
            };
        }
        i = next;
    }

    ExtractedBody {
        origin,
        lines: body_lines
            .iter()
            .zip(status)
            .map(|(text, (status, original))| ExtractedLine {
                text: (*text).into(),
                status,
                original,
            })
            .collect(),
    }
}

/// Builds the internal diff shown for a refactoring.
pub fn align_refactoring(r: &Refactoring) -> Result<AlignedDiff, AlignError> {
    let missing = || AlignError::MissingBody(r.id.clone());
    let before = r.before_element.as_ref().ok_or_else(missing)?;
    let after = r.after_element.as_ref().ok_or_else(missing)?;
    let rows = align_texts(&before.body_text, &after.body_text);

    let extracted_body = match r.kind {
        RefactoringKind::ExtractFunction | RefactoringKind::InlineFunction => {
            let f = r.extracted_element.as_ref().ok_or_else(missing)?;
            let (origin, host): (_, Vec<&str>) = if r.kind == RefactoringKind::ExtractFunction {
                let lost = rows
                    .iter()
                    .filter(|row| matches!(row.status, RowStatus::Modified | RowStatus::Removed))
                    .filter_map(|row| row.left.as_deref());
                (ExtractedOrigin::Extracted, lost.collect())
            } else {
                let gained = rows
                    .iter()
                    .filter(|row| matches!(row.status, RowStatus::Modified | RowStatus::Added))
                    .filter_map(|row| row.right.as_deref());
                (ExtractedOrigin::Inlined, gained.collect())
            };
            Some(align_extracted(
                &f.body_text,
                f.inner_line_range(),
                &host,
                origin,
            ))
        }
        _ => None,
    };

    let signature_delta = match (r.kind, &before.signature, &after.signature) {
        (
            RefactoringKind::ChangeSignature | RefactoringKind::RenameFunction,
            Some(sb),
            Some(sa),
        ) => Some(SignatureDelta {
            before: sb.clone(),
            after: sa.clone(),
        }),
        (
            RefactoringKind::MoveFunction | RefactoringKind::MoveAndRenameFunction,
            Some(sb),
            Some(sa),
        ) if sb.shape_differs(sa) => Some(SignatureDelta {
            before: sb.clone(),
            after: sa.clone(),
        }),
        _ => None,
    };

    Ok(AlignedDiff {
        rows,
        extracted_body,
        signature_delta,
    })
}

/// Churn a reviewer reads in the aligned view.
///
/// A MODIFIED row counts one deleted and one added line; ADDED and REMOVED
/// rows count one line each. Highlighted lines of the extracted body count the
/// same way: modified lines as two, unmatched lines as one added line for an
/// extraction or one deleted line for an inlining.
pub fn enhanced_churn(aligned: &AlignedDiff) -> ChurnCount {
    let (mut added, mut deleted) = (0u64, 0u64);
    for row in &aligned.rows {
        match row.status {
            RowStatus::Unchanged => {}
            RowStatus::Modified => {
                added += 1;
                deleted += 1;
            }
            RowStatus::Added => added += 1,
            RowStatus::Removed => deleted += 1,
        }
    }
    if let Some(body) = &aligned.extracted_body {
        for line in &body.lines {
            match (line.status, body.origin) {
                (ExtractedStatus::Modified, _) => {
                    added += 1;
                    deleted += 1;
                }
                (ExtractedStatus::Unmatched, ExtractedOrigin::Extracted) => added += 1,
                (ExtractedStatus::Unmatched, ExtractedOrigin::Inlined) => deleted += 1,
                _ => {}
            }
        }
    }
    ChurnCount::new(added, deleted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(status: RowStatus) -> AlignedRow {
        let s = || Some(String::from("x\n"));
        match status {
            RowStatus::Added => AlignedRow {
                left: None,
                right: s(),
                status,
            },
            RowStatus::Removed => AlignedRow {
                left: s(),
                right: None,
                status,
            },
            _ => AlignedRow {
                left: s(),
                right: s(),
                status,
            },
        }
    }

    fn diff(rows: Vec<AlignedRow>) -> AlignedDiff {
        AlignedDiff {
            rows,
            extracted_body: None,
            signature_delta: None,
        }
    }

    #[test]
    fn churn_counting_rule() {
        use RowStatus::*;
        let one_mod = diff(vec![row(Unchanged), row(Modified), row(Unchanged)]);
        assert_eq!(enhanced_churn(&one_mod), ChurnCount::new(1, 1));
        assert_eq!(enhanced_churn(&one_mod).total, 2);
        assert_eq!(enhanced_churn(&diff(vec![row(Unchanged); 4])).total, 0);
        let mixed = diff(vec![row(Added), row(Added), row(Removed), row(Added)]);
        assert_eq!(enhanced_churn(&mixed), ChurnCount::new(3, 1));
    }

    use alloc::vec;

    #[test]
    fn modified_collapse_is_positional() {
        let rows = align_texts("a\nb\nc\nd\n", "a\nB\nC\nX\nd\n");
        let st: Vec<_> = rows.iter().map(|r| r.status).collect();
        use RowStatus::*;
        assert_eq!(st, [Unchanged, Modified, Modified, Added, Unchanged]);
        assert_eq!(rows[1].left.as_deref(), Some("b\n"));
        assert_eq!(rows[1].right.as_deref(), Some("B\n"));
        let d = diff(rows);
        assert_eq!(d.left_text(), "a\nb\nc\nd\n");
        assert_eq!(d.right_text(), "a\nB\nC\nX\nd\n");
    }

    #[test]
    fn extracted_lines_ignore_indentation() {
        let body =
            "func isEven(n int) bool {\n\tvar half float64 = n / 2\n\treturn half*2 == n\n}\n";
        let host = ["\t\tvar half int = n / 2\n", "\t\treturn half*2 == n\n"];
        let eb = align_extracted(body, 1..3, &host, ExtractedOrigin::Extracted);
        let st: Vec<_> = eb.lines.iter().map(|l| l.status).collect();
        use ExtractedStatus::*;
        assert_eq!(st, [Frame, Modified, Unchanged, Frame]);
        assert_eq!(eb.highlighted_count(), 1);
        assert_eq!(
            eb.lines[1].original.as_deref(),
            Some("\t\tvar half int = n / 2\n")
        );
        assert_eq!(eb.text(), body);
    }
}
