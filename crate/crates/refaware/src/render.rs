//! Human-readable renderings of a report.

use std::fmt::Write;

use html_escape::encode_text;
use refaware_core::align::ExtractedOrigin;
use refaware_core::metrics::Stats;
use refaware_core::pipeline::AnalyzedRefactoring;
use refaware_core::{DccRecord, RowStatus};

use crate::report::{to_canonical, AnalysisReport, PairReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
    Html,
}

pub fn render(report: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Json => to_canonical(report),
        Format::Table => table(report),
        Format::Html => html(report),
    }
}

fn dcc_of<'a>(pair: &'a PairReport, id: &str) -> Option<&'a DccRecord> {
    pair.metrics.dcc.iter().find(|d| d.refactoring_id == id)
}

fn pair_heading(p: &PairReport) -> String {
    format!(
        "{} {}..{}",
        p.pair.label, p.pair.before.short_label, p.pair.after.short_label
    )
}

/// Pads every column to its widest cell.
fn columns(rows: &[Vec<String>]) -> String {
    let n = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..n)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::from("  ");
        for (c, cell) in r.iter().enumerate() {
            if c + 1 == r.len() {
                line.push_str(cell);
            } else {
                let _ = write!(line, "{cell:<w$}  ", w = widths[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn median(s: &Option<Stats>) -> String {
    s.as_ref()
        .map_or_else(|| "-".to_string(), |s| format!("{}", s.median))
}

pub fn table(report: &AnalysisReport) -> String {
    let c = &report.detector_config;
    let mut out = format!(
        "{} / {}  created {}\nconfig: tau_match={} tau_extract={} min_extract_tokens={} idf_smoothing={}\n",
        report.repo_id,
        report.change_set_id,
        report.created_at.to_rfc3339(),
        c.tau_match,
        c.tau_extract,
        c.min_extract_tokens,
        c.idf_smoothing,
    );
    for p in &report.pairs {
        let _ = writeln!(
            out,
            "\n{}  ({} refactorings, {:.3}s)",
            pair_heading(p),
            p.refactorings.len(),
            p.timing.wall_seconds
        );
        if p.refactorings.is_empty() {
            continue;
        }
        let mut rows = vec![[
            "ID",
            "KIND",
            "FROM",
            "TO",
            "PLAIN",
            "ENHANCED",
            "DESCRIPTION",
        ]
        .map(String::from)
        .to_vec()];
        for a in &p.refactorings {
            let r = &a.refactoring;
            let d = dcc_of(p, &r.id);
            rows.push(vec![
                r.id.clone(),
                r.kind.title().to_string(),
                r.before_anchor.to_string(),
                r.after_anchor.to_string(),
                d.map_or("-".into(), |d| d.plain.total.to_string()),
                d.map_or("-".into(), |d| d.enhanced.total.to_string()),
                r.description.clone(),
            ]);
        }
        out.push_str(&columns(&rows));
    }
    out.push_str("\nsummary\n");
    if report.summary.is_empty() {
        out.push_str("  no refactorings\n");
    } else {
        let mut rows = vec![[
            "KIND",
            "COUNT",
            "PLAIN MEDIAN",
            "ENHANCED MEDIAN",
            "MOVE DISTANCE MEDIAN",
        ]
        .map(String::from)
        .to_vec()];
        for (kind, s) in &report.summary {
            rows.push(vec![
                kind.title().to_string(),
                s.count.to_string(),
                median(&s.plain_dcc),
                median(&s.enhanced_dcc),
                median(&s.move_distance),
            ]);
        }
        out.push_str(&columns(&rows));
    }
    out
}

const STYLE: &str = "body{font-family:sans-serif;margin:2em}\
table{border-collapse:collapse;font-family:monospace;font-size:13px}\
td{padding:0 .6em;white-space:pre;vertical-align:top}\
.MODIFIED{background:#fff5b1}.ADDED{background:#e6ffed}.REMOVED{background:#ffeef0}\
.hl{background:#fff5b1}.refactoring{border:1px solid #ccc;margin:1em 0;padding:.5em 1em}\
h3{font-size:15px}";

fn cell(text: Option<&str>) -> String {
    encode_text(text.unwrap_or("").trim_end_matches(['\n', '\r'])).into_owned()
}

fn html_refactoring(out: &mut String, p: &PairReport, a: &AnalyzedRefactoring) {
    let r = &a.refactoring;
    let _ = write!(
        out,
        "<div class=\"refactoring\" id=\"{}\"><h3>{} — {} — {} → {}</h3>",
        encode_text(&r.id),
        encode_text(r.kind.title()),
        encode_text(&r.description),
        encode_text(&r.before_anchor.to_string()),
        encode_text(&r.after_anchor.to_string()),
    );
    if let Some(d) = dcc_of(p, &r.id) {
        let _ = write!(
            out,
            "<p>diff churn {} lines; refactoring-aware churn {} lines</p>",
            d.plain.total, d.enhanced.total
        );
    }
    if let Some(sig) = &a.aligned.signature_delta {
        let _ = write!(
            out,
            "<p>signature: <code>{}</code> → <code>{}</code></p>",
            encode_text(&sig.before.to_string()),
            encode_text(&sig.after.to_string())
        );
    }
    out.push_str("<table>");
    for row in &a.aligned.rows {
        let class = match row.status {
            RowStatus::Unchanged => "UNCHANGED",
            RowStatus::Modified => "MODIFIED",
            RowStatus::Added => "ADDED",
            RowStatus::Removed => "REMOVED",
        };
        let _ = write!(
            out,
            "<tr class=\"{class}\"><td>{}</td><td>{}</td></tr>",
            cell(row.left.as_deref()),
            cell(row.right.as_deref())
        );
    }
    out.push_str("</table>");
    if let Some(body) = &a.aligned.extracted_body {
        let label = match body.origin {
            ExtractedOrigin::Extracted => "extracted code",
            ExtractedOrigin::Inlined => "inlined code",
        };
        let _ = write!(out, "<p>{label}</p><table>");
        for line in &body.lines {
            let class = if line.highlighted() {
                " class=\"hl\""
            } else {
                ""
            };
            let _ = write!(out, "<tr{class}><td>{}</td></tr>", cell(Some(&line.text)));
        }
        out.push_str("</table>");
    }
    out.push_str("</div>\n");
}

/// Self-contained static page; no scripts, no external resources.
pub fn html(report: &AnalysisReport) -> String {
    let title = format!("{} / {}", report.repo_id, report.change_set_id);
    let mut out = format!(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>{t}</title><style>{STYLE}</style></head><body>\n<h1>{t}</h1>\n",
        t = encode_text(&title)
    );
    for p in &report.pairs {
        let _ = writeln!(
            out,
            "<h2>{} ({} refactorings)</h2>",
            encode_text(&pair_heading(p)),
            p.refactorings.len()
        );
        for a in &p.refactorings {
            html_refactoring(&mut out, p, a);
        }
    }
    out.push_str("</body></html>\n");
    out
}
