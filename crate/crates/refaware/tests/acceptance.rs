//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use refaware::report::parse_report;
use refaware::{
    analyze, to_canonical, AnalysisReport, AnalyzeRequest, CommitSource, DocumentStore, FsStore,
    GitRepo, ReportKey,
};
use refaware_core::diff::{edit_script, EditOp};
use refaware_core::metrics::median;
use refaware_core::pipeline::analyze_changes;
use refaware_core::{
    apply_hunks, detect_changes, enumerate_pairs, line_diff, AdapterRegistry, DetectorConfig,
    PairLabel, RefactoringKind, RevisionRef,
};
use refaware_testkit::corpus::{
    bulk_edit, eleven_refactorings, pure_additions, scripted_corpus, Expected, Instance,
};
use refaware_testkit::{fixtures, FixtureRepo};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs the CLI `analyze` on a two-commit fixture repository built from `inst`.
fn cli_analyze(inst: &Instance) -> Result<(AnalysisReport, String, Duration), String> {
    let (fx, base, head) = FixtureRepo::from_instance(inst);
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_refaware"))
        .args(["analyze", "--repo"])
        .arg(fx.path())
        .args([
            "--base",
            &base,
            "--head",
            &head,
            "--repo-id",
            "fixture",
            "--change-set",
            "1",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let report = parse_report(text.as_bytes()).map_err(|e| e.to_string())?;
    Ok((report, text, elapsed))
}

fn move_with_one_edited_line() -> Outcome {
    let (report, _, elapsed) = cli_analyze(&fixtures::move_with_edit())?;
    let main = &report.pairs[0];
    ensure(main.refactorings.len() == 1, || {
        format!("{} refactorings", main.refactorings.len())
    })?;
    let r = &main.refactorings[0].refactoring;
    ensure(r.kind == RefactoringKind::MoveFunction, || {
        format!("kind {:?}", r.kind)
    })?;
    let d = &main.metrics.dcc[0];
    ensure(d.plain.total == 10 && d.enhanced.total == 2, || {
        format!("plain {} enhanced {}", d.plain.total, d.enhanced.total)
    })?;
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "one MOVE_FUNCTION ({}), plain DCC {} -> enhanced DCC {}, {:.2}s",
        r.description,
        d.plain.total,
        d.enhanced.total,
        elapsed.as_secs_f64()
    ))
}

fn extract_with_type_change() -> Outcome {
    let (report, _, elapsed) = cli_analyze(&fixtures::extract_with_type_change())?;
    let main = &report.pairs[0];
    ensure(main.refactorings.len() == 1, || {
        format!("{} refactorings", main.refactorings.len())
    })?;
    let a = &main.refactorings[0];
    ensure(
        a.refactoring.kind == RefactoringKind::ExtractFunction,
        || format!("kind {:?}", a.refactoring.kind),
    )?;
    let body = a
        .aligned
        .extracted_body
        .as_ref()
        .ok_or("no extracted body")?;
    let highlighted: Vec<_> = body.lines.iter().filter(|l| l.highlighted()).collect();
    ensure(highlighted.len() == 1, || {
        format!("{} highlighted lines", highlighted.len())
    })?;
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "one EXTRACT_FUNCTION, highlighted `{}`, {:.2}s",
        highlighted[0].text.trim(),
        elapsed.as_secs_f64()
    ))
}

fn commit_pair_enumeration() -> Outcome {
    let mut seen = Vec::new();
    for (n, want) in [(1usize, 1usize), (2, 3), (3, 4), (5, 6)] {
        let snaps: Vec<BTreeMap<String, String>> = (0..=n)
            .map(|i| {
                [("a.go".to_string(), format!("package a\n\nvar v = {i}\n"))]
                    .into_iter()
                    .collect()
            })
            .collect();
        let (fx, ids) = FixtureRepo::with_history(&snaps);
        let repo = GitRepo::open(fx.path()).map_err(|e| e.to_string())?;
        let report = analyze(
            &repo,
            &AnalyzeRequest {
                repo_id: "r".into(),
                change_set_id: n.to_string(),
                base: ids[0].clone(),
                commits: CommitSource::Range {
                    head: ids[n].clone(),
                },
                config: DetectorConfig::default(),
            },
        )
        .map_err(|e| e.to_string())?;
        ensure(report.pairs.len() == want, || {
            format!("n={n}: {} pairs", report.pairs.len())
        })?;
        let refs: Vec<RevisionRef> = ids
            .iter()
            .map(|id| RevisionRef {
                id: id.clone(),
                short_label: id[..7].to_string(),
            })
            .collect();
        let pairs = enumerate_pairs(&refs[0], &refs[1..]).map_err(|e| e.to_string())?;
        ensure(pairs.len() == want, || {
            format!("n={n}: enumerate gave {}", pairs.len())
        })?;
        seen.push(format!("{n}->{}", report.pairs.len()));
    }
    Ok(format!("commits->pairs {}", seen.join(", ")))
}

fn analyze_instance(inst: &Instance) -> refaware_core::pipeline::PairAnalysis {
    analyze_changes(
        &inst.changes(),
        PairLabel::Main,
        &AdapterRegistry::default(),
        &DetectorConfig::default(),
    )
    .expect("bodies retained")
}

fn median_and_churn_properties() -> Outcome {
    let table = [0.0, 40.0, 40.0, 40.0, 41.0, 466.0, 466.0, 474.0, 4870.0];
    let m = median(&table);
    ensure(m == Some(41.0), || format!("median {m:?}"))?;

    let mut corpus = scripted_corpus(2024, 6);
    corpus.push(eleven_refactorings(2024));
    corpus.push(fixtures::move_with_edit());
    corpus.push(fixtures::extract_with_type_change());
    let mut checked = 0;
    for inst in &corpus {
        for d in analyze_instance(inst).metrics.dcc {
            ensure(d.enhanced.total <= d.plain.total, || {
                format!("{}: {d:?}", inst.name)
            })?;
            checked += 1;
        }
    }
    let pure = analyze_instance(&fixtures::pure_move());
    let d = &pure.metrics.dcc[0];
    ensure(d.enhanced.total == 0 && d.plain.total == 10, || {
        format!("pure move {d:?}")
    })?;
    let mut pure_moves = 1;
    for inst in corpus.iter().filter(|i| i.post_edit_churn == 0.0) {
        let a = analyze_instance(inst);
        for (r, d) in a.refactorings.iter().zip(&a.metrics.dcc) {
            let body_kept = r.aligned.rows.iter().all(|row| row.left == row.right);
            if r.refactoring.kind == RefactoringKind::MoveFunction && body_kept {
                ensure(d.enhanced.total == 0, || {
                    format!("{}: pure move {d:?}", inst.name)
                })?;
                pure_moves += 1;
            }
        }
    }
    Ok(format!(
        "median 41; enhanced <= plain on {checked} refactorings; {pure_moves} pure moves at 0"
    ))
}

fn detect_names(inst: &Instance) -> Vec<Expected> {
    detect_changes(
        &inst.changes(),
        PairLabel::Main,
        &AdapterRegistry::default(),
        &DetectorConfig::default(),
    )
    .iter()
    .map(Expected::observed)
    .collect()
}

fn detection_corpus() -> Outcome {
    let mut corpus = scripted_corpus(77, 6);
    corpus.push(eleven_refactorings(77));
    let instances = corpus.len();
    ensure(instances >= 50, || format!("only {instances} instances"))?;
    let max_churn = corpus.iter().map(|i| i.post_edit_churn).fold(0.0, f64::max);
    ensure(max_churn <= 0.2, || format!("post-edit churn {max_churn}"))?;

    let (mut expected, mut recalled, mut located, mut kind_ok) = (0, 0, 0, 0);
    let mut misses = Vec::new();
    for inst in &corpus {
        let got = detect_names(inst);
        for e in &inst.expected {
            expected += 1;
            if got.contains(e) {
                recalled += 1;
            } else {
                misses.push(format!("{}: {e:?}", inst.name));
            }
            let same_elements = got
                .iter()
                .filter(|g| g.before_name == e.before_name && g.after_name == e.after_name);
            for g in same_elements {
                located += 1;
                if g.kind == e.kind {
                    kind_ok += 1;
                }
            }
        }
    }
    let recall = recalled as f64 / expected as f64;
    let accuracy = if located == 0 {
        0.0
    } else {
        kind_ok as f64 / located as f64
    };
    ensure(recall == 1.0, || {
        format!("recall {recall:.3}; missed {misses:?}")
    })?;
    ensure(accuracy == 1.0, || format!("kind accuracy {accuracy:.3}"))?;

    let additions = pure_additions(77, 10);
    let false_positives: usize = additions.iter().map(|i| detect_names(i).len()).sum();
    ensure(false_positives == 0, || {
        format!("{false_positives} detections on pure additions")
    })?;
    Ok(format!(
        "{instances} instances, {expected} refactorings: recall {recall:.2}, kind accuracy {accuracy:.2}; \
         {} pure-addition fixtures, 0 detections",
        additions.len()
    ))
}

fn random_text(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(0..=12);
    let mut s: String = (0..n)
        .map(|_| ["a", "b", "c", "d", "", "a b"][rng.gen_range(0..6)])
        .collect::<Vec<_>>()
        .join("\n");
    if n > 0 && rng.gen_bool(0.7) {
        s.push('\n');
    }
    s
}

/// Minimal insert/delete count by dynamic programming over all prefixes.
fn dp_distance(a: &[&str], b: &[&str]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for i in 1..=a.len() {
        let mut cur = vec![i; b.len() + 1];
        for j in 1..=b.len() {
            cur[j] = if a[i - 1] == b[j - 1] {
                prev[j - 1]
            } else {
                1 + prev[j].min(cur[j - 1])
            };
        }
        prev = cur;
    }
    prev[b.len()]
}

fn diff_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for k in 0..1000 {
        let (a, b) = (random_text(&mut rng), random_text(&mut rng));
        let la: Vec<&str> = a.split_inclusive('\n').collect();
        let lb: Vec<&str> = b.split_inclusive('\n').collect();
        let edits = edit_script(&la, &lb)
            .iter()
            .filter(|op| !matches!(op, EditOp::Equal(..)))
            .count();
        let oracle = dp_distance(&la, &lb);
        ensure(edits == oracle, || {
            format!("pair {k}: script {edits} vs oracle {oracle}")
        })?;
        let rebuilt = apply_hunks(&a, &line_diff(&a, &b)).map_err(|e| e.to_string())?;
        ensure(rebuilt == b, || format!("pair {k}: round trip differs"))?;
    }
    Ok("1000 random pairs: minimal edit scripts, exact round trips".into())
}

fn determinism_and_round_trip() -> Outcome {
    let inst = eleven_refactorings(5);
    let (fx, base, head) = FixtureRepo::from_instance(&inst);
    let run = || -> Result<String, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_refaware"))
            .args(["analyze", "--repo"])
            .arg(fx.path())
            .args([
                "--base",
                &base,
                "--head",
                &head,
                "--repo-id",
                "demo",
                "--change-set",
                "9",
            ])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
        String::from_utf8(out.stdout).map_err(|e| e.to_string())
    };
    let (first, second) = (run()?, run()?);
    let normalize = |s: &str| -> Result<String, String> {
        Ok(to_canonical(
            &parse_report(s.as_bytes())
                .map_err(|e| e.to_string())?
                .normalized(),
        ))
    };
    ensure(normalize(&first)? == normalize(&second)?, || {
        "runs differ".into()
    })?;
    ensure(!first.contains('\r'), || "CR in canonical output".into())?;

    let report = parse_report(first.as_bytes()).map_err(|e| e.to_string())?;
    ensure(to_canonical(&report) == first, || {
        "canonical form not stable".into()
    })?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = FsStore::open(dir.path()).map_err(|e| e.to_string())?;
    store.store(&report).map_err(|e| e.to_string())?;
    let back = store
        .fetch(&ReportKey::of(&report))
        .map_err(|e| e.to_string())?;
    ensure(back == report, || "fetched report differs".into())?;
    ensure(to_canonical(&back) == first, || {
        "fetched bytes differ".into()
    })?;
    let rows: usize = report
        .pairs
        .iter()
        .flat_map(|p| &p.refactorings)
        .map(|a| a.aligned.rows.len())
        .sum();
    Ok(format!(
        "two runs identical ({} bytes, excluding created_at and timings); store/fetch equal incl. {rows} aligned rows",
        first.len()
    ))
}

fn throughput() -> Outcome {
    let inst = bulk_edit(10, 10, 1000);
    let lines: usize = inst.before.values().map(|t| t.lines().count()).sum();
    let changed = inst.changes().len();
    ensure(changed >= 10, || format!("only {changed} files changed"))?;
    let (report, _, elapsed) = cli_analyze(&inst)?;
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{lines} lines across {changed} files, {} refactorings, {:.2}s",
        report.pairs[0].refactorings.len(),
        elapsed.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("move with one edited line", move_with_one_edited_line),
        ("extract with type change", extract_with_type_change),
        ("commit-pair enumeration", commit_pair_enumeration),
        ("median and churn properties", median_and_churn_properties),
        ("detection corpus", detection_corpus),
        ("diff oracle", diff_oracle),
        (
            "determinism and store round trip",
            determinism_and_round_trip,
        ),
        ("throughput", throughput),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
