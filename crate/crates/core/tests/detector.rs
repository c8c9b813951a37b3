use proptest::prelude::*;
use refaware_core::detect::{match_with_weights, parse_changes};
use refaware_core::pipeline::analyze_changes;
use refaware_core::{
    detect_changes, idf_weights, similarity, AdapterRegistry, CodeElement, DetectorConfig,
    ElementKind, FileChange, PairLabel, Refactoring, RefactoringKind, RowStatus, TokenBag, Weights,
};
use refaware_testkit::corpus::snapshot_changes;
use refaware_testkit::fixtures;

fn detect(changes: &[FileChange]) -> Vec<Refactoring> {
    detect_changes(
        changes,
        PairLabel::Main,
        &AdapterRegistry::default(),
        &DetectorConfig::default(),
    )
}

fn bag(pairs: &[(&str, u32)]) -> TokenBag {
    let mut b = TokenBag::new();
    for (t, n) in pairs {
        b.add(t, *n);
    }
    b
}

#[test]
fn idf_of_ubiquitous_and_unique_tokens() {
    let mut corpus: Vec<TokenBag> = (0..10).map(|_| bag(&[("x", 1)])).collect();
    corpus[0].insert("rare");
    let w = idf_weights(&corpus, 1.0);
    assert!((w.get("x") - (1.0f64 + 10.0 / 11.0).ln()).abs() < 1e-12);
    assert!((w.get("x") - 0.6466).abs() < 1e-4);
    assert!((w.get("rare") - 6f64.ln()).abs() < 1e-12);
    assert!((w.get("rare") - 1.7918).abs() < 1e-4);
    assert!(w.get("rare") > w.get("x"));
}

#[test]
fn similarity_hand_values() {
    let u = Weights::unit();
    let a = bag(&[("x", 2), ("y", 1)]);
    let b = bag(&[("x", 1), ("y", 1), ("z", 1)]);
    assert_eq!(similarity(&a, &b, &u), 0.5);
    assert_eq!(similarity(&a, &a, &u), 1.0);
    assert_eq!(similarity(&a, &bag(&[("q", 3)]), &u), 0.0);
    assert_eq!(similarity(&TokenBag::new(), &TokenBag::new(), &u), 1.0);
}

fn token_bag() -> impl Strategy<Value = TokenBag> {
    prop::collection::btree_map("[a-e]", 1u32..5, 0..5).prop_map(|m| {
        let mut b = TokenBag::new();
        for (t, n) in m {
            b.add(&t, n);
        }
        b
    })
}

proptest! {
    #[test]
    fn similarity_is_symmetric_and_bounded(a in token_bag(), b in token_bag(), extra in token_bag()) {
        let w = idf_weights([&a, &b, &extra], 1.0);
        let s = similarity(&a, &b, &w);
        prop_assert_eq!(s, similarity(&b, &a, &w));
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(similarity(&a, &a, &w), 1.0);
    }

    #[test]
    fn similarity_ignores_weight_scale(a in token_bag(), b in token_bag(), k in 0.01f64..100.0) {
        let w = idf_weights([&a, &b], 1.0);
        let s1 = similarity(&a, &b, &w);
        let s2 = similarity(&a, &b, &w.scaled(k));
        prop_assert!((s1 - s2).abs() < 1e-9);
    }

    #[test]
    fn idf_weights_are_positive_and_monotone(bags in prop::collection::vec(token_bag(), 1..8)) {
        let w = idf_weights(&bags, 1.0);
        let df = |t: &str| bags.iter().filter(|b| b.contains(t)).count();
        for t in ["a", "b", "c", "d", "e"] {
            prop_assert!(w.get(t) > 0.0);
            for u in ["a", "b", "c", "d", "e"] {
                if df(t) > 0 && df(u) > 0 && df(t) < df(u) {
                    prop_assert!(w.get(t) > w.get(u));
                }
            }
        }
    }
}

/// Best achievable total similarity over all one-to-one assignments of same-kind
/// elements, with the list of assignments reaching it.
fn exhaustive_assignments(
    before: &[CodeElement],
    after: &[CodeElement],
    w: &Weights,
    tau: f64,
) -> (f64, Vec<Vec<(usize, usize)>>) {
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        before: &[CodeElement],
        after: &[CodeElement],
        w: &Weights,
        tau: f64,
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        acc: f64,
        best: &mut (f64, Vec<Vec<(usize, usize)>>),
    ) {
        if i == before.len() {
            if acc > best.0 + 1e-12 {
                *best = (acc, vec![cur.clone()]);
            } else if (acc - best.0).abs() <= 1e-12 {
                best.1.push(cur.clone());
            }
            return;
        }
        go(i + 1, before, after, w, tau, used, cur, acc, best);
        for j in 0..after.len() {
            if used[j] || after[j].kind != before[i].kind {
                continue;
            }
            let s = similarity(&before[i].tokens, &after[j].tokens, w);
            if s < tau {
                continue;
            }
            used[j] = true;
            cur.push((i, j));
            go(i + 1, before, after, w, tau, used, cur, acc + s, best);
            cur.pop();
            used[j] = false;
        }
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    go(
        0,
        before,
        after,
        w,
        tau,
        &mut vec![false; after.len()],
        &mut Vec::new(),
        0.0,
        &mut best,
    );
    best
}

#[test]
fn equal_candidates_resolve_to_the_nearer_line() {
    let body = "() {\n\twork(1)\n\twork(2)\n}\n";
    let before = format!("package p\n\nfunc f{body}");
    let after = format!("package p\n\nfunc g{body}{}\nfunc h{body}", "\n".repeat(25));
    let changes = vec![FileChange::modified("a.go", &before, &after)];
    let reg = AdapterRegistry::default();
    let cfg = DetectorConfig::default();
    let (b, a) = parse_changes(&changes, &reg);
    let w = idf_weights(b.iter().chain(&a).map(|e| &e.tokens), cfg.idf_smoothing);

    let fb: Vec<usize> = (0..b.len())
        .filter(|&i| b[i].kind == ElementKind::Function)
        .collect();
    let fa: Vec<usize> = (0..a.len())
        .filter(|&i| a[i].kind == ElementKind::Function)
        .collect();
    let fb_el: Vec<CodeElement> = fb.iter().map(|&i| b[i].clone()).collect();
    let fa_el: Vec<CodeElement> = fa.iter().map(|&i| a[i].clone()).collect();
    let (best, optimal) = exhaustive_assignments(&fb_el, &fa_el, &w, cfg.tau_match);
    assert!(optimal.len() >= 2, "fixture must contain a tie");

    let matches = match_with_weights(&b, &a, &w, &cfg);
    let greedy: Vec<(usize, usize)> = matches
        .iter()
        .filter(|m| b[m.before].kind == ElementKind::Function)
        .map(|m| {
            let bi = fb.iter().position(|&i| i == m.before).unwrap();
            let ai = fa.iter().position(|&i| i == m.after).unwrap();
            (bi, ai)
        })
        .collect();
    let total: f64 = greedy
        .iter()
        .map(|&(i, j)| similarity(&fb_el[i].tokens, &fa_el[j].tokens, &w))
        .sum();
    assert!((total - best).abs() < 1e-12);
    assert!(optimal.contains(&greedy));
    let distance = |asg: &Vec<(usize, usize)>| -> u32 {
        asg.iter()
            .map(|&(i, j)| fb_el[i].start_line.abs_diff(fa_el[j].start_line))
            .sum()
    };
    let nearest = optimal.iter().map(distance).min().unwrap();
    assert_eq!(distance(&greedy), nearest);
    assert_eq!(fa_el[greedy[0].1].name, "g");
    assert_eq!(match_with_weights(&b, &a, &w, &cfg), matches);
}

#[test]
fn unchanged_file_matches_itself() {
    let text = "package p\n\ntype T struct{}\n\nfunc (t T) M() int {\n\treturn 1\n}\n";
    let reg = AdapterRegistry::default();
    let changes = vec![FileChange::modified("a.go", text, text)];
    let (b, a) = parse_changes(&changes, &reg);
    let w = idf_weights(b.iter().chain(&a).map(|e| &e.tokens), 1.0);
    let m = match_with_weights(&b, &a, &w, &DetectorConfig::default());
    assert_eq!(m.len(), b.len());
    assert!(m.iter().all(|m| m.before == m.after && m.similarity == 1.0));
    assert!(detect(&changes).is_empty());
}

#[test]
fn cross_file_move_is_reported_once() {
    let inst = fixtures::move_with_edit();
    let found = detect(&inst.changes());
    assert_eq!(found.len(), 1);
    let r = &found[0];
    assert_eq!(r.kind, RefactoringKind::MoveFunction);
    assert_eq!(r.description, "method m1() moved");
    assert_eq!(
        (r.before_anchor.file.as_str(), r.before_anchor.line),
        ("A.go", 4)
    );
    assert_eq!(
        (r.after_anchor.file.as_str(), r.after_anchor.line),
        ("B.go", 4)
    );
}

#[test]
fn move_churn_drops_from_ten_to_two() {
    let inst = fixtures::move_with_edit();
    let out = analyze_changes(
        &inst.changes(),
        PairLabel::Main,
        &AdapterRegistry::default(),
        &DetectorConfig::default(),
    )
    .unwrap();
    assert_eq!(out.metrics.dcc.len(), 1);
    let d = &out.metrics.dcc[0];
    assert_eq!((d.plain.added, d.plain.deleted, d.plain.total), (5, 5, 10));
    assert_eq!(
        (d.enhanced.added, d.enhanced.deleted, d.enhanced.total),
        (1, 1, 2)
    );
    let rows = &out.refactorings[0].aligned.rows;
    assert_eq!(
        rows.iter()
            .filter(|r| r.status == RowStatus::Modified)
            .count(),
        1
    );
    assert_eq!(
        rows.iter()
            .filter(|r| r.status == RowStatus::Unchanged)
            .count(),
        4
    );
}

#[test]
fn pure_move_has_no_enhanced_churn() {
    let inst = fixtures::pure_move();
    let out = analyze_changes(
        &inst.changes(),
        PairLabel::Main,
        &AdapterRegistry::default(),
        &DetectorConfig::default(),
    )
    .unwrap();
    let d = &out.metrics.dcc[0];
    assert_eq!(d.plain.total, 10);
    assert_eq!(d.enhanced.total, 0);
}

#[test]
fn extraction_highlights_the_changed_line_only() {
    let inst = fixtures::extract_with_type_change();
    let out = analyze_changes(
        &inst.changes(),
        PairLabel::Main,
        &AdapterRegistry::default(),
        &DetectorConfig::default(),
    )
    .unwrap();
    assert_eq!(out.refactorings.len(), 1);
    let r = &out.refactorings[0];
    assert_eq!(r.refactoring.kind, RefactoringKind::ExtractFunction);
    assert_eq!(
        r.refactoring.extracted_element.as_ref().unwrap().name,
        "isEven"
    );
    let body = r.aligned.extracted_body.as_ref().unwrap();
    assert_eq!(body.highlighted_count(), 1);
    let hl: Vec<_> = body.lines.iter().filter(|l| l.highlighted()).collect();
    assert_eq!(hl[0].text.trim(), "var y float64 = x");
}

#[test]
fn extraction_churn_matches_hand_count() {
    // host: 2 lines removed, 1 call added; new function: 4 lines added plus its blank separator
    let inst = fixtures::extract_with_type_change();
    let out = analyze_changes(
        &inst.changes(),
        PairLabel::Main,
        &AdapterRegistry::default(),
        &DetectorConfig::default(),
    )
    .unwrap();
    let d = &out.metrics.dcc[0];
    assert_eq!((d.plain.added, d.plain.deleted), (6, 2));
    assert!(d.enhanced.total <= d.plain.total);
}

#[test]
fn in_place_edit_is_not_a_refactoring() {
    assert!(detect(&fixtures::in_place_edit().changes()).is_empty());
}

#[test]
fn rename_only_is_one_rename_and_no_move() {
    let found = detect(&fixtures::rename_only().changes());
    assert_eq!(found.len(), 1);
    assert_eq!(found[0].kind, RefactoringKind::RenameFunction);
    assert!(!found.iter().any(|r| r.kind.is_move()));
}

#[test]
fn moved_type_takes_its_methods_along() {
    let before = [(
        "svc/a.go".to_string(),
        "package svc\n\ntype Box struct {\n\tv int\n}\n\nfunc (b *Box) Get() int {\n\treturn b.v\n}\n\nfunc keep() {}\n".to_string(),
    )]
    .into_iter()
    .collect();
    let after = [
        ("svc/a.go".to_string(), "package svc\n\nfunc keep() {}\n".to_string()),
        (
            "svc/box.go".to_string(),
            "package svc\n\ntype Box struct {\n\tv int\n}\n\nfunc (b *Box) Get() int {\n\treturn b.v\n}\n".to_string(),
        ),
    ]
    .into_iter()
    .collect();
    let found = detect(&snapshot_changes(&before, &after));
    let kinds: Vec<_> = found.iter().map(|r| r.kind).collect();
    assert_eq!(kinds, vec![RefactoringKind::MoveType]);
}

#[test]
fn detection_is_deterministic_and_sorted() {
    let inst = refaware_testkit::corpus::eleven_refactorings(21);
    let a = detect(&inst.changes());
    let b = detect(&inst.changes());
    assert_eq!(a, b);
    let keys: Vec<_> = a.iter().map(|r| r.after_anchor.clone()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let mut ids: Vec<_> = a.iter().map(|r| r.id.clone()).collect();
    ids.dedup();
    assert_eq!(ids.len(), a.len());
}

#[test]
fn no_element_is_matched_twice() {
    let inst = refaware_testkit::corpus::eleven_refactorings(8);
    let reg = AdapterRegistry::default();
    let (b, a) = parse_changes(&inst.changes(), &reg);
    let w = idf_weights(b.iter().chain(&a).map(|e| &e.tokens), 1.0);
    let m = match_with_weights(&b, &a, &w, &DetectorConfig::default());
    let mut bs: Vec<_> = m.iter().map(|m| m.before).collect();
    let mut as_: Vec<_> = m.iter().map(|m| m.after).collect();
    bs.sort();
    bs.dedup();
    as_.sort();
    as_.dedup();
    assert_eq!(bs.len(), m.len());
    assert_eq!(as_.len(), m.len());
    for r in detect(&inst.changes()) {
        if r.kind.is_move() {
            let mover = r.before_element.as_ref().unwrap();
            assert!(!detect(&inst.changes()).iter().any(|x| {
                x.kind == RefactoringKind::ExtractFunction
                    && x.before_element.as_ref() == Some(mover)
            }));
        }
    }
}
