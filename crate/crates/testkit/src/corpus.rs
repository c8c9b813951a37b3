//! Seeded Go codebases and scripted refactorings with known ground truth.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use refaware_core::{FileChange, Refactoring, RefactoringKind};

const SYLLABLES: [&str; 24] = [
    "ba", "co", "di", "fu", "ga", "he", "ji", "ko", "lu", "ma", "ne", "po", "qui", "ri", "sa",
    "te", "vi", "wo", "xa", "yu", "ze", "tor", "len", "mar",
];
const VERBS: [&str; 10] = [
    "compute", "build", "merge", "scan", "render", "apply", "collect", "resolve", "gather", "shape",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    /// Lines relative to the function body indentation.
    pub lines: Vec<String>,
    pub simple: bool,
}

impl Stmt {
    fn simple(line: String) -> Self {
        Self {
            lines: vec![line],
            simple: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Func {
    pub name: String,
    /// `(variable, type)`.
    pub receiver: Option<(String, String)>,
    pub params: Vec<(String, String)>,
    pub results: Vec<String>,
    pub body: Vec<Stmt>,
    /// Local variable names `(int total, string name, int rest)`.
    pub locals: (String, String, String),
}

impl Func {
    pub fn render(&self) -> String {
        let mut s = String::from("func ");
        if let Some((v, t)) = &self.receiver {
            s.push_str(&format!("({v} *{t}) "));
        }
        s.push_str(&self.name);
        s.push('(');
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(n, t)| format!("{n} {t}"))
            .collect();
        s.push_str(&params.join(", "));
        s.push(')');
        match self.results.len() {
            0 => {}
            1 => s.push_str(&format!(" {}", self.results[0])),
            _ => s.push_str(&format!(" ({})", self.results.join(", "))),
        }
        s.push_str(" {\n");
        for stmt in &self.body {
            for line in &stmt.lines {
                s.push('\t');
                s.push_str(line);
                s.push('\n');
            }
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub fields: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoFile {
    pub path: String,
    pub types: Vec<TypeDecl>,
    pub funcs: Vec<Func>,
}

impl GoFile {
    pub fn render(&self) -> String {
        let mut s = String::from("package svc\n\nimport (\n\t\"fmt\"\n\t\"strings\"\n)\n");
        for t in &self.types {
            s.push_str(&format!("\ntype {} struct {{\n", t.name));
            for (f, ty) in &t.fields {
                s.push_str(&format!("\t{f} {ty}\n"));
            }
            s.push_str("}\n");
        }
        for f in &self.funcs {
            s.push('\n');
            s.push_str(&f.render());
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebase {
    pub files: Vec<GoFile>,
}

impl Codebase {
    pub fn render(&self) -> BTreeMap<String, String> {
        self.files
            .iter()
            .map(|f| (f.path.clone(), f.render()))
            .collect()
    }

    pub fn lines_of_code(&self) -> usize {
        self.render().values().map(|t| t.lines().count()).sum()
    }
}

/// One refactoring as the generator applied it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Expected {
    pub kind: RefactoringKind,
    /// Moved/renamed element before; the host for EXTRACT; the removed function for INLINE.
    pub before_name: String,
    /// Element after; the new function for EXTRACT; the host for INLINE.
    pub after_name: String,
}

impl Expected {
    pub fn new(kind: RefactoringKind, before: &str, after: &str) -> Self {
        Self {
            kind,
            before_name: before.into(),
            after_name: after.into(),
        }
    }

    /// Projects a detected refactoring onto the same shape for comparison.
    pub fn observed(r: &Refactoring) -> Self {
        let name = |e: &Option<refaware_core::CodeElement>| {
            e.as_ref().map(|e| e.name.clone()).unwrap_or_default()
        };
        match r.kind {
            RefactoringKind::ExtractFunction => Self {
                kind: r.kind,
                before_name: name(&r.before_element),
                after_name: name(&r.extracted_element),
            },
            RefactoringKind::InlineFunction => Self {
                kind: r.kind,
                before_name: name(&r.extracted_element),
                after_name: name(&r.after_element),
            },
            _ => Self {
                kind: r.kind,
                before_name: name(&r.before_element),
                after_name: name(&r.after_element),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Script {
    MoveFunction,
    MoveMethod,
    MoveAndRename,
    RenameFunction,
    RenameType,
    MoveType,
    Extract,
    Inline,
    ChangeSignature,
    PureAddition,
}

impl Script {
    pub const REFACTORINGS: [Script; 9] = [
        Script::MoveFunction,
        Script::MoveMethod,
        Script::MoveAndRename,
        Script::RenameFunction,
        Script::RenameType,
        Script::MoveType,
        Script::Extract,
        Script::Inline,
        Script::ChangeSignature,
    ];
}

/// A before/after snapshot pair and the refactorings separating them.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub before: BTreeMap<String, String>,
    pub after: BTreeMap<String, String>,
    pub expected: Vec<Expected>,
    /// Token churn of the edits made on top of the refactoring, as a fraction.
    pub post_edit_churn: f64,
}

impl Instance {
    pub fn changes(&self) -> Vec<FileChange> {
        snapshot_changes(&self.before, &self.after)
    }
}

/// Path-level changes between two snapshots, sorted by path.
pub fn snapshot_changes(
    before: &BTreeMap<String, String>,
    after: &BTreeMap<String, String>,
) -> Vec<FileChange> {
    let paths: BTreeSet<&String> = before.keys().chain(after.keys()).collect();
    paths
        .into_iter()
        .filter_map(|p| match (before.get(p), after.get(p)) {
            (Some(b), Some(a)) if a != b => Some(FileChange::modified(p, b, a)),
            (Some(_), Some(_)) => None,
            (Some(b), None) => Some(FileChange::deleted(p, b)),
            (None, Some(a)) => Some(FileChange::added(p, a)),
            (None, None) => None,
        })
        .collect()
}

pub struct Generator {
    rng: ChaCha8Rng,
    used: BTreeSet<String>,
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            used: BTreeSet::new(),
        }
    }

    /// Fresh pronounceable word never returned before by this generator.
    pub fn word(&mut self) -> String {
        loop {
            let n = self.rng.gen_range(2..=3);
            let w: String = (0..n)
                .map(|_| *SYLLABLES.choose(&mut self.rng).unwrap())
                .collect();
            if self.used.insert(w.clone()) {
                return w;
            }
        }
    }

    fn k(&mut self) -> u32 {
        self.rng.gen_range(2..97)
    }

    pub fn func(&mut self, receiver: Option<(String, String)>) -> Func {
        let stem = capitalize(&self.word());
        let verb = *VERBS.choose(&mut self.rng).unwrap();
        let name = format!("{verb}{stem}");
        let pw = self.word();
        let (cnt, lbl) = (format!("{pw}Count"), format!("{pw}Label"));
        let low = stem.to_lowercase();
        let (t, s, u) = (
            format!("{low}Total"),
            format!("{low}Name"),
            format!("{low}Rest"),
        );
        let word = self.word();
        let (k1, k2, k3, k4, k5, k6) = (self.k(), self.k(), self.k(), self.k(), self.k(), self.k());

        let mut body = vec![
            Stmt::simple(format!("{t} := {cnt} * {k1}")),
            Stmt::simple(format!("{s} := strings.ToUpper({lbl})")),
            Stmt::simple(format!("{t} += len({s}) + {k2}")),
        ];
        let mut blocks = vec![
            Stmt {
                lines: vec![
                    format!("if {t} > {k3} {{"),
                    format!("\t{t} -= {k4}"),
                    "}".into(),
                ],
                simple: false,
            },
            Stmt {
                lines: vec![
                    format!("for i := 0; i < {cnt}; i++ {{"),
                    format!("\t{t} += i * {k5}"),
                    "}".into(),
                ],
                simple: false,
            },
        ];
        blocks.shuffle(&mut self.rng);
        body.extend(blocks);
        if self.rng.gen_bool(0.5) {
            let k = self.k();
            body.push(Stmt::simple(format!("{t} = {t} ^ {k}")));
        }
        body.push(Stmt::simple(format!(
            "{s} = fmt.Sprintf(\"%s-%d\", {s}, {t})"
        )));
        body.push(Stmt::simple(format!("{u} := {t} % {k6}")));
        body.push(Stmt::simple(format!("fmt.Println(\"{word}\", {s}, {u})")));
        body.push(Stmt {
            lines: vec![format!("return {t} + {u}")],
            simple: false,
        });

        Func {
            name,
            receiver,
            params: vec![(cnt, "int".into()), (lbl, "string".into())],
            results: vec!["int".into()],
            body,
            locals: (t, s, u),
        }
    }

    pub fn type_decl(&mut self) -> TypeDecl {
        let name = capitalize(&self.word());
        let fields = vec![
            (self.word(), "int".into()),
            (self.word(), "string".into()),
            (self.word(), "[]byte".into()),
        ];
        TypeDecl { name, fields }
    }

    /// `files` files, each with one struct, two of its methods and two plain functions.
    pub fn codebase(&mut self, files: usize) -> Codebase {
        let mut out = Vec::new();
        for _ in 0..files {
            let path = format!("svc/{}.go", self.word());
            let t = self.type_decl();
            let recv = t.name.to_lowercase().chars().next().unwrap().to_string();
            let funcs = vec![
                self.func(Some((recv.clone(), t.name.clone()))),
                self.func(None),
                self.func(Some((recv, t.name.clone()))),
                self.func(None),
            ];
            out.push(GoFile {
                path,
                types: vec![t],
                funcs,
            });
        }
        Codebase { files: out }
    }

    fn pick_func(
        &mut self,
        cb: &Codebase,
        touched: &BTreeSet<String>,
        want_method: Option<bool>,
    ) -> (usize, usize) {
        let mut candidates = Vec::new();
        for (fi, f) in cb.files.iter().enumerate() {
            for (gi, g) in f.funcs.iter().enumerate() {
                let owner_touched = g
                    .receiver
                    .as_ref()
                    .is_some_and(|(_, t)| touched.contains(t));
                if touched.contains(&g.name) || owner_touched {
                    continue;
                }
                if want_method.is_some_and(|m| m != g.receiver.is_some()) {
                    continue;
                }
                if g.body.iter().filter(|s| s.simple).count() < 4 {
                    continue;
                }
                candidates.push((fi, gi));
            }
        }
        *candidates
            .choose(&mut self.rng)
            .expect("an untouched function")
    }

    fn other_file(&mut self, cb: &Codebase, not: usize) -> usize {
        loop {
            let j = self.rng.gen_range(0..cb.files.len());
            if j != not {
                return j;
            }
        }
    }

    fn fresh_name(&mut self) -> String {
        let verb = *VERBS.choose(&mut self.rng).unwrap();
        format!("{verb}{}", capitalize(&self.word()))
    }

    /// Changes one constant in the first statement; returns the token churn it adds.
    fn small_edit(&mut self, f: &mut Func) -> f64 {
        if self.rng.gen_bool(0.5) {
            return 0.0;
        }
        let line = &mut f.body[0].lines[0];
        let k = self.rng.gen_range(100..999);
        let (head, _) = line.rsplit_once(' ').unwrap();
        *line = format!("{head} {k}");
        2.0 / token_total(&f.render()) as f64
    }

    /// Applies `script` to `cb` in place, avoiding anything in `touched`.
    /// Returns the ground truth and the post-edit churn.
    pub fn apply(
        &mut self,
        cb: &mut Codebase,
        script: Script,
        touched: &mut BTreeSet<String>,
    ) -> (Vec<Expected>, f64) {
        match script {
            Script::MoveFunction | Script::MoveAndRename => {
                let (fi, gi) = self.pick_func(cb, touched, Some(false));
                let mut f = cb.files[fi].funcs.remove(gi);
                let old = f.name.clone();
                let churn = self.small_edit(&mut f);
                let kind = if script == Script::MoveAndRename {
                    f.name = self.fresh_name();
                    RefactoringKind::MoveAndRenameFunction
                } else {
                    RefactoringKind::MoveFunction
                };
                touched.insert(old.clone());
                touched.insert(f.name.clone());
                let to = self.other_file(cb, fi);
                let new = f.name.clone();
                cb.files[to].funcs.push(f);
                (vec![Expected::new(kind, &old, &new)], churn)
            }
            Script::MoveMethod => {
                let (fi, gi) = self.pick_func(cb, touched, Some(true));
                let to = self.other_file(cb, fi);
                let Some(target) = cb.files[to].types.first().cloned() else {
                    panic!("target file has a type")
                };
                let mut f = cb.files[fi].funcs.remove(gi);
                let churn = self.small_edit(&mut f);
                let var = target
                    .name
                    .to_lowercase()
                    .chars()
                    .next()
                    .unwrap()
                    .to_string();
                f.receiver = Some((var, target.name.clone()));
                touched.insert(f.name.clone());
                let name = f.name.clone();
                let at = self.rng.gen_range(0..=cb.files[to].funcs.len());
                cb.files[to].funcs.insert(at, f);
                (
                    vec![Expected::new(RefactoringKind::MoveFunction, &name, &name)],
                    churn,
                )
            }
            Script::RenameFunction => {
                let (fi, gi) = self.pick_func(cb, touched, None);
                let old = cb.files[fi].funcs[gi].name.clone();
                let new = self.fresh_name();
                let f = &mut cb.files[fi].funcs[gi];
                f.name = new.clone();
                touched.insert(old.clone());
                touched.insert(new.clone());
                (
                    vec![Expected::new(RefactoringKind::RenameFunction, &old, &new)],
                    0.0,
                )
            }
            Script::ChangeSignature => {
                let (fi, gi) = self.pick_func(cb, touched, None);
                let variant = self.rng.gen_range(0..3);
                let extra = format!("{}Extra", self.word());
                let f = &mut cb.files[fi].funcs[gi];
                touched.insert(f.name.clone());
                let churn;
                match variant {
                    0 => {
                        f.params.push((extra.clone(), "int".into()));
                        let first = &mut f.body[0].lines[0];
                        first.push_str(&format!(" + {extra}"));
                        churn = 2.0 / token_total(&f.render()) as f64;
                    }
                    1 => {
                        f.params[0].1 = "int64".into();
                        churn = 0.0;
                    }
                    _ => {
                        f.results = vec!["int".into(), "error".into()];
                        let ret = f.body.last_mut().unwrap();
                        ret.lines[0].push_str(", nil");
                        churn = 2.0 / token_total(&f.render()) as f64;
                    }
                }
                let name = f.name.clone();
                (
                    vec![Expected::new(
                        RefactoringKind::ChangeSignature,
                        &name,
                        &name,
                    )],
                    churn,
                )
            }
            Script::RenameType | Script::MoveType => {
                let candidates: Vec<(usize, String)> = cb
                    .files
                    .iter()
                    .enumerate()
                    .flat_map(|(fi, f)| f.types.iter().map(move |t| (fi, t.name.clone())))
                    .filter(|(fi, t)| {
                        !touched.contains(t)
                            && !cb.files[*fi].funcs.iter().any(|g| {
                                g.receiver.as_ref().is_some_and(|(_, r)| r == t)
                                    && touched.contains(&g.name)
                            })
                    })
                    .collect();
                let (fi, old) = candidates
                    .choose(&mut self.rng)
                    .expect("untouched type")
                    .clone();
                touched.insert(old.clone());
                if script == Script::RenameType {
                    let new = format!("{old}{}", capitalize(&self.word()));
                    touched.insert(new.clone());
                    for f in &mut cb.files {
                        for t in &mut f.types {
                            if t.name == old {
                                t.name = new.clone();
                            }
                        }
                        for g in &mut f.funcs {
                            if let Some((_, r)) = &mut g.receiver {
                                if *r == old {
                                    *r = new.clone();
                                }
                            }
                        }
                    }
                    (
                        vec![Expected::new(RefactoringKind::RenameType, &old, &new)],
                        0.0,
                    )
                } else {
                    let t = {
                        let ti = cb.files[fi]
                            .types
                            .iter()
                            .position(|t| t.name == old)
                            .unwrap();
                        cb.files[fi].types.remove(ti)
                    };
                    let (methods, rest): (Vec<Func>, Vec<Func>) =
                        std::mem::take(&mut cb.files[fi].funcs)
                            .into_iter()
                            .partition(|g| g.receiver.as_ref().is_some_and(|(_, r)| *r == old));
                    cb.files[fi].funcs = rest;
                    for m in &methods {
                        touched.insert(m.name.clone());
                    }
                    let path = format!("svc/{}.go", self.word());
                    cb.files.push(GoFile {
                        path,
                        types: vec![t],
                        funcs: methods,
                    });
                    (
                        vec![Expected::new(RefactoringKind::MoveType, &old, &old)],
                        0.0,
                    )
                }
            }
            Script::Extract => {
                let (fi, gi) = self.pick_func(cb, touched, None);
                let helper = self.extract_in_place(cb, fi, gi);
                let host = cb.files[fi].funcs[gi].name.clone();
                touched.insert(host.clone());
                touched.insert(helper.clone());
                (
                    vec![Expected::new(
                        RefactoringKind::ExtractFunction,
                        &host,
                        &helper,
                    )],
                    0.0,
                )
            }
            Script::Inline => {
                // the caller sets up the "before" state; see `inline_instance`
                unreachable!("inline is built by reversing an extraction")
            }
            Script::PureAddition => {
                let fi = self.rng.gen_range(0..cb.files.len());
                let f = self.func(None);
                cb.files[fi].funcs.push(f);
                let t = self.type_decl();
                let recv = t.name.to_lowercase().chars().next().unwrap().to_string();
                let funcs = vec![self.func(Some((recv, t.name.clone()))), self.func(None)];
                let path = format!("svc/{}.go", self.word());
                cb.files.push(GoFile {
                    path,
                    types: vec![t],
                    funcs,
                });
                (Vec::new(), 0.0)
            }
        }
    }

    /// Moves the three trailing simple statements of a function into a new
    /// helper placed right after it; returns the helper's name.
    fn extract_in_place(&mut self, cb: &mut Codebase, fi: usize, gi: usize) -> String {
        let helper_name = format!("{}Part", self.fresh_name());
        let host = &mut cb.files[fi].funcs[gi];
        let (t, s, u) = host.locals.clone();
        let ret = host.body.len() - 1;
        let block: Vec<Stmt> = host.body.drain(ret - 3..ret).collect();
        host.body.insert(
            ret - 3,
            Stmt::simple(format!("{u} := {helper_name}({s}, {t})")),
        );
        let mut body = block;
        body.push(Stmt {
            lines: vec![format!("return {u}")],
            simple: false,
        });
        let helper = Func {
            name: helper_name.clone(),
            receiver: None,
            params: vec![(s.clone(), "string".into()), (t.clone(), "int".into())],
            results: vec!["int".into()],
            body,
            locals: (t, s, u),
        };
        cb.files[fi].funcs.insert(gi + 1, helper);
        helper_name
    }

    fn extract_target(&mut self, cb: &Codebase, touched: &BTreeSet<String>) -> (usize, usize) {
        self.pick_func(cb, touched, None)
    }
}

fn token_total(text: &str) -> u64 {
    refaware_core::golang::tokenize(text).total()
}

/// One instance of `script` on a fresh base codebase.
pub fn instance(seed: u64, script: Script) -> Instance {
    let mut g = Generator::new(seed);
    let mut base = g.codebase(4);
    let mut touched = BTreeSet::new();
    let (before, after, expected, churn) = if script == Script::Inline {
        let (fi, gi) = g.extract_target(&base, &touched);
        let host = base.files[fi].funcs[gi].name.clone();
        let mut pre = base.clone();
        let helper = g.extract_in_place(&mut pre, fi, gi);
        let expected = vec![Expected::new(
            RefactoringKind::InlineFunction,
            &helper,
            &host,
        )];
        (pre, base, expected, 0.0)
    } else {
        let before = base.clone();
        let (expected, churn) = g.apply(&mut base, script, &mut touched);
        (before, base, expected, churn)
    };
    Instance {
        name: format!("{script:?}#{seed}"),
        before: before.render(),
        after: after.render(),
        expected,
        post_edit_churn: churn,
    }
}

/// `per_script` instances of every refactoring script.
pub fn scripted_corpus(seed: u64, per_script: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    for (si, script) in Script::REFACTORINGS.iter().enumerate() {
        for k in 0..per_script {
            out.push(instance(seed ^ ((si as u64) << 32 | k as u64), *script));
        }
    }
    out
}

/// Pure additions: new functions and a new file, nothing removed or changed.
pub fn pure_additions(seed: u64, count: usize) -> Vec<Instance> {
    (0..count)
        .map(|k| instance(seed.wrapping_add(k as u64 * 7919), Script::PureAddition))
        .collect()
}

/// A change set carrying eleven distinct refactorings in one diff.
pub fn eleven_refactorings(seed: u64) -> Instance {
    let mut g = Generator::new(seed);
    let mut base = g.codebase(8);
    let mut touched = BTreeSet::new();

    let (fi, gi) = g.extract_target(&base, &touched);
    let host = base.files[fi].funcs[gi].name.clone();
    let mut before = base.clone();
    let helper = g.extract_in_place(&mut before, fi, gi);
    touched.insert(host.clone());
    touched.insert(helper.clone());
    let mut expected = vec![Expected::new(
        RefactoringKind::InlineFunction,
        &helper,
        &host,
    )];

    for script in [
        Script::MoveFunction,
        Script::MoveMethod,
        Script::MoveAndRename,
        Script::RenameFunction,
        Script::RenameType,
        Script::MoveType,
        Script::Extract,
        Script::ChangeSignature,
        Script::ChangeSignature,
        Script::MoveFunction,
    ] {
        let (e, _) = g.apply(&mut base, script, &mut touched);
        expected.extend(e);
    }
    expected.sort();
    Instance {
        name: format!("eleven#{seed}"),
        before: before.render(),
        after: base.render(),
        expected,
        post_edit_churn: 0.0,
    }
}

/// A change set touching every function of a `files`-file codebase of at least
/// `min_lines` lines, plus a move, a rename and an extraction.
pub fn bulk_edit(seed: u64, files: usize, min_lines: usize) -> Instance {
    let mut g = Generator::new(seed);
    let mut cb = g.codebase(files);
    let mut i = 0;
    while cb.lines_of_code() < min_lines {
        let f = g.func(None);
        cb.files[i % files].funcs.push(f);
        i += 1;
    }
    let before = cb.clone();
    let mut touched = BTreeSet::new();
    let mut expected = Vec::new();
    for script in [
        Script::MoveFunction,
        Script::RenameFunction,
        Script::Extract,
    ] {
        expected.extend(g.apply(&mut cb, script, &mut touched).0);
    }
    for f in cb.files.iter_mut().flat_map(|f| f.funcs.iter_mut()) {
        if touched.contains(&f.name) {
            continue;
        }
        let line = &mut f.body[0].lines[0];
        line.push_str(" + 1");
    }
    expected.sort();
    Instance {
        name: format!("bulk#{seed}"),
        before: before.render(),
        after: cb.render(),
        expected,
        post_edit_churn: 0.0,
    }
}
