//! Small hand-written change sets with known outcomes.

use std::collections::BTreeMap;

use refaware_core::RefactoringKind;

use crate::corpus::{Expected, Instance};

fn snapshot(files: &[(&str, &str)]) -> BTreeMap<String, String> {
    files
        .iter()
        .map(|(p, t)| (p.to_string(), t.to_string()))
        .collect()
}

const A_HEAD: &str = "package demo\n\ntype A struct{ n int }\n";
const B_HEAD: &str = "package demo\n\ntype B struct{ n int }\n";

/// Five-line method `m1` moved from `A.go` to `B.go`; only its receiver line changes.
pub fn move_with_edit() -> Instance {
    let m1_a = "func (a *A) m1(v int) int {\n\tx := v * 2\n\ty := x + 1\n\treturn x + y\n}\n";
    let m1_b = "func (b *B) m1(v int) int {\n\tx := v * 2\n\ty := x + 1\n\treturn x + y\n}\n";
    Instance {
        name: "move-with-edit".into(),
        before: snapshot(&[("A.go", &format!("{A_HEAD}{m1_a}")), ("B.go", B_HEAD)]),
        after: snapshot(&[("A.go", A_HEAD), ("B.go", &format!("{B_HEAD}{m1_b}"))]),
        expected: vec![Expected::new(RefactoringKind::MoveFunction, "m1", "m1")],
        post_edit_churn: 0.0,
    }
}

/// Same as [`move_with_edit`] without touching any line of the method.
pub fn pure_move() -> Instance {
    let m1 = "func m1(v int) int {\n\tx := v * 2\n\ty := x + 1\n\treturn x + y\n}\n";
    Instance {
        name: "pure-move".into(),
        before: snapshot(&[("A.go", &format!("{A_HEAD}{m1}")), ("B.go", B_HEAD)]),
        after: snapshot(&[("A.go", A_HEAD), ("B.go", &format!("{B_HEAD}{m1}"))]),
        expected: vec![Expected::new(RefactoringKind::MoveFunction, "m1", "m1")],
        post_edit_churn: 0.0,
    }
}

/// `isEven` extracted from `m1`, with the type of one variable changed on the way.
pub fn extract_with_type_change() -> Instance {
    let before = "package demo\n\nimport \"fmt\"\n\n\
func m1(xs []int) int {\n\
\ttotal := 0\n\
\tfor _, x := range xs {\n\
\t\tvar y int = x\n\
\t\tfmt.Println(y % 2)\n\
\t\ttotal += x\n\
\t}\n\
\treturn total\n\
}\n";
    let after = "package demo\n\nimport \"fmt\"\n\n\
func m1(xs []int) int {\n\
\ttotal := 0\n\
\tfor _, x := range xs {\n\
\t\tisEven(x)\n\
\t\ttotal += x\n\
\t}\n\
\treturn total\n\
}\n\
\n\
func isEven(x int) {\n\
\tvar y float64 = x\n\
\tfmt.Println(y % 2)\n\
}\n";
    Instance {
        name: "extract-with-type-change".into(),
        before: snapshot(&[("A.go", before)]),
        after: snapshot(&[("A.go", after)]),
        expected: vec![Expected::new(
            RefactoringKind::ExtractFunction,
            "m1",
            "isEven",
        )],
        post_edit_churn: 0.0,
    }
}

/// A function renamed in place, body untouched.
pub fn rename_only() -> Instance {
    let body = "(v int) int {\n\tx := v * 2\n\treturn x + 7\n}\n";
    Instance {
        name: "rename-only".into(),
        before: snapshot(&[("A.go", &format!("package demo\n\nfunc scale{body}"))]),
        after: snapshot(&[("A.go", &format!("package demo\n\nfunc double{body}"))]),
        expected: vec![Expected::new(
            RefactoringKind::RenameFunction,
            "scale",
            "double",
        )],
        post_edit_churn: 0.0,
    }
}

/// A function whose body changes while name, place and signature stay.
pub fn in_place_edit() -> Instance {
    Instance {
        name: "in-place-edit".into(),
        before: snapshot(&[(
            "A.go",
            "package demo\n\nfunc scale(v int) int {\n\tx := v * 2\n\treturn x + 7\n}\n",
        )]),
        after: snapshot(&[(
            "A.go",
            "package demo\n\nfunc scale(v int) int {\n\tx := v * 3\n\treturn x - 7\n}\n",
        )]),
        expected: Vec::new(),
        post_edit_churn: 0.0,
    }
}
