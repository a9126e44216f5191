//! The fixture corpus: each case is a command line and its expected exit code.

#![allow(dead_code)]

use std::path::PathBuf;

pub struct Case {
    pub name: &'static str,
    pub fixture: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

const fn case(name: &'static str, fixture: &'static str, args: &'static [&'static str], exit: i32) -> Case {
    Case { name, fixture, args, exit }
}

pub const CASES: &[Case] = &[
    case("tangent_axioms", "tangent", &["check-axioms", "--algebroid", "tangent"], 0),
    case("cotangent_axioms", "cotangent", &["check-axioms", "--algebroid", "cotangent"], 0),
    case("degenerate_axioms", "degenerate_poisson", &["check-axioms", "--algebroid", "cotangent"], 0),
    case("courant_axioms", "courant", &["check-courant"], 0),
    case("dirac_standard", "dirac_standard", &["check-dirac", "--trials", "3"], 0),
    case("dirac_unpaired", "dirac_unpaired", &["check-dirac", "--trials", "3"], 1),
    case("dirac_nonclosed", "dirac_nonclosed", &["check-dirac", "--target", "w", "--trials", "3"], 1),
    case("weak_closed", "weak_closed", &["check-weak-symplectic", "--target", "w"], 0),
    case("weak_degenerate", "weak_degenerate", &["check-weak-symplectic", "--target", "w"], 1),
    case("weak_nonclosed", "dirac_nonclosed", &["check-weak-symplectic", "--target", "w"], 1),
    case("d_closed", "standard", &["d", "--target", "a"], 0),
    case("d_form", "standard", &["d", "--target", "b ^^ c"], 0),
    case("lie", "standard", &["lie", "--field", "u", "--target", "c"], 0),
    case("poisson_bracket", "standard", &["bracket", "--left", "f", "--right", "g"], 0),
    case("schouten_bracket", "standard", &["bracket", "--left", "p", "--right", "v"], 0),
    case("oneform_bracket", "degenerate_poisson", &["bracket", "--left", "a", "--right", "b"], 0),
    case("dorfman_bracket", "courant", &["bracket", "--left", "s", "--right", "t", "--kind", "dorfman"], 0),
    case("sigma", "standard", &["sigma", "--target", "u ^^ v"], 0),
    case(
        "lp_cohomology",
        "standard",
        &["cohomology", "--complex", "lp", "--support", "0..3", "--degree", "3", "--grades", "0..2"],
        0,
    ),
    case("de_rham", "tangent", &["cohomology", "--complex", "ce-tangent", "--degree", "2", "--grades", "0..3"], 0),
    case("degenerate_cohomology", "degenerate_poisson", &["cohomology", "--grades", "0..1"], 0),
    case("theorem", "standard", &["theorem-check", "--trials", "50", "--seed", "7"], 0),
    case("too_large", "standard", &["cohomology", "--degree", "4", "--grades", "0..2", "--max-basis", "100"], 2),
    case("wrong_kind", "standard", &["lie", "--field", "f", "--target", "c"], 2),
    case("no_symplectic", "tangent", &["sigma", "--target", "u"], 2),
    case("bad_syntax", "bad_syntax", &["d", "--target", "x0"], 2),
    case("bad_unbound", "bad_unbound", &["d", "--target", "x0"], 2),
    case("bad_variance", "bad_variance", &["d", "--target", "x0"], 2),
    case("bad_undeclared", "bad_undeclared", &["d", "--target", "x0"], 2),
    case("bad_duplicate", "bad_duplicate", &["d", "--target", "x0"], 2),
];

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub fn fixture_path(name: &str) -> PathBuf {
    root().join("fixtures").join(format!("{name}.adsl"))
}

pub fn fixtures() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(root().join("fixtures"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "adsl"))
        .collect();
    v.sort();
    v
}

/// Runs a case in process with JSON output; returns `(stdout, stderr, code)`.
pub fn run_case(case: &Case) -> (String, String, i32) {
    let mut args: Vec<String> = vec!["algebroid".into()];
    args.extend(case.args.iter().map(|s| s.to_string()));
    args.push("--input".into());
    args.push(fixture_path(case.fixture).display().to_string());
    args.push("--format".into());
    args.push("json".into());
    algebroid_cli::execute(args)
}

/// The golden record of a case: the JSON report, or the diagnostic for errors.
pub fn golden_text(case: &Case, out: &str, err: &str) -> String {
    if out.is_empty() {
        // diagnostics may mention the absolute fixture path; keep only the message
        format!("exit {}\n{}", case.exit, err)
    } else {
        out.to_string()
    }
}

pub fn golden_path(case: &Case) -> PathBuf {
    root().join("golden").join(format!("{}.json", case.name))
}
