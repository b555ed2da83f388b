//! Runs the binary on the fixture files. Set `L0DUAL_BLESS=1` to rewrite
//! the golden reports.

use std::path::{Path, PathBuf};
use std::process::Command;

use l0dual::io::{
    emit_instance, emit_report, parse_instance, parse_instance_str, render_text, run, Command as Cmd, Format, Num,
    Report, RunOptions,
};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> PathBuf {
    fixtures().join(format!("{name}.json"))
}

fn cli(args: &[&str]) -> (Vec<u8>, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_l0dual")).args(args).output().unwrap();
    (out.stdout, String::from_utf8_lossy(&out.stderr).into_owned(), out.status.code().unwrap())
}

pub const GOLDEN: &[(&str, &str)] = &[
    ("fenchel_two_atoms", "solve"),
    ("fenchel_two_atoms", "check-optimality"),
    ("fenchel_two_atoms", "check-young-fenchel"),
    ("fenchel_two_atoms", "conjugate"),
    ("fenchel_wrong_certificate", "check-optimality"),
    ("regularity_failure", "solve"),
    ("regularity_failure", "probe-regularity"),
    ("vector_phenomenon", "solve"),
    ("minimal_quadratic", "solve"),
    ("fenchel_lagrange_interval", "solve"),
    ("fenchel_lagrange_interval", "check-optimality"),
    ("portfolio_entropic", "solve"),
];

#[test]
fn golden_reports_across_thread_counts() {
    let bless = std::env::var_os("L0DUAL_BLESS").is_some();
    for (name, cmd) in GOLDEN {
        let path = fixture(name);
        let golden = fixtures().join("golden").join(format!("{name}.{cmd}.json"));
        let mut outputs = vec![];
        for threads in ["1", "2", "8"] {
            let (out, err, _) = cli(&["--instance", path.to_str().unwrap(), "--command", cmd, "--threads", threads]);
            assert!(err.is_empty(), "{name} {cmd}: {err}");
            outputs.push(out);
        }
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{name} {cmd} differs across threads");
        if bless {
            std::fs::write(&golden, &outputs[0]).unwrap();
        }
        let expect = std::fs::read(&golden).unwrap_or_else(|_| panic!("missing golden {}", golden.display()));
        assert_eq!(outputs[0], expect, "{name} {cmd} golden mismatch");
    }
}

#[test]
fn exit_codes() {
    let f = fixture("fenchel_two_atoms");
    let f = f.to_str().unwrap();
    assert_eq!(cli(&["--instance", f, "--command", "solve"]).2, 0);
    let w = fixture("fenchel_wrong_certificate");
    let (out, _, code) = cli(&["--instance", w.to_str().unwrap(), "--command", "check-optimality", "--format", "text"]);
    assert_eq!(code, 1);
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("residual (ii) 1"), "{text}");
    let r = fixture("regularity_failure");
    assert_eq!(cli(&["--instance", r.to_str().unwrap(), "--command", "probe-regularity"]).2, 1);
    assert_eq!(cli(&["--instance", f, "--command", "nonsense"]).2, 2);
    assert_eq!(cli(&["--instance", "/nonexistent.json", "--command", "solve"]).2, 2);
    assert_eq!(cli(&["--instance", f, "--command", "solve", "--grid", "1:0:3"]).2, 2);
    let q = fixture("minimal_quadratic");
    let (_, err, code) = cli(&["--instance", q.to_str().unwrap(), "--command", "check-optimality"]);
    assert_eq!(code, 2);
    assert!(err.contains("certificate.x"));
}

#[test]
fn grid_and_tol_flags() {
    let f = fixture("fenchel_two_atoms");
    let (out, _, code) = cli(&[
        "--instance",
        f.to_str().unwrap(),
        "--command",
        "check-moreau-rockafellar",
        "--grid=-1:1:5",
        "--tol",
        "1e-6",
    ]);
    assert_eq!(code, 0);
    let r: Report = serde_json::from_slice(&out).unwrap();
    assert_eq!(r.tol, Num(1e-6));
    match &r.results[0] {
        l0dual::io::Section::MoreauRockafellar { rows, .. } => {
            let ys: Vec<f64> = rows.iter().map(|row| row.y[0][0].0).collect();
            assert_eq!(ys, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        }
        s => panic!("{s:?}"),
    }
}

#[test]
fn parse_examples() {
    let inst = parse_instance(&fixture("minimal_quadratic")).unwrap();
    assert_eq!(inst.file.scheme, l0dual::io::Scheme::Generic);
    assert_eq!(inst.space.atom_count(), 1);

    let inst = parse_instance(&fixture("fenchel_two_atoms")).unwrap();
    assert!(inst.perturbation.is_some());
    assert_eq!(inst.f.as_ref().unwrap().atom_count(), 2);

    let bad = r#"{"space": {"uniform": 1}, "scheme": "fenchel_lagrange",
        "functions": {"h": {"type": "pwl", "breakpoints": [0, 1], "slopes": [1, 0, 2], "x0": 0, "v0": 0}},
        "f": "h", "constraint": {"box": {"lo": [0], "hi": [1]}}}"#;
    let err = parse_instance_str(bad).unwrap_err().to_string();
    assert!(err.contains("functions.h") && err.contains("convexity violated at breakpoint 0"), "{err}");

    let unknown = r#"{"space": {"uniform": 1}, "scheme": "generic",
        "functions": {"h": {"type": "hyperbolic"}}}"#;
    let err = parse_instance_str(unknown).unwrap_err().to_string();
    assert!(err.contains("line 2") && err.contains("unknown variant"), "{err}");

    let mismatch = r#"{"space": {"uniform": 2}, "scheme": "fenchel",
        "functions": {"a": {"type": "abs"}}, "f": ["a"], "g": "a"}"#;
    let err = parse_instance_str(mismatch).unwrap_err().to_string();
    assert!(err.starts_with("f:") && err.contains("1 names for 2 atoms"), "{err}");

    let empty = r#"{"space": {"uniform": 1}, "scheme": "fenchel_lagrange",
        "functions": {"a": {"type": "abs"}}, "f": "a",
        "constraint": {"halfspaces": {"rows": [[1], [-1]], "rhs": [0, -1]}}}"#;
    let err = parse_instance_str(empty).unwrap_err().to_string();
    assert!(err.starts_with("constraint:") && err.contains("empty"), "{err}");

    let infeasible = r#"{"space": {"uniform": 1}, "scheme": "fenchel",
        "functions": {"a": {"type": "indicator_box", "lo": [0], "hi": [1]},
                      "b": {"type": "indicator_box", "lo": [3], "hi": [4]}},
        "f": "a", "g": "b"}"#;
    let err = parse_instance_str(infeasible).unwrap_err().to_string();
    assert!(err.contains("atom 0"), "{err}");
}

#[test]
fn instance_round_trip() {
    for entry in std::fs::read_dir(fixtures()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let inst = parse_instance(&path).unwrap();
            let again = parse_instance_str(&emit_instance(&inst.file)).unwrap();
            assert_eq!(again.file, inst.file, "{}", path.display());
            assert_eq!(again.digest, inst.digest);
        }
    }
}

#[test]
fn report_rendering() {
    let inst = parse_instance(&fixture("fenchel_two_atoms")).unwrap();
    let r = run(&inst, Cmd::Solve, &RunOptions::default()).unwrap();
    let json = emit_report(&r, Format::Json);
    let back: Report = serde_json::from_slice(&json).unwrap();
    assert_eq!(back, r);
    match &r.results[0] {
        l0dual::io::Section::Solve { gap, dual_solution, .. } => {
            assert_eq!(gap, &vec![Num(0.0), Num(0.0)]);
            let z = dual_solution.as_ref().unwrap();
            assert_eq!(z, &vec![vec![Num(-1.0)], vec![Num(-1.0)]]);
        }
        s => panic!("{s:?}"),
    }
    let text = render_text(&r);
    assert_eq!(text.lines().filter(|l| l.contains("atom") && l.contains(" gap ")).count(), 2);

    let empty = Report {
        digest: inst.digest.clone(),
        command: "solve".into(),
        scheme: "fenchel".into(),
        atoms: 2,
        tol: Num(1e-9),
        pass: None,
        results: vec![],
        notes: vec![],
    };
    let s = String::from_utf8(emit_report(&empty, Format::Json)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["digest"], inst.digest.as_str());
    assert_eq!(v["results"], serde_json::json!([]));
}
