use std::fs;
use std::process::{Command, Output};

use sympont::catalog;
use sympont::harness::read_cells_csv;

fn sympont(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sympont"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn list_problems_names_the_catalog() {
    let out = sympont(&["list-problems"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in catalog::IDS {
        assert!(text.contains(id), "{id} missing from\n{text}");
    }
}

#[test]
fn verify_constants_passes_on_catalog_problem() {
    let out = sympont(&["verify-constants", "--problem", "eikonal-1d-costed", "--samples", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("overall: PASS"));
}

#[test]
fn run_writes_reports_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "run".to_string(),
            "--problem".into(),
            "eikonal-1d".into(),
            "--x0".into(),
            "2".into(),
            "--dt".into(),
            "0.1,0.05,0.025".into(),
            "--delta".into(),
            "1e-2,1e-4".into(),
            "--route".into(),
            "both".into(),
            "--out".into(),
            out.into(),
        ]
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let argv = args(d.to_str().unwrap());
        let out = sympont(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8(out.stdout).unwrap().contains("exit code: 0"));
    }
    for f in ["cells.csv", "summary.txt", "error_vs_dt.svg", "error_vs_delta.svg"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let cells = read_cells_csv(&a.join("cells.csv")).unwrap();
    assert_eq!(cells.len(), 12);
    assert!(cells.iter().all(|c| c.lower_ok && c.upper_ok));
}

#[test]
fn negative_start_point_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out = sympont(&[
        "run", "--problem", "eikonal-2d", "--x0", "-1.5,0.5", "--dt", "0.5,0.25", "--delta", "1e-3",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = sympont(&["run", "--problem", "eikonal-1d", "--x0", "2", "--dt", "0.05,0.1", "--delta", "1e-3", "--out", out_dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("strictly decreasing"));
    let out = sympont(&["run", "--problem", "nope", "--x0", "2", "--dt", "0.1", "--delta", "1e-3", "--out", out_dir]);
    assert_eq!(out.status.code(), Some(2));
    let out = sympont(&["run", "--problem", "eikonal-1d-costed", "--x0", "2", "--dt", "0.1", "--delta", "1e-3", "--out", out_dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("closed-form"));
}
