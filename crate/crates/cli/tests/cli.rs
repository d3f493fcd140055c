//! End-to-end tests against the compiled binary: exact output bytes,
//! exit codes, determinism, and error surfaces.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_localmath"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary must run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout must be UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr must be UTF-8")
}

fn write_field(dir: &Path) -> String {
    let path = dir.join("field.toml");
    std::fs::write(
        &path,
        "alpha = \"0.5*y1\"\npoints = [1, 64, 1, 1]\n\n[domain]\nmin = [0.0, 0.0, 0.0, 0.0]\nmax = [0.0, 1.0, 0.0, 0.0]\n",
    )
    .unwrap();
    path.display().to_string()
}

#[test]
fn value_table_30_prints_the_exact_divisor_rows() {
    let out = run(&["value-table", "30"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "value,subset\n30,1\n15,2\n10,3\n6,5\n5,6\n3,10\n2,15\n1,30\n"
    );
}

#[test]
fn value_table_rejects_zero_with_usage_exit() {
    let out = run(&["value-table", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("0 has value 0 in every scaled subset"));
}

#[test]
fn malformed_expression_reports_position_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_field(dir.path());
    let out = run(&[
        "integrate",
        "--field",
        &field,
        "--psi",
        "sin(y1",
        "--ref",
        "0,0,0,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 1, column"), "{err}");
    assert!(err.contains("--psi"), "{err}");
}

#[test]
fn malformed_field_file_reports_the_file_and_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "alpha = \"y1 +* 2\"\npoints = [1, 4, 1, 1]\n\n[domain]\nmin = [0.0, 0.0, 0.0, 0.0]\nmax = [0.0, 1.0, 0.0, 0.0]\n",
    )
    .unwrap();
    let out = run(&["restrict-check", "--field", &path.display().to_string(), "--epsilon", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("bad.toml"), "{err}");
    assert!(err.contains("line 1, column 5"), "{err}");
}

#[test]
fn restrict_check_exit_code_tracks_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_field(dir.path());

    let fail = run(&["restrict-check", "--field", &field, "--epsilon", "0.1"]);
    assert_eq!(fail.status.code(), Some(1));
    let text = stdout(&fail);
    assert!(text.contains("max |A| = 0.5"), "{text}");
    assert!(text.trim_end().ends_with("FAIL"), "{text}");

    let pass = run(&["restrict-check", "--field", &field, "--epsilon", "0.6"]);
    assert_eq!(pass.status.code(), Some(0));
    assert!(stdout(&pass).trim_end().ends_with("PASS"));
}

#[test]
fn integrate_output_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_field(dir.path());
    let args = [
        "integrate",
        "--field",
        &field,
        "--psi",
        "sin(y1) + 0.3*y1",
        "--psi-im",
        "0.2*y1",
        "--ref",
        "0,0.5,0,0",
    ];
    let first = run(&args);
    assert!(first.status.success());
    let again = run(&args);
    let mut pinned = vec!["--threads", "1"];
    pinned.extend_from_slice(&args);
    let single = run(&pinned);
    assert_eq!(stdout(&first), stdout(&again));
    assert_eq!(stdout(&first), stdout(&single));
    assert!(stdout(&first).starts_with("value: "));
    assert!(stdout(&first).contains("estimated error: "));
}

#[test]
fn geodesic_emits_the_documented_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_field(dir.path());
    let out = run(&[
        "geodesic",
        "--field",
        &field,
        "--start",
        "0,0,0,0",
        "--velocity",
        "1,0.3,0,0",
        "--tau",
        "1",
        "--steps",
        "10",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tau,p0,p1,p2,p3,v0,v1,v2,v3"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11, "ten steps plus the initial state");
    assert!(rows[0].starts_with("0,0,0,0,0,1,0.3,0,0"));
    for row in rows {
        assert_eq!(row.split(',').count(), 9);
    }
}

#[test]
fn selftest_passes_and_fault_injection_fails() {
    let ok = run(&["selftest"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout(&ok);
    assert_eq!(text.matches("[PASS]").count(), 12, "{text}");
    assert!(text.contains("all 12 checks passed"));

    let hurt = run(&["selftest", "--inject-gamma-fault"]);
    assert_eq!(hurt.status.code(), Some(1));
    let text = stdout(&hurt);
    assert!(text.contains("[FAIL] gamma-algebra"), "{text}");
}

#[test]
fn selftest_verdicts_do_not_depend_on_the_seed() {
    for seed in ["0", "1", "2", "3", "4"] {
        let out = run(&["selftest", "--seed", seed]);
        assert_eq!(out.status.code(), Some(0), "seed {seed}");
        assert_eq!(stdout(&out).matches("[PASS]").count(), 12, "seed {seed}");
    }
}

#[test]
fn lagrangian_writes_csv_and_gauge_check_reports_small_delta() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("field.toml");
    std::fs::write(
        &field,
        "alpha = \"0.2*y1 + 0.1*y3 - 0.15*y0\"\npoints = [2, 2, 2, 2]\n\n[domain]\nmin = [0.0, 0.0, 0.0, 0.0]\nmax = [1.0, 1.0, 1.0, 1.0]\n",
    )
    .unwrap();
    let spinor = dir.path().join("spinor.toml");
    std::fs::write(
        &spinor,
        "[[component]]\nre = \"1 + 0.3*y0\"\nim = \"0.1*y2\"\n\n[[component]]\nre = \"0.5*y1\"\nim = \"0.25\"\n\n[[component]]\nre = \"0.2\"\nim = \"0.15*y0\"\n\n[[component]]\nre = \"0.1*y3\"\nim = \"0\"\n",
    )
    .unwrap();
    let gauge = dir.path().join("gauge.toml");
    std::fs::write(
        &gauge,
        "m = 1.0\nB = [\"0.2*y1\", \"0.1*y0\", \"-0.3*y3\", \"0.15*y2\"]\n",
    )
    .unwrap();
    let theta = dir.path().join("theta.toml");
    std::fs::write(&theta, "theta = \"0.3*y1 - 0.2*y3 + 0.1*y0\"\n").unwrap();
    let csv = dir.path().join("density.csv");

    let out = run(&[
        "lagrangian",
        "--field",
        &field.display().to_string(),
        "--psi",
        &spinor.display().to_string(),
        "--gauge",
        &gauge.display().to_string(),
        "--out",
        &csv.display().to_string(),
        "--gauge-check",
        &theta.display().to_string(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let written = std::fs::read_to_string(&csv).unwrap();
    let mut lines = written.lines();
    assert_eq!(lines.next(), Some("y0,y1,y2,y3,re_L,im_L"));
    assert_eq!(lines.count(), 16, "one row per lattice site");

    let report = stdout(&out);
    let delta: f64 = report
        .trim()
        .strip_prefix("max |delta L| = ")
        .expect("gauge check line")
        .parse()
        .unwrap();
    assert!(delta <= 1e-10, "gauge check must be tiny, got {delta}");
}

#[test]
fn path_length_reports_value_in_the_reference_structure() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_field(dir.path());
    let path = dir.path().join("path.toml");
    std::fs::write(&path, "kind = \"analytic\"\np = [\"5*s\", \"0.2*s\", \"0\", \"0\"]\n").unwrap();
    let out = run(&[
        "path-length",
        "--field",
        &field,
        "--path",
        &path.display().to_string(),
        "--ref",
        "0,0,0,0",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("length: "), "{text}");
    assert!(text.contains("scale: 1\n"), "{text}");
}

#[test]
fn bad_threads_env_is_a_usage_error() {
    let out = bin()
        .env("LOCALMATH_THREADS", "lots")
        .args(["value-table", "6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("LOCALMATH_THREADS"));
}

#[test]
fn every_subcommand_documents_an_example() {
    for sub in [
        "value-table",
        "integrate",
        "derivative-check",
        "lagrangian",
        "geodesic",
        "path-length",
        "restrict-check",
        "selftest",
    ] {
        let out = run(&[sub, "--help"]);
        assert!(out.status.success(), "{sub} --help must succeed");
        let text = stdout(&out);
        assert!(
            text.contains("EXAMPLES:") && text.contains("localmath "),
            "{sub} --help must show a runnable example"
        );
    }
}
