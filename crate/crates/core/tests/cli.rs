//! End-to-end tests of the `so3kin` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use so3kin::io::{read_trajectory_csv, Report};

fn so3kin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_so3kin"))
        .args(args)
        .output()
        .expect("run so3kin")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SPIN_Z: &str = "t,wx,wy,wz\n0,0,0,1\n1,0,0,1\n";

#[test]
fn missing_input_exits_two_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let o = so3kin(&[
        "propagate",
        "--input",
        s(&dir.path().join("nope.csv")),
        "--output",
        s(&out),
        "--dt",
        "0.1",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("nope.csv"));
    assert!(!out.exists());
}

#[test]
fn zero_dt_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.csv", SPIN_Z);
    let out = dir.path().join("out.csv");
    let o = so3kin(&[
        "propagate",
        "--input",
        s(&input),
        "--output",
        s(&out),
        "--dt",
        "0",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--dt"));
    assert!(!out.exists());
}

#[test]
fn malformed_profile_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.csv", "t,wx,wy,wz\n0,0,0,abc\n");
    let o = so3kin(&[
        "propagate",
        "--input",
        s(&input),
        "--output",
        s(&dir.path().join("o.csv")),
        "--dt",
        "0.1",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn non_increasing_profile_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.csv", "t,wx,wy,wz\n0,0,0,1\n0,0,0,1\n");
    let o = so3kin(&[
        "propagate",
        "--input",
        s(&input),
        "--output",
        s(&dir.path().join("o.csv")),
        "--dt",
        "0.1",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn compose_applies_second_after_first() {
    let dir = tempfile::tempdir().unwrap();
    let rx = write(dir.path(), "rx", "1 0 0\n0 0 -1\n0 1 0\n");
    let rz = write(dir.path(), "rz", "0,-1,0\n1,0,0\n0,0,1\n");
    let o = so3kin(&["compose", s(&rx), s(&rz)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "0, 0, 1\n1, 0, 0\n0, 1, 0\n");
}

#[test]
fn compose_rejects_reflection() {
    let dir = tempfile::tempdir().unwrap();
    let rx = write(dir.path(), "rx", "1 0 0\n0 0 -1\n0 1 0\n");
    let refl = write(dir.path(), "refl", "1 0 0\n0 1 0\n0 0 -1\n");
    let o = so3kin(&["compose", s(&rx), s(&refl)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("det"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn tolerance_flags_control_validation() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m", "1 0 0\n0 1 0\n0 0 1.000001\n");
    assert_eq!(code(&so3kin(&["log", s(&m)])), 1);
    let loose = so3kin(&["--tol-ortho", "1e-5", "--tol-det", "1e-5", "log", s(&m)]);
    assert_eq!(code(&loose), 0);
    assert_eq!(code(&so3kin(&["--tol-ortho", "-1", "log", s(&m)])), 1);
}

#[test]
fn exp_log_hat_vee() {
    let o = so3kin(&["--degrees", "exp", "90,0,0"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .map(|l| l.split(',').map(|x| x.trim().parse().unwrap()).collect())
        .collect();
    let expected = [[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]];
    for (r, e) in rows.iter().zip(expected) {
        for (a, b) in r.iter().zip(e) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let rz = write(dir.path(), "rz", "0 -1 0\n1 0 0\n0 0 1\n");
    let o = so3kin(&["--format", "json", "log", s(&rz)]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let z = v["vector"][2].as_f64().unwrap();
    assert!((z - std::f64::consts::FRAC_PI_2).abs() <= 1e-15);

    assert_eq!(
        stdout(&so3kin(&["hat", "1,-2,3"])),
        "0, -3, -2\n3, 0, -1\n2, 1, 0\n"
    );
    assert_eq!(
        stdout(&so3kin(&["vee", "0,-3,-2,3,0,-1,2,1,0"])),
        "1, -2, 3\n"
    );
    assert_eq!(code(&so3kin(&["vee", "1,0,0,0,0,0,0,0,0"])), 1);
}

#[test]
fn verify_rejects_time_range_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.csv", SPIN_Z);
    let traj = dir.path().join("t.csv");
    assert_eq!(
        code(&so3kin(&[
            "propagate",
            "--input",
            s(&input),
            "--output",
            s(&traj),
            "--dt",
            "0.01"
        ])),
        0
    );
    let short = write(dir.path(), "short.csv", "t,wx,wy,wz\n0,0,0,1\n0.5,0,0,1\n");
    let o = so3kin(&["verify", "--trajectory", s(&traj), "--profile", s(&short)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("range"));
}

#[test]
fn verify_accepts_exponential_and_rejects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "p.csv",
        "t,wx,wy,wz\n0,0.3,-0.2,1\n1,0.1,0.4,0.8\n",
    );
    let traj = dir.path().join("t.csv");
    assert_eq!(
        code(&so3kin(&[
            "propagate",
            "--input",
            s(&input),
            "--output",
            s(&traj),
            "--dt",
            "0.01"
        ])),
        0
    );
    let o = so3kin(&[
        "verify",
        "--trajectory",
        s(&traj),
        "--profile",
        s(&input),
        "--steps",
        "0.01,0.02,0.04",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = Report::from_text(&stdout(&o)).unwrap();
    assert!(report.estimated_order.unwrap() >= 1.8);

    // perturb one interior rotation entry
    let text = fs::read_to_string(&traj).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let row = lines.iter().position(|l| l.starts_with("5.0")).unwrap();
    let mut cells: Vec<String> = lines[row].split(',').map(String::from).collect();
    let v: f64 = cells[1].parse().unwrap();
    cells[1] = format!("{:.16e}", v + 1e-3);
    lines[row] = cells.join(",");
    let bad = write(dir.path(), "bad.csv", &(lines.join("\n") + "\n"));
    let o = so3kin(&["verify", "--trajectory", s(&bad), "--profile", s(&input)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn all_methods_write_one_file_each() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.csv", SPIN_Z);
    let out = dir.path().join("run.csv");
    let o = so3kin(&[
        "--format",
        "json",
        "propagate",
        "--input",
        s(&input),
        "--output",
        s(&out),
        "--dt",
        "0.125",
        "--method",
        "all",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let reports: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = reports
        .iter()
        .map(|r| r["method"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["euler", "euler-renorm", "exp"]);
    for name in names {
        let path = dir.path().join(format!("run.{name}.csv"));
        let traj = read_trajectory_csv(fs::File::open(path).unwrap()).unwrap();
        assert_eq!(traj.len(), 9);
        assert_eq!(traj.meta().method.unwrap().name(), name);
    }
}

#[test]
fn text_and_json_reports_agree() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.csv", "t,wx,wy,wz\n0,1,0,0\n2,0,1,1\n");
    let args = |fmt: &'static str, out: &Path| {
        vec![
            "--format".to_string(),
            fmt.into(),
            "propagate".into(),
            "--input".into(),
            s(&input).into(),
            "--output".into(),
            s(out).into(),
            "--dt".into(),
            "0.05".into(),
            "--method".into(),
            "euler".into(),
        ]
    };
    let text = Command::new(env!("CARGO_BIN_EXE_so3kin"))
        .args(args("text", &dir.path().join("a.csv")))
        .output()
        .unwrap();
    let json = Command::new(env!("CARGO_BIN_EXE_so3kin"))
        .args(args("json", &dir.path().join("b.csv")))
        .output()
        .unwrap();
    let from_text = Report::from_text(&stdout(&text)).unwrap();
    let from_json: Report = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(from_text, from_json);
    assert!(from_text.max_ortho_err > 0.0);
}

#[test]
fn report_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.csv", SPIN_Z);
    let rep = dir.path().join("report.json");
    let o = so3kin(&[
        "--format",
        "json",
        "propagate",
        "--input",
        s(&input),
        "--output",
        s(&dir.path().join("o.csv")),
        "--dt",
        "0.1",
        "--report",
        s(&rep),
    ]);
    assert_eq!(code(&o), 0);
    let stored: Report = serde_json::from_str(&fs::read_to_string(rep).unwrap()).unwrap();
    assert_eq!(stored.steps, 10);
}

#[test]
fn exit_codes_stay_in_range() {
    let cases: [&[&str]; 6] = [
        &[],
        &["--help"],
        &["bogus"],
        &["hat", "1,2"],
        &["exp", "nan,0,0"],
        &["log", "/definitely/missing"],
    ];
    for args in cases {
        let c = code(&so3kin(args));
        assert!((0..=2).contains(&c), "{args:?} exited {c}");
    }
}
