use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use vasslyze_cli::report::ReportJson;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn vasslyze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vasslyze"))
        .args(args)
        .env_remove("VASSLYZE_CAP")
        .output()
        .expect("binary runs")
}

fn analyze(name: &str) -> (i32, ReportJson) {
    let out = vasslyze(&["analyze", data(name).to_str().unwrap()]);
    let report = serde_json::from_slice(&out.stdout).expect("JSON report");
    (out.status.code().unwrap(), report)
}

fn verify(report: &ReportJson, name: &str) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    std::fs::write(&path, serde_json::to_string(report).unwrap()).unwrap();
    vasslyze(&[
        "verify",
        path.to_str().unwrap(),
        data(name).to_str().unwrap(),
    ])
}

#[test]
fn analyze_exit_codes_and_verdicts() {
    let (code, r) = analyze("counter_program.vass");
    assert_eq!(code, 0);
    assert_eq!((r.verdict.as_str(), r.k), ("terminating", Some(1)));
    assert_eq!(r.bound_kind.as_deref(), Some("theta"));
    assert_eq!(r.sccs[0].linear.constant.as_deref(), Some("4/1"));

    let (code, r) = analyze("shared_flag.vass");
    assert_eq!(code, 0);
    assert_eq!(r.k, Some(2));
    assert_eq!(r.bound_kind.as_deref(), Some("theta"));

    let (code, r) = analyze("loop_plus1.vass");
    assert_eq!(code, 2);
    assert_eq!(r.verdict, "non-terminating");
    assert_eq!(r.witnesses.multicycle.len(), 1);
    assert_eq!(r.witnesses.multicycle[0].cycle, vec![0]);
}

#[test]
fn analyze_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.vass");
    std::fs::write(&bad, "vass dim 1\nstate q\ntrans t: q -> r [1]\n").unwrap();
    let out = vasslyze(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown state"));

    let out = vasslyze(&["analyze", "/nonexistent/file.vass"]);
    assert_eq!(out.status.code(), Some(1));
    let out = vasslyze(&["analyze"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn text_output() {
    let path = data("counter_program.vass");
    let out = vasslyze(&["analyze", "--text", "--scc", path.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("terminating: L(n) in Theta(n)\n"));
    assert!(text.contains("L(n)/n -> 4/1"));

    let path = data("loop_plus1.vass");
    let out = vasslyze(&["analyze", "--text", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "non-terminating\nwitness: 1 x (t)\n"
    );
}

#[test]
fn report_matches_golden_file() {
    let out = vasslyze(&["analyze", data("shared_flag.vass").to_str().unwrap()]);
    let mut actual: Value = serde_json::from_slice(&out.stdout).unwrap();
    actual["timings"] = Value::Null;
    let golden: Value = serde_json::from_str(
        &std::fs::read_to_string(
            Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/shared_flag.json"),
        )
        .unwrap(),
    )
    .unwrap();
    assert_eq!(actual, golden);
}

#[test]
fn reports_round_trip() {
    let (_, r) = analyze("shared_flag.vass");
    let text = serde_json::to_string(&r).unwrap();
    let back: ReportJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}

#[test]
fn jobs_do_not_change_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.vass");
    std::fs::write(
        &path,
        vasslyze::samples::linear_then_quadratic().to_string(),
    )
    .unwrap();
    let run = |jobs: &str| {
        let out = vasslyze(&["analyze", "--jobs", jobs, path.to_str().unwrap()]);
        let mut r: ReportJson = serde_json::from_slice(&out.stdout).unwrap();
        r.timings = None;
        r
    };
    let one = run("1");
    assert_eq!(one.sccs.len(), 2);
    assert_eq!(one.k, Some(2));
    assert_eq!(run("4"), one);
}

#[test]
fn verify_accepts_own_reports() {
    for name in [
        "counter_program.vass",
        "shared_flag.vass",
        "loop_plus1.vass",
    ] {
        let (_, r) = analyze(name);
        let out = verify(&r, name);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn verify_rejects_non_positive_normal_claimed_positive() {
    let (_, mut r) = analyze("counter_program.vass");
    let f = r.sccs[0].positive_qrf.as_mut().unwrap();
    f.normal = vec!["0/1".into(), "1/1".into()];
    let out = verify(&r, "counter_program.vass");
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive QRF"));
}

#[test]
fn verify_rejects_negative_witness() {
    let (_, mut r) = analyze("loop_plus1.vass");
    let dir = tempfile::tempdir().unwrap();
    let source = "vass dim 1\nstate q\ntrans t: q -> q [-1]\n";
    let vass = dir.path().join("down.vass");
    std::fs::write(&vass, source).unwrap();
    r.input_sha256 = vasslyze_cli::sha256_hex(source.as_bytes());
    let report = dir.path().join("r.json");
    std::fs::write(&report, serde_json::to_string(&r).unwrap()).unwrap();
    let out = vasslyze(&["verify", report.to_str().unwrap(), vass.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_rejects_wrong_input_and_bad_schema() {
    let (_, r) = analyze("counter_program.vass");
    assert_eq!(verify(&r, "shared_flag.vass").status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    std::fs::write(&report, "{\"tool\": 1}").unwrap();
    let out = vasslyze(&[
        "verify",
        report.to_str().unwrap(),
        data("counter_program.vass").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_rejects_inflated_constant() {
    let (_, mut r) = analyze("counter_program.vass");
    r.sccs[0].linear.constant = Some("5/1".into());
    assert_eq!(verify(&r, "counter_program.vass").status.code(), Some(3));
}

#[test]
fn simulate_writes_csv() {
    let path = data("counter_program.vass");
    let out = vasslyze(&["simulate", path.to_str().unwrap(), "--n-max", "24"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,L,capped");
    assert_eq!(lines.len(), 25);
    assert!(lines[1..].iter().all(|l| l.ends_with(",false")));
    assert_eq!(lines[1], "1,5,false");

    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("curve.csv");
    let path = data("shared_flag.vass");
    vasslyze(&[
        "simulate",
        path.to_str().unwrap(),
        "--n-max",
        "12",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    let lengths: Vec<u64> = std::fs::read_to_string(&csv_path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(lengths.len(), 12);
    assert!(lengths.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn simulate_caps_non_terminating_input() {
    let path = data("loop_plus1.vass");
    let out = vasslyze(&["simulate", path.to_str().unwrap(), "--n-max", "2"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().nth(1), Some("1,,true"));
}

#[test]
fn cap_can_come_from_the_environment() {
    let path = data("counter_program.vass");
    let out = Command::new(env!("CARGO_BIN_EXE_vasslyze"))
        .args(["simulate", path.to_str().unwrap(), "--n-max", "3"])
        .env("VASSLYZE_CAP", "4")
        .output()
        .unwrap();
    let csv = String::from_utf8(out.stdout).unwrap();
    // L(1) = 5 exceeds a cap of 4
    assert_eq!(csv.lines().nth(1), Some("1,,true"));
}

#[test]
fn gen_is_deterministic_and_well_formed() {
    let a = vasslyze(&["gen", "--dim", "3", "--states", "4", "--seed", "42"]);
    let b = vasslyze(&["gen", "--dim", "3", "--states", "4", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
    let v = vasslyze::parse_vass(&String::from_utf8(a.stdout).unwrap()).unwrap();
    assert_eq!((v.dim(), v.num_states()), (3, 4));
    assert!(vasslyze::graph::is_strongly_connected(&v));

    let out = vasslyze(&["gen", "--dim", "0", "--states", "1"]);
    assert_eq!(out.status.code(), Some(1));
}
