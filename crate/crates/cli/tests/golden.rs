//! Criterion 9: the eight golden scenarios produce byte-identical JSON
//! reports, spanning every decision branch.

use std::path::PathBuf;
use std::process::Command;

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/scenarios").join(name)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name))
        .unwrap()
}

fn run_predict(scenario: &str) -> (String, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_rootnum"))
        .args(["predict", "--scenario"])
        .arg(scenario_path(scenario))
        .output()
        .expect("run rootnum");
    (String::from_utf8(out.stdout).unwrap(), out.status.code())
}

#[test]
fn criterion_9_golden_scenarios() {
    let cases: [(&str, i32); 8] = [
        ("sd_yes.json", 0),
        ("sd_no_plus.json", 0),
        ("sd_no_minus.json", 0),
        ("conj_yes_halfintegral.json", 0),
        ("conj_yes_large_exponent.json", 0),
        ("conj_conjectural_no.json", 0),
        ("conj_blocked.json", 0),
        ("odd_rank_rejection.json", 2),
    ];
    for (name, expected_code) in cases {
        let (stdout, code) = run_predict(name);
        assert_eq!(code, Some(expected_code), "exit code for {name}");
        assert_eq!(stdout, golden(name), "byte-identical report for {name}");
        // determinism: a second run yields the same bytes
        let (second, _) = run_predict(name);
        assert_eq!(stdout, second, "deterministic report for {name}");
    }
    println!("criterion 9 (golden scenario reports): PASS");
}
