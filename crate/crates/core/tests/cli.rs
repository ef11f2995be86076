use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use divrec::cli::ClassifyReport;

fn divrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divrec"))
        .args(args)
        .env_remove("DIVREC_JOBS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect()
}

#[test]
fn classify_60_json_matches_fixture_and_round_trips() {
    let o = divrec(&["classify", "60", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(
        text,
        fs::read_to_string(fixture("classify_60.json")).unwrap()
    );

    let report: ClassifyReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&report).unwrap(), text.trim_end());

    let f10 = report.small_forms.iter().find(|m| m.form_id == 10).unwrap();
    let u = f10.predicted_u.unwrap();
    assert_eq!((u.a, u.b), (2, -1));
    assert_eq!(report.small_divisors, vec![2, 3, 4, 5, 6]);
}

#[test]
fn large_n_is_written_as_a_string() {
    // 2^61 - 1 is prime.
    let o = divrec(&["classify", "2305843009213693951", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with(r#"{"n":"2305843009213693951""#), "{text}");
    let report: ClassifyReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&report).unwrap(), text.trim_end());
}

#[test]
fn text_output_annotates_recurrences() {
    let text = stdout(&divrec(&["classify", "512"]));
    assert!(
        text.contains("Small form 1 (p=2, k=9): {2, 4, 8, 16} under U(2, 4, 2, 0)"),
        "{text}"
    );
    let text = stdout(&divrec(&["oracle", "100", "--bound", "5"]));
    assert!(text.contains("L' = {20, 25, 50}"), "{text}");
    assert!(text.contains("(2, 0)"), "{text}");
}

#[test]
fn usage_and_contract_errors_exit_one() {
    for args in [
        &[][..],
        &["classify"],
        &["classify", "sixty"],
        &["validate", "--from", "2"],
        &["bogus"],
    ] {
        let o = divrec(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    for args in [
        &["classify", "1"][..],
        &["classify", "4611686018427387904"],
        &["validate", "--from", "10", "--to", "5"],
        &["tau-check", "--from", "2", "--to", "10", "--jobs", "0"],
        &["search-s7", "--pmax", "1"],
    ] {
        let o = divrec(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("divrec:"));
    }
    assert_eq!(divrec(&["--help"]).status.code(), Some(0));
    assert_eq!(divrec(&["--version"]).status.code(), Some(0));
}

#[test]
fn jobs_come_from_the_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_divrec"))
            .args(["tau-check", "--from", "2", "--to", "5000"])
            .env("DIVREC_JOBS", v)
            .output()
            .unwrap()
    };
    assert_eq!(run("3").status.code(), Some(0));
    assert_eq!(run("0").status.code(), Some(1));
    assert_eq!(run("many").status.code(), Some(1));
}

fn validate_into(dir: &Path, extra: &[&str]) -> Output {
    let out = dir.join("report.jsonl");
    let mut args = vec![
        "validate",
        "--from",
        "2",
        "--to",
        "1000",
        "--jobs",
        "2",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    divrec(&args)
}

#[test]
fn validate_writes_report_summary_and_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let o = validate_into(dir.path(), &[]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report = fs::read_to_string(dir.path().join("report.jsonl")).unwrap();
    assert_eq!(report.lines().count(), 999);
    assert_eq!(
        fs::read_to_string(dir.path().join("report.summary.csv")).unwrap(),
        fs::read_to_string(fixture("summary_2_1000.csv")).unwrap()
    );
    let ledger = dir.path().join("report.errata.jsonl");
    let first = fs::read_to_string(&ledger).unwrap();
    assert_eq!(
        first,
        fs::read_to_string(fixture("errata_2_1000.jsonl")).unwrap()
    );

    // A second run adds nothing to the ledger.
    validate_into(dir.path(), &[]);
    assert_eq!(fs::read_to_string(&ledger).unwrap(), first);
}

#[test]
fn errata_outside_the_allowlist_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("allow.jsonl");
    fs::write(&empty, "# nothing is allowed\n").unwrap();
    let o = validate_into(dir.path(), &["--allowlist", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unexplained: n=100 Large"));

    let broken = dir.path().join("broken.jsonl");
    fs::write(&broken, "{not json}\n").unwrap();
    let o = validate_into(dir.path(), &["--allowlist", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn search_commands() {
    let o = divrec(&["search-s7", "--pmax", "100", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        fs::read_to_string(fixture("search_s7_pmax100.jsonl")).unwrap()
    );
    let text = stdout(&divrec(&["search-s7", "--pmax", "100"]));
    assert!(
        text.contains("p=2 q=3 r=5 n=60 U(2, 3, 2, -1) oracle=true"),
        "{text}"
    );
    let csv = stdout(&divrec(&["search-s7", "--pmax", "10", "--format", "csv"]));
    assert!(
        csv.starts_with("p,q,r,n,a,b,oracle_confirmed\n2,3,5,60,2,-1,true"),
        "{csv}"
    );

    let o = divrec(&["search-large5", "--pmax", "50", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
}

#[test]
fn tau_check_formats() {
    let o = divrec(&[
        "tau-check",
        "--from",
        "2",
        "--to",
        "10000",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "from,to,failures\n2,10000,0\n");
    let o = divrec(&[
        "tau-check",
        "--from",
        "2",
        "--to",
        "100",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["failures"], serde_json::json!([]));
}
