mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn wrpg(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_wrpg"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn workdir() -> TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn encode_writes_canonical_file() {
    let dir = workdir();
    let run = wrpg(dir.path(), &["encode", "7"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout, "");
    assert_eq!(
        fs::read_to_string(dir.path().join("7.rpg.json")).unwrap(),
        golden("7.rpg.json")
    );
}

#[test]
fn encode_to_stdout_and_dot() {
    let dir = workdir();
    let run = wrpg(
        dir.path(),
        &["encode", "12", "--out", "-", "--dot", "12.dot"],
    );
    assert_eq!(run.code, 0);
    assert_eq!(run.stdout, golden("12.rpg.json"));
    assert_eq!(
        fs::read_to_string(dir.path().join("12.dot")).unwrap(),
        golden("12.dot")
    );
}

#[test]
fn encode_rejects_invalid_watermarks() {
    let dir = workdir();
    for arg in ["1", "0", "-3", "twelve"] {
        let run = wrpg(dir.path(), &["encode", "--", arg]);
        assert_eq!(run.code, 3, "encode {arg}");
        assert!(!run.stderr.is_empty());
    }
}

#[test]
fn decode_valid_and_tampered() {
    let dir = workdir();
    assert_eq!(wrpg(dir.path(), &["encode", "12"]).code, 0);
    let run = wrpg(dir.path(), &["decode", "12.rpg.json"]);
    assert_eq!((run.code, run.stdout.as_str()), (0, "VALID w=12\n"));

    let run = wrpg(
        dir.path(),
        &[
            "attack",
            "12.rpg.json",
            "--edits",
            "3:5",
            "--out",
            "hit.json",
        ],
    );
    assert_eq!(
        (run.code, run.stdout.as_str()),
        (0, "edits=1\ndistance=1\n")
    );
    let run = wrpg(dir.path(), &["decode", "hit.json"]);
    assert_eq!(run.code, 2);
    assert_eq!(run.stdout, golden("decode_attacked12.txt"));
}

#[test]
fn decode_rejects_malformed_files() {
    let dir = workdir();
    let full = golden("12.rpg.json");
    fs::write(dir.path().join("truncated.json"), &full[..full.len() / 2]).unwrap();
    fs::write(
        dir.path().join("future.json"),
        full.replace("\"version\":1", "\"version\":2"),
    )
    .unwrap();
    fs::write(
        dir.path().join("sized.json"),
        full.replace("\"nstar\":9", "\"nstar\":11"),
    )
    .unwrap();
    for file in [
        "truncated.json",
        "future.json",
        "sized.json",
        "missing.json",
    ] {
        let run = wrpg(dir.path(), &["decode", file]);
        assert_eq!(run.code, 3, "{file}: {}", run.stdout);
        assert!(run.stderr.contains(file), "{file}: {}", run.stderr);
    }
}

#[test]
fn attack_reproduces_neighbor_graph() {
    let dir = workdir();
    wrpg(dir.path(), &["encode", "5"]);
    wrpg(dir.path(), &["encode", "4"]);
    let run = wrpg(
        dir.path(),
        &["attack", "5.rpg.json", "--edits", "6:7,1:6,5:6,2:3"],
    );
    assert_eq!(
        (run.code, run.stdout.as_str()),
        (0, "edits=4\ndistance=4\n")
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("5.attacked.json")).unwrap(),
        fs::read_to_string(dir.path().join("4.rpg.json")).unwrap()
    );
    let run = wrpg(
        dir.path(),
        &["classify", "5.attacked.json", "--original", "5"],
    );
    assert_eq!(run.code, 0);
    assert!(
        run.stdout
            .ends_with("verdict: VALID w=4\nrelation: true-incorrect w'=4\n"),
        "{}",
        run.stdout
    );
}

#[test]
fn attack_with_no_edits_copies() {
    let dir = workdir();
    wrpg(dir.path(), &["encode", "12"]);
    let run = wrpg(
        dir.path(),
        &["attack", "12.rpg.json", "--edits", "", "--out", "copy.json"],
    );
    assert_eq!(
        (run.code, run.stdout.as_str()),
        (0, "edits=0\ndistance=0\n")
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("copy.json")).unwrap(),
        golden("12.rpg.json")
    );
}

#[test]
fn attack_rejects_out_of_model_edits() {
    let dir = workdir();
    wrpg(dir.path(), &["encode", "12"]);
    for edits in ["0:5", "10:3", "3:11", "3:2", "3-5", "a:b"] {
        let run = wrpg(dir.path(), &["attack", "12.rpg.json", "--edits", edits]);
        assert_eq!(run.code, 3, "edits {edits}");
    }
    assert!(!dir.path().join("12.attacked.json").exists());
}

#[test]
fn classify_reports_every_check() {
    let dir = workdir();
    wrpg(dir.path(), &["encode", "12"]);
    wrpg(
        dir.path(),
        &[
            "attack",
            "12.rpg.json",
            "--edits",
            "5:2",
            "--out",
            "down.json",
        ],
    );
    let run = wrpg(dir.path(), &["classify", "down.json", "--original", "12"]);
    assert_eq!(run.code, 2);
    assert_eq!(run.stdout, golden("classify_down12.txt"));
}

#[test]
fn analyze_reports() {
    let dir = workdir();
    let run = wrpg(dir.path(), &["analyze", "27"]);
    assert_eq!((run.code, run.stdout.clone()), (0, golden("analyze27.txt")));
    let run = wrpg(dir.path(), &["analyze", "5"]);
    assert_eq!((run.code, run.stdout.clone()), (0, golden("analyze5.txt")));
    let run = wrpg(dir.path(), &["analyze", "40000"]);
    assert_eq!(run.code, 3);
}

#[test]
fn survey_is_byte_stable() {
    let dir = workdir();
    let first = wrpg(dir.path(), &["survey", "--bits", "4"]);
    let again = wrpg(dir.path(), &["survey", "--bits", "4", "--format", "csv"]);
    assert_eq!(first.code, 0);
    assert_eq!(first.stdout, golden("survey4.csv"));
    assert_eq!(first.stdout, again.stdout);
    let json = wrpg(dir.path(), &["survey", "--bits", "4", "--format", "json"]);
    assert_eq!((json.code, json.stdout), (0, golden("survey4.json")));
}

#[test]
fn survey_below_closed_form_leaves_columns_empty() {
    let run = wrpg(workdir().path(), &["survey", "--bits", "3"]);
    assert_eq!((run.code, run.stdout), (0, golden("survey3.csv")));
}

#[test]
fn verify_theorem_holds() {
    let run = wrpg(
        workdir().path(),
        &["verify-theorem", "--bits-min", "4", "--bits-max", "10"],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout, golden("verify4-10.csv"));
}

#[test]
fn verify_theorem_argument_errors() {
    let dir = workdir();
    for args in [
        &["verify-theorem", "--bits-min", "3", "--bits-max", "5"][..],
        &["verify-theorem", "--bits-min", "6", "--bits-max", "5"],
        &["verify-theorem", "--bits-min", "4", "--bits-max", "15"],
        &["verify-theorem", "--bits-min", "4"],
    ] {
        assert_eq!(wrpg(dir.path(), args).code, 3, "{args:?}");
    }
}

#[test]
fn usage_errors() {
    let dir = workdir();
    assert_eq!(wrpg(dir.path(), &[]).code, 3);
    assert_eq!(wrpg(dir.path(), &["frobnicate"]).code, 3);
    assert_eq!(wrpg(dir.path(), &["--help"]).code, 0);
}

#[test]
fn verification_mismatch_exits_four() {
    let outcome =
        wrpg::cli::verification_outcome(&common::failing_report(), wrpg::cli::Format::Csv);
    assert_eq!(outcome.exit_code, wrpg::cli::EXIT_MISMATCH);
    assert_eq!(outcome.stdout, golden("verify_mismatch.csv"));
    assert_eq!(
        outcome.stderr,
        "error: 1 closed-form mismatches; strong/separation claims hold\n"
    );
}
