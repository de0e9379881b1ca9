//! End-to-end tests driving the `forest` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn forest() -> Command {
    Command::new(env!("CARGO_BIN_EXE_forest"))
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process exited")
}

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../forest-core/examples")
        .join(name)
}

/// Writes `text` to a fresh temp file with the given extension and returns
/// its path.
fn temp_program(tag: &str, ext: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!(
        "forest-cli-test-{tag}-{}.{ext}",
        std::process::id()
    ));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_min_pos_prints_sorted_state() {
    let out = forest()
        .args(["run"])
        .arg(shipped("min_pos.fst"))
        .args(["--init", "x=3,y=7"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "found=0\ni=3\nmin=3\nx=3\ny=7\n");
}

#[test]
fn run_reports_bottom_with_reason_and_location() {
    let file = temp_program("oor", "fst", "from (i = 0 or 0) to (i = x or 0) { skip }\n");
    let out = forest()
        .arg("run")
        .arg(&file)
        .args(["--init", "i=5,x=3"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 1);
    assert_eq!(stdout(&out), "BOTTOM: out-of-range at 1:1\n");
}

#[test]
fn run_empty_program_prints_nothing() {
    let file = temp_program("skip", "fst", "skip\n");
    let out = forest().arg("run").arg(&file).output().unwrap();
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), "");
}

#[test]
fn init_later_assignments_override_earlier() {
    let file = temp_program("override", "fst", "x += 1\n");
    let out = forest()
        .arg("run")
        .arg(&file)
        .args(["--init", "x=1,x=5"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), "x=6\n");
}

#[test]
fn run_respects_fuel() {
    let file = temp_program(
        "fuel",
        "fst",
        "from (i = -4 or 0) to (i = 1 or 0) { j += 1 }\n",
    );
    let out = forest()
        .arg("run")
        .arg(&file)
        .args(["--init", "i=-4,j=2", "--fuel", "3"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 3);
    assert!(stdout(&out).contains("FUEL EXHAUSTED"));

    let out = forest()
        .arg("run")
        .arg(&file)
        .args(["--init", "i=-4,j=2", "--fuel", "5"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("i=1\nj=7"));
}

#[test]
fn run_json_has_versioned_schema() {
    let out = forest()
        .arg("run")
        .arg(shipped("min_pos.fst"))
        .args(["--init", "x=3,y=7", "--json"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["schemaVersion"], 1);
    assert_eq!(value["outcome"], "success");
    assert_eq!(value["state"]["min"], "3");
    assert_eq!(value["stats"]["loopUnfoldings"], 3);
    assert_eq!(value["stats"]["total"], 20);
}

#[test]
fn run_trace_is_tab_separated() {
    let file = temp_program("trace", "fst", "x += 2;\nx -= 1\n");
    let out = forest()
        .arg("run")
        .arg(&file)
        .arg("--trace")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("0\tInc\t1:1\tx=0\u{2192}2\n1\tDec\t2:1\tx=2\u{2192}1\n"));
    assert!(text.ends_with("x=1\n"));
}

#[test]
fn run_rejects_srl_files() {
    let file = temp_program("runsrl", "srl", "INC r\n");
    let out = forest().arg("run").arg(&file).output().unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("translate"));
}

#[test]
fn run_rejects_invalid_programs() {
    let file = temp_program("invalid", "fst", "x += x\n");
    let out = forest().arg("run").arg(&file).output().unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("validation failed"));
}

#[test]
fn run_reports_syntax_errors_with_positions() {
    let file = temp_program("syntax", "fst", "skip;\nnonsense here\n");
    let out = forest().arg("run").arg(&file).output().unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("2:"), "stderr: {}", stderr(&out));
}

#[test]
fn invert_swaps_loop_headers() {
    let file = temp_program(
        "inv",
        "fst",
        "from (i = -4 or 0) to (i = 1 or 0) { j += 1 }\n",
    );
    let out = forest().arg("invert").arg(&file).output().unwrap();
    assert_eq!(exit_code(&out), 0);
    assert_eq!(
        stdout(&out),
        "from (i = 1 or 0) to (i = -4 or 0) {\n    j += 1\n}\n"
    );
}

#[test]
fn invert_twice_is_identity_modulo_formatting() {
    let original = shipped("min_pos.fst");
    let once = forest().arg("invert").arg(&original).output().unwrap();
    assert_eq!(exit_code(&once), 0);
    let mid = temp_program("inv2", "fst", &stdout(&once));
    let twice = forest().arg("invert").arg(&mid).output().unwrap();
    assert_eq!(exit_code(&twice), 0);
    assert_eq!(stdout(&twice), std::fs::read_to_string(&original).unwrap());
}

#[test]
fn invert_handles_msrl_files() {
    let file = temp_program("invsrl", "srl", "for r {INC j}\n");
    let out = forest().arg("invert").arg(&file).output().unwrap();
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), "for r {\n    DEC j\n}\n");
}

#[test]
fn translate_produces_runnable_forest() {
    let file = temp_program("trans", "srl", "for r {INC j}\n");
    let out = forest().arg("translate").arg(&file).output().unwrap();
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert_eq!(
        text,
        "from (_it0 = 0 or 0) to (_it0 = r or 0) {\n    j += 1\n};\n_it0 -= r\n"
    );

    // the translated output is itself a valid, runnable forest program
    let translated = temp_program("trans-out", "fst", &text);
    let ran = forest()
        .arg("run")
        .arg(&translated)
        .args(["--init", "r=3"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&ran), 0, "stderr: {}", stderr(&ran));
    assert_eq!(stdout(&ran), "_it0=0\nj=3\nr=3\n");
}

#[test]
fn translate_rejects_forest_files() {
    let out = forest()
        .arg("translate")
        .arg(shipped("sign.fst"))
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn check_accepts_shipped_examples() {
    for name in ["sign.fst", "min_pos.fst", "min_neg.fst", "min_gen.fst"] {
        let out = forest().arg("check").arg(shipped(name)).output().unwrap();
        assert_eq!(exit_code(&out), 0, "{name}: {}", stderr(&out));
        assert_eq!(stdout(&out), "ok\n", "{name}");
    }
}

#[test]
fn check_reports_violations() {
    let file = temp_program("badfst", "fst", "x += x\n");
    let out = forest().arg("check").arg(&file).output().unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stdout(&out).contains("self-assignment-source"));

    let file = temp_program("badsrl", "srl", "for r {DEC r}\n");
    let out = forest().arg("check").arg(&file).output().unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stdout(&out).contains("register-write"));
}

#[test]
fn prop_small_run_passes() {
    let out = forest()
        .args(["prop", "50", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("all properties passed"));
}

#[test]
fn prop_env_seed_overrides_flag() {
    let with_flag = forest()
        .args(["prop", "20", "--seed", "3", "--json"])
        .output()
        .unwrap();
    let with_env = forest()
        .args(["prop", "20", "--seed", "3", "--json"])
        .env("FOREST_SEED", "99")
        .output()
        .unwrap();
    let flag_json: serde_json::Value = serde_json::from_str(&stdout(&with_flag)).unwrap();
    let env_json: serde_json::Value = serde_json::from_str(&stdout(&with_env)).unwrap();
    assert_eq!(flag_json["masterSeed"], 3);
    assert_eq!(env_json["masterSeed"], 99);
}

#[test]
fn bench_prints_csv_rows() {
    let out = forest()
        .args(["bench", "sign", "--min", "-3", "--max", "3"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,loop_unfoldings,total"));
    assert_eq!(text.lines().count(), 1 + 7);
    // x = 0 runs zero unfoldings, everything else exactly one
    assert!(text.contains("\n0,0,"));
    assert!(text.contains("\n3,1,"));
}

#[test]
fn bench_min_gen_stays_within_linear_envelope() {
    let out = forest()
        .args(["bench", "min_gen", "--min", "-12", "--max", "12"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0);
    for line in stdout(&out).lines().skip(1) {
        let fields: Vec<i64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        let (m, n, unfoldings, total) = (fields[0], fields[1], fields[2], fields[3]);
        let least = m.abs().min(n.abs());
        assert!(
            unfoldings <= least + 3,
            "({m}, {n}): {unfoldings} unfoldings"
        );
        // derived from the desugaring: every unfolding contributes a fixed
        // number of events, plus a constant per loop and selection
        assert!(total <= 8 * least + 40, "({m}, {n}): total {total}");
    }
}

#[test]
fn bench_rejects_unknown_programs() {
    let out = forest().args(["bench", "nope"]).output().unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("unknown program"));
}
