//! End-to-end tests of the installed binary: exit-status contract, output
//! shapes, JSON mode, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn actorforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_actorforge"))
        .args(args)
        .current_dir(fixtures_dir())
        .env_remove("ACTORFORGE_MAX_STEPS")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

#[test]
fn parse_clean_fixture_exits_zero() {
    let out = actorforge(&["parse", "dao.actor"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("actor Dao"));
}

#[test]
fn parse_missing_file_is_a_usage_error() {
    let out = actorforge(&["parse", "missing.actor"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn parse_bad_syntax_reports_a_spanned_diagnostic() {
    let out = actorforge(&["parse", "bad_syntax.actor"]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("bad_syntax.actor:2:"), "{err}");
    assert!(err.contains("error:"), "{err}");
}

#[test]
fn check_accepts_actor_and_network_fixtures() {
    for file in ["dao.actor", "attacker.actor", "dao_attacker.network"] {
        let out = actorforge(&["check", file]);
        assert_eq!(code(&out), 0, "{file}: {}", stderr(&out));
    }
}

#[test]
fn classify_prints_the_documented_lines() {
    let cases = [
        ("copy.actor", "Copy: Static (1;1)"),
        ("alt.actor", "Alt: CycloStatic period=2"),
        ("dao.actor", "Dao: Dynamic"),
    ];
    for (file, expected) in cases {
        let out = actorforge(&["classify", file]);
        assert_eq!(code(&out), 0, "{file}: {}", stderr(&out));
        assert!(stdout(&out).contains(expected), "{file}: {}", stdout(&out));
    }
}

#[test]
fn classify_unresolvable_actor_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.actor");
    std::fs::write(&path, "actor A\n  in p: uint\n  action f on p(x) guard nosuch > 0 do end\nend\n").unwrap();
    let out = actorforge(&["classify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("unbound identifier"));
}

#[test]
fn compile_writes_the_golden_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = actorforge(&["compile", "dao.actor", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let written =
        std::fs::read_to_string(dir.path().join("dao_generated.sol.txt")).unwrap();
    let golden =
        std::fs::read_to_string(fixtures_dir().join("golden/dao_generated.sol.txt")).unwrap();
    let trim =
        |s: &str| s.lines().map(str::trim_end).collect::<Vec<_>>().join("\n");
    assert_eq!(trim(&written), trim(&golden));
}

#[test]
fn compile_plan_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        actorforge(&["compile", "ambiguous_emit.actor", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("plan error"));
}

#[test]
fn compile_to_missing_directory_is_a_usage_error() {
    let out = actorforge(&["compile", "dao.actor", "--out", "/nonexistent-actorforge"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn simulate_sequential_prints_the_drain() {
    let out = actorforge(&["simulate", "dao_attack.scenario", "--model", "sequential"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("victim_loss=6 ether"), "{text}");
    assert!(text.contains("dao (0x0000000000000000000000000000000000000001): 0 ether"), "{text}");
}

#[test]
fn simulate_dataflow_shows_no_drain() {
    let out = actorforge(&["simulate", "dao_attacker.network", "--model", "dataflow"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("victim_loss=0 ether"), "{text}");
    assert!(text.contains("quiescent"), "{text}");
}

#[test]
fn simulate_empty_scenario_is_quietly_green() {
    let out = actorforge(&["simulate", "empty.scenario"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn model_mismatch_is_a_usage_error() {
    let out = actorforge(&["simulate", "dao_attack.scenario", "--model", "dataflow"]);
    assert_eq!(code(&out), 2);
    let out = actorforge(&["simulate", "dao_attacker.network", "--model", "sequential"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn traces_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for (scenario, model) in
        [("dao_attack.scenario", "sequential"), ("dao_attacker.network", "dataflow")]
    {
        for path in [&a, &b] {
            let out = actorforge(&[
                "simulate",
                scenario,
                "--model",
                model,
                "--trace",
                path.to_str().unwrap(),
            ]);
            assert_eq!(code(&out), 0, "{}", stderr(&out));
        }
        let bytes_a = std::fs::read(&a).unwrap();
        let bytes_b = std::fs::read(&b).unwrap();
        assert_eq!(bytes_a, bytes_b, "{scenario} trace varies between runs");
        assert!(!bytes_a.is_empty());
    }
}

#[test]
fn dataflow_trace_lines_carry_the_exact_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.jsonl");
    let out = actorforge(&[
        "simulate",
        "dao_attacker.network",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    for line in text.lines() {
        let value: serde_json::Value = serde_json::from_str(line).unwrap();
        let object = value.as_object().unwrap();
        for key in ["step", "actor", "action", "consumed", "produced", "state_before", "state_after"] {
            assert!(object.contains_key(key), "missing {key} in {line}");
        }
    }
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn max_steps_env_var_is_honored_and_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_actorforge"))
        .args(["simulate", "dao_attacker.network"])
        .current_dir(fixtures_dir())
        .env("ACTORFORGE_MAX_STEPS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("step limit exceeded"), "{}", stdout(&out));

    let out = Command::new(env!("CARGO_BIN_EXE_actorforge"))
        .args(["simulate", "dao_attacker.network"])
        .current_dir(fixtures_dir())
        .env("ACTORFORGE_MAX_STEPS", "soon")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn step_limited_trace_ends_with_the_terminator() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.jsonl");
    let out = Command::new(env!("CARGO_BIN_EXE_actorforge"))
        .args(["simulate", "dao_attacker.network", "--trace", path.to_str().unwrap()])
        .current_dir(fixtures_dir())
        .env("ACTORFORGE_MAX_STEPS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.ends_with("{\"terminated\":\"step_limit_exceeded\"}\n"), "{text}");
}

#[test]
fn attack_demo_prints_the_four_way_comparison() {
    let out = actorforge(&["attack-demo"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("vulnerable: 6 ether drained"), "{text}");
    assert!(text.contains("reordered-fix: 0 ether drained"), "{text}");
    assert!(text.contains("generated-mutex: 0 ether drained"), "{text}");
    assert!(text.contains("dataflow: 0 ether drained"), "{text}");
}

#[test]
fn json_outputs_parse_and_carry_a_version() {
    let commands: Vec<Vec<&str>> = vec![
        vec!["--json", "parse", "dao.actor"],
        vec!["--json", "check", "dao_attacker.network"],
        vec!["--json", "classify", "alt.actor"],
        vec!["--json", "simulate", "dao_attack.scenario"],
        vec!["--json", "simulate", "dao_attacker.network"],
        vec!["--json", "attack-demo"],
        vec!["--json", "parse", "bad_syntax.actor"],
    ];
    for args in commands {
        let out = actorforge(&args);
        let text = stdout(&out);
        let value: serde_json::Value =
            serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("{args:?}: {e}\n{text}"));
        assert_eq!(
            value.get("version").and_then(|v| v.as_str()),
            Some(env!("CARGO_PKG_VERSION")),
            "{args:?}"
        );
    }
}

#[test]
fn json_attack_demo_is_machine_readable() {
    let out = actorforge(&["--json", "attack-demo"]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(value["pass"], serde_json::Value::Bool(true));
    assert_eq!(value["rows"]["vulnerable"]["victim_loss_wei"], "6000000000000000000");
}

#[test]
fn version_flag_names_the_tool() {
    let out = actorforge(&["--version"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("actorforge"));
}

#[test]
fn outputs_are_deterministic_given_identical_inputs() {
    for args in [
        vec!["classify", "dao.actor"],
        vec!["simulate", "dao_attack.scenario"],
        vec!["attack-demo"],
    ] {
        let a = actorforge(&args);
        let b = actorforge(&args);
        assert_eq!(stdout(&a), stdout(&b), "{args:?}");
        assert_eq!(code(&a), code(&b));
    }
}

#[test]
fn classify_observe_reports_rate_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("tokens.json");
    std::fs::write(
        &script,
        r#"[
            {"port": "src", "uint": "1"},
            {"port": "src", "uint": "2"},
            {"port": "src", "uint": "3"}
        ]"#,
    )
    .unwrap();
    let out = actorforge(&["classify", "copy.actor", "--observe", script.to_str().unwrap(), "--firings", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("observed copy (1;1)").count(), 3, "{text}");
}

#[test]
fn classify_observe_accepts_request_descriptors() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("tokens.json");
    std::fs::write(
        &script,
        r#"[{"port": "req", "method": "deposit", "sender": "0xee00000000000000000000000000000000000001", "value": "2000000000000000000"}]"#,
    )
    .unwrap();
    let out = actorforge(&["classify", "dao.actor", "--observe", script.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("observed deposit (1;0)"), "{}", stdout(&out));
}

#[test]
fn buffer_cap_blocks_the_two_token_attack() {
    // attack() emits two request tokens at once; a capacity of 1 starves it.
    let out = actorforge(&["simulate", "dao_attacker.network", "--buffer-cap", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("quiescent after 0 step(s)"), "{text}");
    assert!(text.contains("dao: 6 ether"), "{text}");
}

#[test]
fn malformed_scenario_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.scenario");
    std::fs::write(&path, r#"{"accounts": [{"name": "a", "balance": "not-a-number"}]}"#).unwrap();
    let out = actorforge(&["simulate", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("wei"), "{}", stderr(&out));
}
