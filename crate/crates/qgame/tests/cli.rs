use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command as Process, Output};

use qgame::cli::{run, validate, Command, EXIT_INVALID, EXIT_OK};
use qgame::quantum_game::TargetSet;
use serde_json::Value;

const VERIFY_CNOT: &str = r#"
[unitary]
gate = "cnot"

[play]
a = [[0, 0], [1, 0]]
b = [[1, 0], [0, 0]]
"#;

fn qgame(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_qgame"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn report(out: &Output) -> Value {
    assert_eq!(
        out.status.code(),
        Some(EXIT_OK),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_cnot_certifies_with_zero_margins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "v.toml", VERIFY_CNOT);
    let r = report(&qgame(&["verify", "--config", &cfg]));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["command"], "verify");
    assert_eq!(r["result"]["verdict"], true);
    let margins = r["result"]["margins"].as_array().unwrap();
    assert_eq!(margins.len(), 4);
    for m in margins {
        assert!(m["margin"].as_f64().unwrap().abs() <= 1e-12);
    }
}

#[test]
fn failing_verdict_still_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "v.toml",
        &VERIFY_CNOT
            .replace("cnot", "identity")
            .replace("[[0, 0], [1, 0]]", "[[1, 0], [0, 0]]"),
    );
    let r = report(&qgame(&["verify", "--config", &cfg]));
    assert_eq!(r["result"]["verdict"], false);
}

#[test]
fn search_identity_tops_out_near_one_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", "[unitary]\ngate = \"identity\"\n");
    let r = report(&qgame(&["search", "--config", &cfg]));
    let top = &r["result"]["candidates"][0];
    assert_eq!(top["is_equilibrium"], true);
    for angles in top["angles"].as_array().unwrap() {
        assert!((angles["alpha"].as_f64().unwrap() - PI).abs() <= PI / 64.0);
        assert_eq!(angles["phi"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn non_unitary_matrix_is_rejected_with_status_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = String::from("[unitary]\ngate = \"custom\"\nmatrix = [\n");
    for i in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|j| {
                if i == j {
                    "[2, 0]".into()
                } else {
                    "[0, 0]".into()
                }
            })
            .collect();
        body.push_str(&format!("  [{}],\n", row.join(", ")));
    }
    body.push_str("]\n[play]\na = [[1, 0], [0, 0]]\nb = [[1, 0], [0, 0]]\n");
    let cfg = write(dir.path(), "bad.toml", &body);
    let out = qgame(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(EXIT_INVALID));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("unitary.matrix") && err.contains("not unitary"),
        "{err}"
    );
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_toml_and_missing_file_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "junk.toml", "[unitary\n");
    assert_eq!(
        qgame(&["verify", "--config", &cfg]).status.code(),
        Some(EXIT_INVALID)
    );
    let missing = dir.path().join("absent.toml");
    assert_eq!(
        qgame(&["verify", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(EXIT_INVALID)
    );
}

#[test]
fn output_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "v.toml", VERIFY_CNOT);
    let dest = dir.path().join("report.json");
    let out = qgame(&[
        "verify",
        "--config",
        &cfg,
        "--output",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dest).unwrap()).unwrap();
    assert_eq!(r["result"]["verdict"], true);
}

#[test]
fn seed_flag_selects_the_random_unitary() {
    let dir = tempfile::tempdir().unwrap();
    let body = "seed = 1\n[unitary]\ngate = \"random\"\n[play]\na = [[1, 0], [0, 0]]\nb = [[1, 0], [0, 0]]\n";
    let cfg = write(dir.path(), "o.toml", body);
    let from_file = qgame(&["outcome", "--config", &cfg]).stdout;
    let same = qgame(&["outcome", "--config", &cfg, "--seed", "1"]).stdout;
    let other = qgame(&["outcome", "--config", &cfg, "--seed", "2"]).stdout;
    assert_eq!(from_file, same);
    assert_ne!(report_result(&from_file), report_result(&other));
}

fn report_result(bytes: &[u8]) -> Value {
    serde_json::from_slice::<Value>(bytes).unwrap()["result"].clone()
}

#[test]
fn echoed_config_reproduces_the_payload() {
    let dir = tempfile::tempdir().unwrap();
    let bodies = [
        ("verify", VERIFY_CNOT.to_string()),
        ("search", "seed = 9\n[unitary]\ngate = \"random\"\n[grid]\nn_alpha = 7\nn_phi = 4\nrefine_depth = 1\n".to_string()),
        ("cases", format!("convention = \"paper-literal\"\n{VERIFY_CNOT}[alt_play]\na = [[0.6, 0], [0.8, 0]]\nb = [[0, 0], [1, 0]]\n")),
        ("minimax", "target = 2\n[unitary]\ngate = \"swap\"\n[grid]\nn_alpha = 8\nn_phi = 8\nrefine_depth = 1\n".to_string()),
        ("classical", String::new()),
    ];
    for (cmd, body) in bodies {
        let first = qgame(&[
            cmd,
            "--config",
            &write(dir.path(), "a.toml", &body),
            "--no-timing",
        ]);
        let echoed = report(&first)["config"].clone();
        let again = qgame(&[
            cmd,
            "--config",
            &write(dir.path(), "b.toml", &toml::to_string(&echoed).unwrap()),
            "--no-timing",
        ]);
        assert_eq!(first.stdout, again.stdout, "{cmd}");
    }
}

#[test]
fn library_round_trip_matches() {
    let cfg = validate(format!("command = \"verify\"\n{VERIFY_CNOT}").as_bytes()).unwrap();
    let again = validate(cfg.to_toml().as_bytes()).unwrap();
    assert_eq!(
        run(&cfg).unwrap().canonical_result(),
        run(&again).unwrap().canonical_result()
    );
}

#[test]
fn minimal_verify_config_gets_defaults() {
    let cfg = validate(format!("command = \"verify\"\n{VERIFY_CNOT}").as_bytes()).unwrap();
    assert_eq!(cfg.command, Command::Verify);
    assert_eq!(cfg.epsilon, 1e-9);
    assert_eq!(
        cfg.convention,
        qgame::inequality_analysis::Convention::Corrected
    );
}

#[test]
fn preset_expands_to_the_standard_targets() {
    let cfg = validate(format!("command = \"verify\"\n{VERIFY_CNOT}").as_bytes()).unwrap();
    let spec = cfg.game_spec().unwrap();
    assert_eq!(spec.targets[0], TargetSet::new(vec![3, 4]).unwrap());
    assert_eq!(spec.targets[1], TargetSet::new(vec![2, 4]).unwrap());
}

#[test]
fn diagnostics_name_fields() {
    let text = format!(
        "command = \"verify\"\n[game]\ntargets1 = []\ntargets2 = [2, 4]\n{}",
        VERIFY_CNOT.replace("[[1, 0], [0, 0]]", "[[0.9486832980505138, 0], [0, 0]]")
    );
    let diags = validate(text.as_bytes()).unwrap_err();
    let find = |field: &str| {
        diags
            .iter()
            .find(|d| d.field == field)
            .unwrap_or_else(|| panic!("no {field} in {diags:?}"))
    };
    assert_eq!(find("game.targets1").message, "empty target set");
    assert!(find("play.b")
        .message
        .starts_with("strategy not normalized"));
}
