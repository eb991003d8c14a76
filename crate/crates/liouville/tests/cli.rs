//! Black-box tests of the command-line binary: exit-code contract,
//! artifact layout, determinism of outputs, and config handling.

use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liouville"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let output = binary().args(args).output().expect("binary runs");
    (
        output.status.code().expect("no signal"),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

/// A configuration small enough that every subcommand finishes quickly.
const SMALL_CONFIG: &str = r#"{
  "profile": { "kind": "gaussian" },
  "grid": { "L": 20.0, "M": 256 },
  "solver": { "tol": 1e-10, "max_iter": 400 },
  "branch": { "lambda_start": 0.05, "lambda_target": 1.0, "steps": 6 }
}"#;

#[test]
fn solve_verify_round_trip_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, SMALL_CONFIG).unwrap();
    let out = dir.path().join("solve");

    let (code, stdout, stderr) = run(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--lambda",
        "0.8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "solve failed:\n{stdout}\n{stderr}");
    for artifact in ["solve_report.json", "v.csv", "w.csv", "verification.json", "manifest.json"] {
        assert!(out.join(artifact).is_file(), "missing {artifact}");
    }

    let (code, stdout, stderr) = run(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        out.join("v.csv").to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "verify failed:\n{stdout}\n{stderr}");
}

#[test]
fn corrupted_solution_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, SMALL_CONFIG).unwrap();
    let out = dir.path().join("solve");
    let (code, _, _) = run(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--lambda",
        "0.8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    // Bump one off-center sample by 5%: breaks evenness and the envelope.
    let text = std::fs::read_to_string(out.join("v.csv")).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let target = lines.len() / 3;
    let (x, v) = lines[target].split_once(',').unwrap();
    let corrupted: f64 = v.parse::<f64>().unwrap() * 1.05;
    lines[target] = format!("{x},{corrupted}");
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, lines.join("\n") + "\n").unwrap();

    let (code, stdout, _) = run(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code, 1, "corrupted data must fail numerically:\n{stdout}");
}

#[test]
fn missing_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, SMALL_CONFIG).unwrap();
    let (code, _, stderr) = run(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        dir.path().join("nope.csv").to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "missing file must be a usage error: {stderr}");
}

#[test]
fn unknown_config_fields_are_a_usage_error_and_leave_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{ "grid": { "L": 20.0, "M": 256 }, "speed": 11 }"#).unwrap();
    let out = dir.path().join("never");
    let (code, _, stderr) = run(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "unknown field must be rejected: {stderr}");
    assert!(stderr.contains("speed"), "error should name the field: {stderr}");
    assert!(!out.exists(), "no artifacts may be written on a config error");
}

#[test]
fn zero_step_branch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("branch");
    let (code, _, _) = run(&[
        "branch",
        "--L",
        "20",
        "--M",
        "128",
        "--steps",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(!out.exists());
}

#[test]
fn conflicting_height_flags_are_rejected() {
    let (code, _, stderr) = run(&["solve", "--lambda", "1.0", "--w0", "0.0"]);
    assert_eq!(code, 2, "clap must reject the conflict: {stderr}");
}

#[test]
fn branch_artifacts_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, SMALL_CONFIG).unwrap();
    let out = dir.path().join("branch");
    let args = [
        "branch",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];

    let artifacts = ["branch.csv", "lambda_map.csv", "final_report.json", "manifest.json"];
    let (code, stdout, stderr) = run(&args);
    assert_eq!(code, 0, "{stdout}\n{stderr}");
    let first: Vec<Vec<u8>> =
        artifacts.iter().map(|a| std::fs::read(out.join(a)).unwrap()).collect();

    std::fs::remove_dir_all(&out).unwrap();
    let (code, _, _) = run(&args);
    assert_eq!(code, 0);
    for (name, before) in artifacts.iter().zip(&first) {
        let after = std::fs::read(out.join(name)).unwrap();
        assert_eq!(&after, before, "{name} is not reproducible");
    }
}

#[test]
fn thread_cap_does_not_change_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, SMALL_CONFIG).unwrap();

    let mut bytes = Vec::new();
    for threads in ["1", "2"] {
        let out = dir.path().join(format!("t{threads}"));
        let status = binary()
            .args(["branch", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .env("LIOUVILLE_NUM_THREADS", threads)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        bytes.push(std::fs::read(out.join("branch.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1], "thread cap changed numerical output");
}

#[test]
fn selftest_passes_normally_and_fails_on_a_degenerate_grid() {
    let (code, stdout, _) = run(&["selftest", "--L", "40", "--M", "2048"]);
    assert_eq!(code, 0, "selftest should pass:\n{stdout}");
    assert!(stdout.contains("pass"), "expected a pass table:\n{stdout}");

    let (code, stdout, _) = run(&["selftest", "--L", "40", "--M", "8"]);
    assert_eq!(code, 1, "M = 8 cannot resolve anything:\n{stdout}");
}

#[test]
fn help_and_version_exit_zero() {
    let (code, stdout, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("solve") && stdout.contains("branch"));
    let (code, _, _) = run(&["--version"]);
    assert_eq!(code, 0);
}

#[test]
fn solve_report_files_agree_with_manifest_grid_hash() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, SMALL_CONFIG).unwrap();
    let out = dir.path().join("solve");
    let (code, _, _) = run(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--lambda",
        "0.6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["config"]["grid"]["M"], 256);
    assert!(manifest["grid_hash"].is_string());
    assert!(manifest["failure"].is_null());

    // The stored field must parse back onto the same grid the manifest hashed.
    let v = liouville::grid::Field::read_csv(std::io::BufReader::new(
        std::fs::File::open(out.join("v.csv")).unwrap(),
    ))
    .unwrap();
    assert_eq!(v.grid().grid_hash(), manifest["grid_hash"].as_str().unwrap());
}
