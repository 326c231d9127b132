use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn nicesos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nicesos"))
        .args(args)
        .current_dir(root())
        .env_remove("NICESOS_TOL")
        .output()
        .unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn solve_value(game: &str, hierarchy: &str, level: &str) -> (i32, Value) {
    let out = nicesos(&["solve", "--game", game, "--hierarchy", hierarchy, "--level", level]);
    (out.status.code().unwrap(), report(&out))
}

#[test]
fn solve_reports_the_chsh_value() {
    let (code, r) = solve_value("chsh", "npa", "1");
    assert_eq!(code, 0);
    assert_eq!(r["status"], "optimal");
    let v = r["value"].as_f64().unwrap();
    assert!((v - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-6);
    assert!((r["win_probability"].as_f64().unwrap() - v).abs() < 1e-15);
    for field in ["gap", "primal_value", "dual_value", "wall_time_s", "iterations"] {
        assert!(!r[field].is_null(), "{field}");
    }
}

#[test]
fn solve_reports_matching_and_b3_values() {
    let (code, r) = solve_value("matching", "onpa", "1");
    assert_eq!(code, 0);
    assert!((r["value"].as_f64().unwrap() - 6.0).abs() < 1e-6);
    // 18·P_G − 9 = 6 at P_G = 5/6.
    assert!((r["win_probability"].as_f64().unwrap() - 5.0 / 6.0).abs() < 1e-7);

    let (code, r) = solve_value("b3", "onpa", "2");
    assert_eq!(code, 0);
    assert!((r["value"].as_f64().unwrap() - 6.0).abs() < 1e-5);
    assert!(r["win_probability"].is_null());
}

#[test]
fn bad_input_exits_with_3() {
    for args in [
        vec!["solve", "--game", "nope"],
        vec!["solve", "--game", "chsh", "--level", "0"],
        vec!["solve", "--game", "chsh", "--level", "9"],
        vec!["solve", "--game", "chsh", "--hierarchy", "sideways"],
        vec!["cert", "check-nice", "--cert", "fixtures/missing"],
        vec!["cert", "verify", "--cert", "fixtures/chsh", "--game", "chsh"],
        vec!["games", "export", "--game", "bn:1", "--out", "/tmp/x.json"],
    ] {
        let out = nicesos(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unreachable_tolerance_is_a_solver_failure() {
    let out = nicesos(&["solve", "--game", "chsh", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_ne!(r["status"], "optimal");
    assert!(r["value"].is_null());
}

#[test]
fn fixture_certificates_verify_without_extension() {
    let out = nicesos(&["cert", "verify", "--cert", "fixtures/b3_nice", "--game", "b3", "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["ok"], true);

    let out = nicesos(&["cert", "check-nice", "--cert", "fixtures/b3_nice"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["is_nice"], true);

    let out = nicesos(&["cert", "verify", "--cert", "fixtures/matching_nice.json", "--game", "fixtures/matching", "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn failed_verification_exits_with_1() {
    let out = nicesos(&["cert", "verify", "--cert", "fixtures/b3_nice", "--game", "fixtures/b3", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["ok"], false);
    assert!(r["largest_residuals"].as_array().unwrap().len() <= 5);
}

#[test]
fn tolerance_can_come_from_the_environment() {
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_nicesos"))
            .args(["cert", "verify", "--cert", "fixtures/b3_nice", "--game", "b3"])
            .current_dir(root())
            .env("NICESOS_TOL", tol)
            .output()
            .unwrap()
    };
    assert_eq!(run("1e-9").status.code(), Some(0));
    assert_eq!(run("0").status.code(), Some(1));
}

#[test]
fn nicify_extracted_chsh_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.json");
    let nice = dir.path().join("nice.json");
    let out = nicesos(&["solve", "--game", "chsh", "--cert", raw.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["certificate"], raw.to_str().unwrap());
    let out = nicesos(&["cert", "nicify", "--cert", raw.to_str().unwrap(), "--game", "chsh", "--out", nice.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = nicesos(&["cert", "check-nice", "--cert", nice.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = nicesos(&["cert", "verify", "--cert", nice.to_str().unwrap(), "--game", "chsh", "--tol", "1e-5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn nicify_rejects_degree_two_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("x.json");
    let out = nicesos(&["cert", "nicify", "--cert", "fixtures/b3_nice", "--game", "b3", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn games_list_and_export() {
    let out = nicesos(&["games", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["chsh", "matching", "b3"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }

    let dir = tempfile::tempdir().unwrap();
    let b3 = dir.path().join("b3.json");
    assert_eq!(nicesos(&["games", "export", "--game", "b3", "--out", b3.to_str().unwrap()]).status.code(), Some(0));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&b3).unwrap()).unwrap();
    assert!(file["scale_note"].as_str().unwrap().contains("symmetrized"));

    let chsh = dir.path().join("chsh.json");
    assert_eq!(nicesos(&["games", "export", "--game", "chsh", "--out", chsh.to_str().unwrap()]).status.code(), Some(0));
    let (_, a) = solve_value("chsh", "npa", "2");
    let (_, b) = solve_value(chsh.to_str().unwrap(), "npa", "2");
    assert_eq!(a["value"], b["value"]);
}

#[test]
fn exported_games_match_the_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    for (game, file) in [("chsh", "chsh"), ("matching", "matching"), ("b3", "b3"), ("bn:3", "bn_3")] {
        let out = dir.path().join(format!("{file}.json"));
        assert_eq!(nicesos(&["games", "export", "--game", game, "--out", out.to_str().unwrap()]).status.code(), Some(0));
        let shipped = std::fs::read_to_string(root().join(format!("fixtures/{file}.json"))).unwrap();
        assert_eq!(std::fs::read_to_string(&out).unwrap(), shipped, "{game}");
    }
}

#[test]
fn reports_are_deterministic_apart_from_wall_time() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    let (_, a) = solve_value("matching", "npa", "2");
    let (_, b) = solve_value("matching", "npa", "2");
    assert_eq!(strip(a), strip(b));
}

#[test]
fn report_can_be_written_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = nicesos(&["solve", "--game", "bn:3", "--hierarchy", "onpa", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(saved["game"], "bn:3");
    assert_eq!(saved["hierarchy"], "onpa");
}
