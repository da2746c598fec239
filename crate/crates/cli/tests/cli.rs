use std::process::{Command, Output};

use serde_json::Value;

fn moebius(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moebius"))
        .args(args)
        .env_remove("MOEBIUS_MAX_COSETS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn present_prime() {
    let o = moebius(&["present", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("gen: s t x5 y5\n"));
    assert!(text.contains("rel: s^4\n"));

    let o = moebius(&["present", "35", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["generators"].as_array().unwrap().len(), 6);
}

#[test]
fn certify_three_halves() {
    let o = moebius(&["certify", "3/2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("status: Arithmetic"));
    assert!(text.contains("index: 72"));
    assert!(text.contains("level: 9"));

    let o = moebius(&["certify", "3/2", "--json", "--witness"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "Arithmetic");
    assert_eq!(v["index"], 72);
    assert_eq!(v["level"], 9);
    assert!(v["witness"].is_string());
}

#[test]
fn human_and_json_agree() {
    for spec in ["1/2", "2/3", "5/3", "5/9"] {
        let human = stdout(&moebius(&["certify", spec]));
        let v: Value =
            serde_json::from_slice(&moebius(&["certify", spec, "--json"]).stdout).unwrap();
        assert!(human.contains(&format!("status: {}", v["status"].as_str().unwrap())));
        assert!(human.contains(&format!("index: {}", v["index"])));
        assert!(human.contains(&format!("level: {}", v["level"])));
        assert!(human.contains(&format!("word A: {}", v["words"]["A"].as_str().unwrap())));
    }
}

#[test]
fn membership() {
    let o = moebius(&["member", "3/2", "[[0,1],[-1,0]]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "NotInClosure");
    let o = moebius(&["member", "3/2", "[[1,3/2],[0,1]]"]);
    assert_eq!(stdout(&o).trim(), "InG");
    let o = moebius(&["member", "3/2", "[[1,1/3],[0,1]]"]);
    assert_eq!(o.status.code(), Some(1));
    let o = moebius(&["member", "3/2", "[[1,0.5],[0,1]]"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn relator_search() {
    let o = moebius(&["relator", "1/2"]);
    assert_eq!(o.status.code(), Some(0));
    let word = stdout(&o);
    assert!(word.contains('A') && word.contains('B'));
    let o = moebius(&["relator", "1/2", "--bound", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).trim(), "NotFound");
}

#[test]
fn inconclusive_exit_code() {
    let o = moebius(&["certify", "5/2", "--max-cosets", "20000"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("status: Inconclusive"));

    let o = Command::new(env!("CARGO_BIN_EXE_moebius"))
        .args(["certify", "5/2", "--json"])
        .env("MOEBIUS_MAX_COSETS", "20000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "Inconclusive");
    assert!(v["index"].is_null());
}

#[test]
fn usage_errors() {
    for args in [
        &["certify", "4/2"][..],
        &["certify", "3/2", "--strategy", "fast"],
        &["certify", "3/2", "--max-cosets", "0"],
        &["sweep", "2"],
        &["present", "1"],
        &["frobnicate"],
        &[],
    ] {
        assert_eq!(moebius(args).status.code(), Some(64), "{args:?}");
    }
    assert_eq!(moebius(&["--help"]).status.code(), Some(0));
    assert_eq!(moebius(&["--version"]).status.code(), Some(0));
}

#[test]
fn sweep_row() {
    let o = moebius(&["sweep", "3", "--amax", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).take(4).collect();
    let a: Vec<&str> = rows.iter().map(|r| r.split('\t').next().unwrap()).collect();
    assert_eq!(a, ["1", "2", "4", "5"]);
    assert!(rows.iter().all(|r| r.contains("Arithmetic")));
    assert!(text.contains("certified through a = 5"));
}

#[test]
fn verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (spec, extra, code) in [
        ("3/2", None, 0),
        ("2/3", None, 0),
        ("5/2", Some("20000"), 2),
    ] {
        let mut args = vec!["certify", spec, "--json"];
        if let Some(cap) = extra {
            args.extend(["--max-cosets", cap]);
        }
        let o = moebius(&args);
        assert_eq!(o.status.code(), Some(code));
        let path = dir.path().join(format!("{}.json", spec.replace('/', "_")));
        std::fs::write(&path, &o.stdout).unwrap();
        let path = path.to_str().unwrap();
        let v = moebius(&["verify", path]);
        assert_eq!(v.status.code(), Some(code), "{}", stdout(&v));
        assert!(stdout(&v).starts_with("valid"));
        let j: Value =
            serde_json::from_slice(&moebius(&["verify", path, "--json"]).stdout).unwrap();
        let cert: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(j["status"], cert["status"]);
        assert_eq!(j["valid"], true);
    }

    let o = moebius(&["certify", "3/2", "--json"]);
    let mut cert: Value = serde_json::from_slice(&o.stdout).unwrap();
    cert["index"] = Value::from(71);
    let path = dir.path().join("tampered.json");
    std::fs::write(&path, cert.to_string()).unwrap();
    let v = moebius(&["verify", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).starts_with("invalid"));

    let missing = dir.path().join("missing.json");
    assert_eq!(
        moebius(&["verify", missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}
