//! Exit-status and report contract of the command-line tool.

use std::process::Command;

fn herzlab(args: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_herzlab")).args(args).env_remove("HERZLAB_SEED").output().unwrap();
    (out.status.code(), String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn apnorm_of_the_unit() {
    let (code, out, _) = herzlab(&["apnorm", "--group", "Z_4", "--p", "2", "--function", "ones"]);
    assert_eq!(code, Some(0));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], "pass");
    let e = &v["estimates"]["ap_norm"];
    assert!((e["lower"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((e["upper"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn multnorm_of_a_character() {
    let (code, out, _) = herzlab(&["multnorm", "--group", "Z_3", "--p", "1.5", "--function", "character:1", "--format", "csv"]);
    assert_eq!(code, Some(0));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("name,lower,upper,certificate,method"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        for k in [1, 2] {
            assert!((f[k].parse::<f64>().unwrap() - 1.0).abs() < 1e-6, "{row}");
        }
    }
}

#[test]
fn input_errors_exit_with_three() {
    assert_eq!(herzlab(&["apnorm", "--p", "0.5"]).0, Some(3));
    assert_eq!(herzlab(&["apnorm", "--p", "inf"]).0, Some(3));
    assert_eq!(herzlab(&["apnorm", "--group", "S_9"]).0, Some(3));
    assert_eq!(herzlab(&["apnorm", "--function", "1,2"]).0, Some(3));
    assert_eq!(herzlab(&["no-such-command"]).0, Some(3));

    let dir = std::env::temp_dir().join(format!("herzlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"order": 3, "identity": 0, "table": [0,1,2, 1,1,0, 2,0,1]}"#).unwrap();
    let (code, _, err) = herzlab(&["apnorm", "--group", bad.to_str().unwrap()]);
    assert_eq!(code, Some(3));
    assert!(err.contains("row 1"), "{err}");

    let good = dir.join("z3.json");
    std::fs::write(&good, r#"{"order": 3, "identity": 0, "table": [0,1,2, 1,2,0, 2,0,1]}"#).unwrap();
    assert_eq!(herzlab(&["apnorm", "--group", good.to_str().unwrap(), "--p", "3"]).0, Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn closed_form_exponents_are_accepted_by_pnorm() {
    for p in ["1", "2", "inf"] {
        let (code, out, _) = herzlab(&["pnorm", "--p", p, "--matrix", "1,2;3+1i,4", "--format", "csv"]);
        assert_eq!(code, Some(0), "p={p}");
        assert!(out.contains(",exact,"));
    }
}

#[test]
fn output_file_and_seed_fallback() {
    let dir = std::env::temp_dir().join(format!("herzlab-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let (code, stdout, _) = herzlab(&["apnorm", "--function", "random", "--p", "3", "--seed", "11", "--output", a.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    assert!(stdout.is_empty());
    let b = Command::new(env!("CARGO_BIN_EXE_herzlab"))
        .args(["apnorm", "--function", "random", "--p", "3"])
        .env("HERZLAB_SEED", "11")
        .output()
        .unwrap();
    let strip = |s: &str| s.lines().filter(|l| !l.contains("wall_time")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&std::fs::read_to_string(&a).unwrap()), strip(&String::from_utf8_lossy(&b.stdout)));
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}
