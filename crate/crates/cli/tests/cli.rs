mod common;

use common::{command_configs, run, stdout_json};
use serde_json::json;

#[test]
fn every_command_succeeds_and_echoes_its_config() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, cfg) in command_configs() {
        let doc = stdout_json(&run(dir.path(), cmd, &cfg, &[]));
        assert_eq!(doc["schemaVersion"], 1, "{cmd}");
        assert_eq!(doc["command"], cmd);
        assert!(doc["result"].is_object() || doc["result"].is_array(), "{cmd}");
        // the resolved config is itself a valid config and reproduces the result
        let again = stdout_json(&run(dir.path(), cmd, &doc["config"], &[]));
        assert_eq!(again["result"], doc["result"], "{cmd}");
        assert_eq!(again["config"], doc["config"], "{cmd}");
    }
}

#[test]
fn sweep_csv_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = json!({"space": "hardy(1)", "function": {"family": "shifted", "a": 1.0}, "nMax": 15});
    let out = run(dir.path(), "sweep", &cfg, &["--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("degree,residual,gramCondition,solveMethod"));
    let mut count = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let n: f64 = cols[0].parse().unwrap();
        let r: f64 = cols[1].parse().unwrap();
        assert!((r * r * (n + 2.0) - 1.0).abs() < 1e-9, "{line}");
        count += 1;
    }
    assert_eq!(count, 16);
    assert!(out_dir.join("sweep.json").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |cmd: &str, cfg: serde_json::Value| run(dir.path(), cmd, &cfg, &[]).status.code();
    let one = json!({"family": "constant", "value": 1.0});
    assert_eq!(code("index", json!({"space": "hardy(1)", "function": one})), Some(0));
    // validation: unknown field, zero function, missing seed, bad schema, dimension mismatch
    assert_eq!(code("index", json!({"space": "hardy(1)", "functoin": one})), Some(2));
    assert_eq!(code("index", json!({"space": "hardy(1)", "function": {"family": "constant", "value": 0.0}})), Some(2));
    assert_eq!(
        code("perturb", json!({"space": "hardy(1)", "function": one, "variant": "weight", "epsilon": 0.1})),
        Some(2)
    );
    assert_eq!(code("index", json!({"schemaVersion": 2, "space": "hardy(1)", "function": one})), Some(2));
    assert_eq!(
        code("index", json!({"space": "hardy(1)", "function": {"family": "monomial", "exponents": [1, 1]}})),
        Some(2)
    );
    // numeric: moments so small the shifted columns are rank deficient in double precision
    let moments: Vec<f64> = (0..41).map(|j| 1e-40f64.powi(j).max(1e-300)).collect();
    let space = json!({"kind": "diagonal_besov", "d": 1, "N": 0, "moments": moments, "maxDegree": 20});
    assert_eq!(code("index", json!({"space": space, "function": one, "n": 10})), Some(3));
    // unreadable output directory is an I/O failure
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = run(
        dir.path(),
        "index",
        &json!({"space": "hardy(1)", "function": one}),
        &["--out", blocker.join("sub").to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"space": "drury_arveson(2)", "function": {"family": "shifted", "a": 1.0}, "nMax": 8});
    let a = run(dir.path(), "sweep", &cfg, &["--threads", "1"]);
    let b = run(dir.path(), "sweep", &cfg, &["--threads", "4"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn empty_cloud_has_zero_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let doc = stdout_json(&run(dir.path(), "capacity", &json!({"cloud": []}), &[]));
    assert_eq!(doc["result"]["capacity"], 0.0);
}
