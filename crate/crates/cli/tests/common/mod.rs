#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cyclicity")
}

/// Runs `cyclicity <cmd>` on `cfg`, writing the config into `dir`.
pub fn run(dir: &Path, cmd: &str, cfg: &Value, extra: &[&str]) -> Output {
    let path = dir.join(format!("{cmd}-{}.json", config_tag(cfg)));
    std::fs::write(&path, serde_json::to_string(cfg).unwrap()).unwrap();
    Command::new(bin())
        .arg(cmd)
        .arg("--config")
        .arg(&path)
        .args(extra)
        .env_remove("CYCLICITY_THREADS")
        .output()
        .expect("cannot launch cyclicity")
}

fn config_tag(cfg: &Value) -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    cfg.to_string().hash(&mut h);
    h.finish()
}

pub fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is not JSON")
}

/// One small configuration per command; the stochastic ones carry a seed.
pub fn command_configs() -> Vec<(&'static str, Value)> {
    let shifted = json!({"family": "shifted", "a": 1.0});
    vec![
        ("index", json!({"space": "hardy(1)", "function": shifted, "n": 6})),
        ("sweep", json!({"space": "bergman(1)", "function": shifted, "nMax": 12})),
        (
            "free-index",
            json!({
                "freeSpace": "free_hardy(2)",
                "freeFunction": [
                    {"letters": [], "re": 1.0, "im": 0.0},
                    {"letters": [1, 2], "re": -0.5, "im": 0.25}
                ],
                "n": 3
            }),
        ),
        (
            "compress-check",
            json!({
                "freeSpace": "free_hardy(2)",
                "freeFunction": [
                    {"letters": [], "re": 1.0, "im": 0.0},
                    {"letters": [1], "re": -0.7, "im": 0.0},
                    {"letters": [2, 1], "re": 0.3, "im": 0.0}
                ],
                "n": 4
            }),
        ),
        (
            "corona-check",
            json!({
                "space": "hardy(1)",
                "function": {"family": "shifted", "a": 2.0},
                "freeSpace": "free_hardy(2)",
                "freeFunction": [
                    {"letters": [], "re": 2.0, "im": 0.0},
                    {"letters": [1], "re": -1.0, "im": 0.0}
                ],
                "samples": 20,
                "maxLength": 5,
                "seed": 11
            }),
        ),
        (
            "capacity",
            json!({
                "space": "hardy(2)",
                "function": {"family": "shifted", "a": 1.0, "variable": 1},
                "resolution": 300,
                "seed": 5,
                "maxIter": 20000
            }),
        ),
        ("dimension", json!({"space": "hardy(1)", "function": {"family": "shifted", "a": 1.0, "power": 2}})),
        (
            "perturb",
            json!({"space": "dirichlet_type(1)", "function": shifted, "n": 8, "variant": "weight", "epsilon": 0.05, "seed": 3}),
        ),
        (
            "mixed-norm",
            json!({
                "function": shifted,
                "mixed": {
                    "d": 2, "N": 0, "p": 3.0, "q": 1.5,
                    "radial": {"kind": "power_weight", "beta": 1.0},
                    "angular": {"kind": "monte_carlo", "m": 2000, "seed": 9}
                }
            }),
        ),
        (
            "varexp-norm",
            json!({
                "function": shifted,
                "varexp": {
                    "d": 1, "N": 1,
                    "exponent": {"a": 1.5, "b": 1.0, "c": 2.0},
                    "radial": {"kind": "power_weight", "beta": 1.0},
                    "angular": {"kind": "trapezoid", "m": 128}
                }
            }),
        ),
        (
            "mixed-index",
            json!({
                "function": shifted,
                "nMax": 3,
                "mixed": {
                    "d": 1, "N": 0, "p": 1.5, "q": 3.0,
                    "radial": {"kind": "point_mass"},
                    "angular": {"kind": "trapezoid", "m": 128}
                }
            }),
        ),
        ("report", json!({"space": "hardy(1)", "function": {"family": "shifted", "a": 2.0}, "nMax": 10, "resolution": 1024})),
    ]
}
