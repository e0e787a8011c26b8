//! Exit-code and override behaviour of the `rhmap` binary.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rhmap"))
}

fn write_config(dir: &std::path::Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(text.as_bytes()).unwrap();
    path
}

const MONODROMY: &str = r#"{
  "command": "monodromy",
  "curve": {"type": "hyperelliptic",
            "coeffs": [["-1","0"],["0","0"],["0","0"],["0","0"],["0","0"],["0","0"],["1","0"]]},
  "connection": {"alpha": [["1/50","0"],["0","1/40"]],
                 "beta":  [["0","0"],["1/30","0"]],
                 "gamma": [["-1/60","0"],["0","0"]]},
  "loops": [{"type":"pair","i":0,"j":1}],
  "seed": 4
}"#;

#[test]
fn success_writes_report_and_svg() {
    let dir = std::env::temp_dir().join(format!("rhmap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = write_config(&dir, "mono.json", MONODROMY);
    let out = dir.join("report.json");
    let svg = dir.join("loops.svg");

    let status = bin()
        .args(["--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&out)
        .args(["--svg"])
        .arg(&svg)
        .status()
        .unwrap();
    assert!(status.success());

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["command"].as_str(), Some("monodromy"));
    assert_eq!(report["seed"].as_u64(), Some(4));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn flag_overrides_beat_config_and_env() {
    let dir = std::env::temp_dir().join(format!("rhmap-cli-ov-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = write_config(&dir, "mono.json", MONODROMY);
    let out = dir.join("report.json");

    let status = bin()
        .env("RHMAP_SEED", "99")
        .args(["--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&out)
        .args(["--seed", "123"])
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["seed"].as_u64(), Some(123));

    // env alone wins over the config file
    let status = bin()
        .env("RHMAP_SEED", "99")
        .args(["--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["seed"].as_u64(), Some(99));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn invalid_config_exits_two() {
    let dir = std::env::temp_dir().join(format!("rhmap-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = write_config(&dir, "bad.json", r#"{"command": "monodromy"}"#);
    let status = bin().args(["--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let cfg = write_config(&dir, "notjson.json", "{nope");
    let status = bin().args(["--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn numerical_failure_exits_three() {
    let dir = std::env::temp_dir().join(format!("rhmap-cli-num-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let starved = MONODROMY.replace(
        "\"seed\": 4",
        "\"seed\": 4, \"tolerances\": {\"max_steps\": 5}",
    );
    let cfg = write_config(&dir, "starved.json", &starved);
    let status = bin().args(["--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn selftest_prints_table() {
    let dir = std::env::temp_dir().join(format!("rhmap-cli-self-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = write_config(&dir, "self.json", r#"{"command":"selftest","seed":1}"#);
    let out = bin()
        .args(["--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(dir.join("r.json"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in ["T1", "T4", "V4", "C3", "S4"] {
        assert!(stdout.contains(name), "missing {name} in selftest table");
    }
    std::fs::remove_dir_all(&dir).ok();
}
