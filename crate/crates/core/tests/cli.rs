use std::path::Path;
use std::process::{Command, Output};

fn cennet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cennet"))
        .args(args)
        .env("CENNET_LOG", "warn")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn manifest(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_writes_data_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("data");
    let o = cennet(&["generate", "--kind", "category", "--n", "500", "--seed", "3", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("data.csv").is_file());
    assert!(out.join("meta.json").is_file());
    let m = manifest(&out.join("manifest.json"));
    assert_eq!(m["subcommand"], "generate");
    assert_eq!(m["status"], "ok");
    assert_eq!(m["exit_code"], 0);
    let csv = std::fs::read_to_string(out.join("data.csv")).unwrap();
    assert_eq!(csv.lines().count(), 501);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = cennet(&["generate", "--kind", "category", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    let o = cennet(&["train", "--epochs", "0", "--data", "nowhere", "--out", "m.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    let o = cennet(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in ["generate", "sample-bn", "train", "discover", "explain", "evaluate"] {
        assert!(text.contains(sub), "help lacks {sub}");
    }
}

#[test]
fn malformed_network_is_a_data_error_naming_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bn = dir.path().join("bad.bif");
    std::fs::write(
        &bn,
        "network x;\nvariable A { states: a0, a1; }\nprobability ( A ) { table: 0.5 0.5; }\n",
    )
    .unwrap();
    let out = dir.path().join("sampled");
    let o = cennet(&["sample-bn", "--model", s(&bn), "--target", "A", "--n", "100", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("bad.bif"), "{err}");
    let m = manifest(&out.join("manifest.json"));
    assert_eq!(m["status"], "failed");
    assert_eq!(m["exit_code"], 2);
}

#[test]
fn missing_input_is_a_data_error_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let o = cennet(&["train", "--data", s(&dir.path().join("absent")), "--out", s(&model)]);
    assert_eq!(o.status.code(), Some(2));
    let m = manifest(&dir.path().join("model.manifest.json"));
    assert_eq!(m["subcommand"], "train");
    assert!(m["error"].as_str().unwrap().len() > 0);
}

#[test]
fn pipeline_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let steps: Vec<Vec<String>> = vec![
        vec!["sample-bn", "--network", "insurance", "--target", "OtherCar", "--n", "3000", "--out", s(&p("data"))],
        vec!["train", "--data", s(&p("data")), "--epochs", "5", "--out", s(&p("model.json"))],
        vec!["discover", "--model", s(&p("model.json")), "--data", s(&p("data")), "--out", s(&p("report.json"))],
        vec![
            "explain", "--model", s(&p("model.json")), "--report", s(&p("report.json")), "--data", s(&p("data")),
            "--m", "1", "--limit", "3", "--top", "5", "--out", s(&p("explanations.json")),
        ],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    for step in &steps {
        let args: Vec<&str> = step.iter().map(String::as_str).collect();
        let o = cennet(&args);
        assert_eq!(o.status.code(), Some(0), "{}: {}", step[0], String::from_utf8_lossy(&o.stderr));
    }
    let report: serde_json::Value = manifest(&p("report.json"));
    assert_eq!(report["neurons"].as_array().unwrap().len(), 5);
    let lists: serde_json::Value = manifest(&p("explanations.json"));
    let lists = lists.as_array().or_else(|| lists["rows"].as_array()).expect("explanation lists");
    assert_eq!(lists.len(), 3);
    for m in ["model.manifest.json", "report.manifest.json", "explanations.manifest.json"] {
        assert_eq!(manifest(&p(m))["status"], "ok");
    }
}
