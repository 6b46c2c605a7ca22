use std::fs;
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};
use std::time::Duration;

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn guide() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_guide"));
    cmd.env_remove("GUIDE_LLM_API_KEY").env_remove("GUIDE_LLM_MODE");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("guide runs")
}

fn replay_args(scenario: &str) -> Vec<String> {
    let fx = fixtures().join(scenario);
    vec![
        "generate".into(),
        "--description-file".into(),
        fx.join("description.txt").display().to_string(),
        "--mode".into(),
        "replay".into(),
        "--fixtures".into(),
        fx.join("exchanges.jsonl").display().to_string(),
    ]
}

#[test]
fn catalog_stats_reports_reduction() {
    let out = run(guide().args(["catalog", "stats"]));
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("reduction ratio:"));

    let out = run(guide().args(["catalog", "stats", "--json"]));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["ratio"].as_f64().unwrap() >= 0.5);
    assert!(report["simplified_tokens"].as_u64() < report["full_tokens"].as_u64());

    let out = run(guide().args(["catalog", "stats", "--estimator", "nope"]));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = fixtures().join("todo-app/expected/doc.json");
    assert_eq!(run(guide().arg("validate").arg(&good)).status.code(), Some(0));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, fs::read_to_string(&good).unwrap().replacen("\"SearchBar\"", "\"HoloPanel\"", 1)).unwrap();
    let out = run(guide().arg("validate").arg(&bad));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[unknown-type]"));

    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{ not json").unwrap();
    assert_eq!(run(guide().arg("validate").arg(&junk)).status.code(), Some(1));
}

#[test]
fn replay_without_fixtures_is_a_usage_error() {
    let out = run(guide().args(["generate", "--description-file", "/nonexistent", "--mode", "replay"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--fixtures"));
}

#[test]
fn generate_replays_login_with_clamp_warning() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("doc.json");
    let traces = dir.path().join("traces.json");
    let out = run(guide().args(replay_args("login")).arg("--out").arg(&doc).arg("--traces").arg(&traces));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("clamped to 48"));
    assert_eq!(run(guide().arg("validate").arg(&doc)).status.code(), Some(0));
    let traces: Value = serde_json::from_str(&fs::read_to_string(&traces).unwrap()).unwrap();
    assert!(!traces.as_array().unwrap().is_empty());
}

#[test]
fn generate_fails_when_decomposition_cannot_be_repaired() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("doc.json");
    let traces = dir.path().join("traces.json");
    let out = run(guide().args(replay_args("unrepairable-decompose")).arg("--out").arg(&doc).arg("--traces").arg(&traces));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3 attempt(s)"));
    assert!(!doc.exists());
    let traces: Value = serde_json::from_str(&fs::read_to_string(&traces).unwrap()).unwrap();
    assert_eq!(traces[0]["outcome"], "failed");
}

#[test]
fn heuristic_record_then_replay_gives_the_same_document() {
    let dir = tempfile::tempdir().unwrap();
    let desc = dir.path().join("app.txt");
    fs::write(&desc, "A weather app. A search bar for cities. A card with today's forecast.\n").unwrap();
    let fx = dir.path().join("ex.jsonl");
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    let live = dir.path().join("live.json");

    let base = |mode: &str, out: &PathBuf| {
        let mut cmd = guide();
        cmd.arg("generate").arg("--description-file").arg(&desc).args(["--backend", "heuristic", "--mode", mode]);
        if mode != "live" {
            cmd.arg("--fixtures").arg(&fx);
        }
        cmd.arg("--out").arg(out);
        cmd
    };
    assert!(run(&mut base("record", &first)).status.success());
    assert!(run(&mut base("replay", &second)).status.success());
    assert!(run(&mut base("live", &live)).status.success());
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    assert_eq!(fs::read(&first).unwrap(), fs::read(&live).unwrap());
    let fixture_text = fs::read_to_string(&fx).unwrap();
    assert!(fixture_text.lines().count() >= 3);
}

#[test]
fn render_scales_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("x.svg");
    let doc = fixtures().join("todo-app/expected/doc.json");
    let out = run(guide().arg("render").arg(&doc).arg("--svg").arg(&svg).args(["--scale", "2", "--outlines"]));
    assert!(out.status.success());
    let text = fs::read_to_string(&svg).unwrap();
    let tree = roxmltree::Document::parse(&text).unwrap();
    let root = tree.root_element();
    assert_eq!(root.attribute("width"), Some("824"));
    assert!(tree.descendants().any(|n| n.attribute("class") == Some("feature-outline")));
}

#[test]
fn openapi_matches_the_committed_document() {
    let out = run(guide().arg("openapi"));
    let committed = fs::read_to_string(fixtures().join("../docs/openapi.json")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), committed);
}

#[test]
fn serve_answers_health() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let data = tempfile::tempdir().unwrap();
    let mut child = guide()
        .args(["serve", "--port", &port.to_string(), "--backend", "heuristic", "--mode", "live", "--data-dir"])
        .arg(data.path())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let url = format!("http://127.0.0.1:{port}/health");
    let mut healthy = false;
    for _ in 0..200 {
        if let Ok(r) = reqwest::blocking::get(&url) {
            healthy = r.status().is_success();
            break;
        }
        std::thread::sleep(Duration::from_millis(25));
    }
    let _ = child.kill();
    let _ = child.wait();
    assert!(healthy);
}
