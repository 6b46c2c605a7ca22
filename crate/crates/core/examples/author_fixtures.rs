//! Records the fixture corpus from the scripted scenarios.
//!
//! cargo run -p guide-core --example author_fixtures -- fixtures [name...]

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use guide_core::engine::scenario::{DESCRIPTION_FILE, EXCHANGES_FILE};
use guide_core::engine::{play_scenario, scenario_dirs, Scenario};
use guide_core::llm::{FixtureStore, Gateway, ScriptedBackend};
use guide_core::render::{render_svg, RenderOptions};
use guide_core::{Catalog, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let root = PathBuf::from(args.next().unwrap_or_else(|| "fixtures".into()));
    let only: Vec<String> = args.collect();
    let catalog = Catalog::bundled();
    let cfg = PipelineConfig::default();

    for dir in scenario_dirs(&root)? {
        let name = dir.file_name().unwrap().to_string_lossy().to_string();
        if !only.is_empty() && !only.contains(&name) {
            continue;
        }
        let scenario = Scenario::load(&dir)?;
        let exchanges = dir.join(EXCHANGES_FILE);
        if exchanges.exists() {
            fs::remove_file(&exchanges)?;
        }
        let store = Arc::new(FixtureStore::open_or_create(&exchanges)?);
        let backend = Arc::new(ScriptedBackend::new(scenario.model_id.clone(), scenario.rules.clone()));
        let gateway = Gateway::record(backend, store.clone());
        let run = play_scenario(&scenario, &catalog, &cfg, &gateway);
        fs::write(dir.join(DESCRIPTION_FILE), format!("{}\n", scenario.description))?;

        let expected = dir.join("expected");
        if let Some(doc) = run.snapshots.first() {
            fs::create_dir_all(&expected)?;
            fs::write(expected.join("doc.json"), doc.to_json_pretty() + "\n")?;
            fs::write(expected.join("preview.svg"), render_svg(doc, &catalog, &RenderOptions::default())?)?;
        } else if expected.exists() {
            fs::remove_dir_all(&expected)?;
        }
        println!(
            "{name}: {} exchange(s), {} trace(s), {} snapshot(s), errors: {:?}",
            store.len(),
            run.traces.len(),
            run.snapshots.len(),
            run.errors
        );
        for t in &run.traces {
            println!("  {:?} {:?} {:?} attempts={} warnings={:?}", t.stage, t.feature_id, t.outcome, t.attempts, t.warnings);
        }
    }
    Ok(())
}
