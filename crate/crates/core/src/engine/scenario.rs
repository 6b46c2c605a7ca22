//! Scripted scenarios behind the fixture corpus. A scenario directory holds
//! `scenario.json`, `description.txt` and the recorded `exchanges.jsonl`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::ir::{Frame, GuiDocument};
use crate::llm::{ChatModel, ScriptRule};

use super::editing::edit_feature;
use super::pipeline::{regenerate_feature, run_pipeline};
use super::{PipelineConfig, StageTrace};

pub const SCENARIO_FILE: &str = "scenario.json";
pub const DESCRIPTION_FILE: &str = "description.txt";
pub const EXCHANGES_FILE: &str = "exchanges.jsonl";

/// Edit applied after the first run, followed by a regeneration of the
/// named feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEdit {
    pub feature: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub description: String,
    #[serde(default)]
    pub frame: Frame,
    pub model_id: String,
    pub rules: Vec<ScriptRule>,
    #[serde(default)]
    pub edits: Vec<ScenarioEdit>,
}

impl Scenario {
    pub fn load(dir: &Path) -> Result<Scenario, String> {
        let path = dir.join(SCENARIO_FILE);
        let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Scenario directories under `root`, sorted by name.
pub fn scenario_dirs(root: &Path) -> Result<Vec<PathBuf>, String> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| format!("{}: {e}", root.display()))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.join(SCENARIO_FILE).is_file())
        .collect();
    dirs.sort();
    Ok(dirs)
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    /// After the pipeline, then after each edit and regeneration.
    pub snapshots: Vec<GuiDocument>,
    pub traces: Vec<StageTrace>,
    pub errors: Vec<String>,
}

impl ScenarioRun {
    pub fn last(&self) -> Option<&GuiDocument> {
        self.snapshots.last()
    }
}

/// Runs the pipeline on the scenario's description, then each edit. A
/// failed regeneration keeps the previous document.
pub fn play_scenario(scenario: &Scenario, catalog: &Catalog, cfg: &PipelineConfig, llm: &dyn ChatModel) -> ScenarioRun {
    let mut run = ScenarioRun { snapshots: Vec::new(), traces: Vec::new(), errors: Vec::new() };
    let mut doc = match run_pipeline(&scenario.description, catalog, scenario.frame, cfg, llm) {
        Ok((doc, traces)) => {
            run.traces.extend(traces);
            doc
        }
        Err(failure) => {
            run.traces.extend(failure.traces);
            run.errors.push(failure.error.to_string());
            return run;
        }
    };
    run.snapshots.push(doc.clone());
    for edit in &scenario.edits {
        let Some(id) = doc.features.iter().find(|f| f.name == edit.feature).map(|f| f.id.clone()) else {
            run.errors.push(format!("no feature named `{}`", edit.feature));
            continue;
        };
        match edit_feature(&doc, &id, edit.name.as_deref(), edit.description.as_deref()) {
            Ok(next) => doc = next,
            Err(e) => {
                run.errors.push(e.to_string());
                continue;
            }
        }
        match regenerate_feature(&doc, &id, catalog, cfg, llm) {
            Ok((next, traces)) => {
                run.traces.extend(traces);
                doc = next;
            }
            Err(failure) => {
                run.traces.extend(failure.traces);
                run.errors.push(failure.error.to_string());
            }
        }
        run.snapshots.push(doc.clone());
    }
    run
}
