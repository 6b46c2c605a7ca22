//! The three-stage pipeline: feature generation, component selection over the
//! simplified catalog view, and per-feature implementation from the retrieved
//! full specs. Also feature editing and incremental regeneration.

mod editing;
mod geometry;
mod ids;
pub mod offline;
mod pipeline;
pub mod prompts;
mod repair;
pub mod scenario;
mod stages;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{IrError, Violation};
use crate::llm::{ChatExchange, CompletionOptions, LlmError, Usage, DEFAULT_MAX_OUTPUT_TOKENS};

pub use editing::{add_feature, delete_feature, edit_feature};
pub use geometry::{band_region, clamp_instance, Region};
pub use offline::HeuristicBackend;
pub use ids::{doc_id_for, feature_id, slugify};
pub use pipeline::{decompose_into, generate_pending, new_document, regenerate_feature, run_pipeline};
pub use scenario::{play_scenario, scenario_dirs, Scenario, ScenarioEdit, ScenarioRun};
pub use stages::{decompose, implement_feature, select_components};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub max_repair_retries: u32,
    pub max_output_tokens: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    pub system_prompt_template: String,
    pub feature_prompt_template: String,
    pub selection_prompt_template: String,
    pub implementation_prompt_template: String,
    pub repair_prompt_template: String,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_repair_retries: 2,
            max_output_tokens: DEFAULT_MAX_OUTPUT_TOKENS,
            temperature: None,
            system_prompt_template: "system.v1".into(),
            feature_prompt_template: "feature-generation.v1".into(),
            selection_prompt_template: "component-selection.v1".into(),
            implementation_prompt_template: "feature-implementation.v1".into(),
            repair_prompt_template: "repair.v1".into(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.max_output_tokens == 0 {
            return Err(EngineError::Precondition("max_output_tokens must be positive".into()));
        }
        if let Some(t) = self.temperature {
            if !t.is_finite() || t < 0.0 {
                return Err(EngineError::Precondition(format!("temperature {t} is not a valid sampling hint")));
            }
        }
        for (id, needs) in [
            (&self.system_prompt_template, &[][..]),
            (&self.feature_prompt_template, &["description", "schema"][..]),
            (&self.selection_prompt_template, &["library_view", "schema"][..]),
            (&self.implementation_prompt_template, &["component_specs", "icons", "region", "schema"][..]),
            (&self.repair_prompt_template, &["violations"][..]),
        ] {
            prompts::check_template(id, needs)?;
        }
        Ok(())
    }

    /// Upper bound on completions per stage.
    pub fn max_attempts(&self) -> u32 {
        1 + self.max_repair_retries
    }

    pub(crate) fn completion_options(&self) -> CompletionOptions {
        CompletionOptions { max_output_tokens: self.max_output_tokens, temperature: self.temperature }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Decompose,
    Select,
    Implement,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Decompose => "decompose",
            Stage::Select => "select",
            Stage::Implement => "implement",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Ok,
    Repaired,
    Failed,
}

/// Audit record of one pipeline stage. Repair rounds are folded into the
/// stage they repair: `attempts` counts every completion and
/// `exchange_ids` lists them in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTrace {
    pub stage: Stage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_id: Option<String>,
    pub outcome: Outcome,
    pub attempts: u32,
    pub exchange_ids: Vec<String>,
    pub usage: Usage,
    /// Violations of the last failed attempt.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Selected component types (select stage) or types used (implement).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Raw output of the last attempt, kept when the stage failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_output: Option<String>,
}

impl StageTrace {
    pub(crate) fn start(stage: Stage, feature_id: Option<&str>) -> Self {
        StageTrace {
            stage,
            feature_id: feature_id.map(str::to_string),
            outcome: Outcome::Failed,
            attempts: 0,
            exchange_ids: Vec::new(),
            usage: Usage::default(),
            violations: Vec::new(),
            warnings: Vec::new(),
            components: Vec::new(),
            error: None,
            last_output: None,
        }
    }

    pub(crate) fn record(&mut self, exchange: &ChatExchange) {
        self.attempts += 1;
        self.exchange_ids.push(exchange.exchange_id.clone());
        self.usage.prompt_tokens += exchange.usage.prompt_tokens;
        self.usage.completion_tokens += exchange.usage.completion_tokens;
    }
}

/// Token totals over a set of traces.
pub fn total_usage<'a>(traces: impl IntoIterator<Item = &'a StageTrace>) -> Usage {
    traces.into_iter().fold(Usage::default(), |mut acc, t| {
        acc.prompt_tokens += t.usage.prompt_tokens;
        acc.completion_tokens += t.usage.completion_tokens;
        acc
    })
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("description must not be empty")]
    EmptyDescription,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("{stage} stage: model unavailable: {source}")]
    LlmUnavailable {
        stage: Stage,
        #[source]
        source: LlmError,
        trace: Box<StageTrace>,
    },
    #[error("{} stage: output still invalid after {} attempt(s)", .trace.stage, .trace.attempts)]
    RepairExhausted { trace: Box<StageTrace> },
    #[error("merge failed: {0}")]
    Merge(#[from] IrError),
}

impl EngineError {
    pub fn trace(&self) -> Option<&StageTrace> {
        match self {
            EngineError::LlmUnavailable { trace, .. } | EngineError::RepairExhausted { trace } => Some(trace),
            _ => None,
        }
    }
}

/// A failed multi-stage operation, with the traces gathered before failing.
#[derive(Debug, Error)]
#[error("{error}")]
pub struct RunFailure {
    #[source]
    pub error: EngineError,
    pub traces: Vec<StageTrace>,
}

impl From<EngineError> for RunFailure {
    fn from(error: EngineError) -> Self {
        let traces = error.trace().cloned().into_iter().collect();
        RunFailure { error, traces }
    }
}
