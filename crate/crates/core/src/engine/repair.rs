//! Bounded validate-and-reprompt loop shared by all stages.

use serde_json::Value;

use crate::ir::Violation;
use crate::llm::{ChatModel, PromptPart};

use super::prompts::repair_prompt;
use super::{EngineError, Outcome, PipelineConfig, Stage, StageTrace};

/// Parses model output as JSON, tolerating a surrounding Markdown fence.
pub(crate) fn parse_json(raw: &str) -> Result<Value, Vec<Violation>> {
    let mut text = raw.trim();
    if let Some(rest) = text.strip_prefix("```") {
        let rest = rest.trim_start_matches(|c: char| c.is_ascii_alphanumeric());
        text = rest.strip_suffix("```").unwrap_or(rest).trim();
    }
    serde_json::from_str(text).map_err(|e| vec![Violation::new("", "json-parse", format!("output is not valid JSON: {e}"))])
}

/// Completes `base`, checks the answer, and re-prompts with the violations
/// until the check passes or `1 + max_repair_retries` completions are spent.
pub(crate) fn run_with_repair<T>(
    stage: Stage,
    feature_id: Option<&str>,
    base: Vec<PromptPart>,
    cfg: &PipelineConfig,
    llm: &dyn ChatModel,
    check: impl Fn(&str, &mut StageTrace) -> Result<T, Vec<Violation>>,
) -> Result<(T, StageTrace), EngineError> {
    let opts = cfg.completion_options();
    let mut trace = StageTrace::start(stage, feature_id);
    let mut last: Option<(String, Vec<Violation>)> = None;
    while trace.attempts < cfg.max_attempts() {
        let parts = match &last {
            None => base.clone(),
            Some((raw, violations)) => repair_prompt(&base, raw, violations, cfg)?,
        };
        let exchange = match llm.complete(&parts, &opts) {
            Ok(ex) => ex,
            Err(source) => {
                trace.error = Some(source.to_string());
                if let Some((raw, violations)) = last {
                    trace.violations = violations;
                    trace.last_output = Some(raw);
                }
                return Err(EngineError::LlmUnavailable { stage, source, trace: Box::new(trace) });
            }
        };
        trace.record(&exchange);
        match check(&exchange.response_text, &mut trace) {
            Ok(value) => {
                trace.outcome = if trace.attempts == 1 { Outcome::Ok } else { Outcome::Repaired };
                return Ok((value, trace));
            }
            Err(violations) => last = Some((exchange.response_text, violations)),
        }
    }
    let (raw, violations) = last.unwrap_or_default();
    trace.error = Some(format!("{} violation(s) remain after {} attempt(s)", violations.len(), trace.attempts));
    trace.violations = violations;
    trace.last_output = Some(raw);
    Err(EngineError::RepairExhausted { trace: Box::new(trace) })
}
