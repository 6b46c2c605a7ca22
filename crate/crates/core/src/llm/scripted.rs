//! Offline transports used to author fixtures and drive tests.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::tokens::{TokenEstimator, WordPunctEstimator};
use super::{BackendReply, ChatBackend, CompletionOptions, LlmError, PromptPart, Usage};

/// Answers prompts containing every `when` substring. The n-th matching call
/// gets `responses[n]`; the last response repeats once the list runs out.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptRule {
    pub when: Vec<String>,
    pub responses: Vec<String>,
}

impl ScriptRule {
    pub fn new<S: Into<String>>(when: impl IntoIterator<Item = S>, responses: impl IntoIterator<Item = String>) -> Self {
        ScriptRule {
            when: when.into_iter().map(Into::into).collect(),
            responses: responses.into_iter().collect(),
        }
    }
}

/// First-match rule table standing in for a model.
pub struct ScriptedBackend {
    model_id: String,
    rules: Vec<ScriptRule>,
    hits: Mutex<Vec<usize>>,
}

impl ScriptedBackend {
    pub fn new(model_id: impl Into<String>, rules: Vec<ScriptRule>) -> Self {
        let hits = Mutex::new(vec![0; rules.len()]);
        ScriptedBackend { model_id: model_id.into(), rules, hits }
    }
}

fn usage_for(parts: &[PromptPart], text: &str) -> Usage {
    let est = WordPunctEstimator;
    Usage {
        prompt_tokens: parts.iter().map(|p| est.estimate(&p.text) as u64).sum(),
        completion_tokens: est.estimate(text) as u64,
    }
}

impl ChatBackend for ScriptedBackend {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn send(&self, parts: &[PromptPart], _opts: &CompletionOptions) -> Result<BackendReply, LlmError> {
        let prompt: String = parts.iter().map(|p| p.text.as_str()).collect::<Vec<_>>().join("\n");
        let idx = self
            .rules
            .iter()
            .position(|r| r.when.iter().all(|w| prompt.contains(w.as_str())))
            .ok_or_else(|| LlmError::Protocol("no scripted rule matches the prompt".into()))?;
        let rule = &self.rules[idx];
        let n = {
            let mut hits = self.hits.lock().expect("hits lock");
            let n = hits[idx];
            hits[idx] += 1;
            n
        };
        let text = rule
            .responses
            .get(n)
            .or_else(|| rule.responses.last())
            .cloned()
            .ok_or_else(|| LlmError::Protocol("scripted rule has no responses".into()))?;
        Ok(BackendReply { usage: usage_for(parts, &text), text, attempts: 1 })
    }
}

/// A transport computed by a closure over the prompt.
pub struct FnBackend<F> {
    model_id: String,
    respond: F,
}

impl<F> FnBackend<F>
where
    F: Fn(&[PromptPart]) -> Result<String, LlmError> + Send + Sync,
{
    pub fn new(model_id: impl Into<String>, respond: F) -> Self {
        FnBackend { model_id: model_id.into(), respond }
    }
}

impl<F> ChatBackend for FnBackend<F>
where
    F: Fn(&[PromptPart]) -> Result<String, LlmError> + Send + Sync,
{
    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn send(&self, parts: &[PromptPart], _opts: &CompletionOptions) -> Result<BackendReply, LlmError> {
        let text = (self.respond)(parts)?;
        Ok(BackendReply { usage: usage_for(parts, &text), text, attempts: 1 })
    }
}
