//! A deterministic, rule-based stand-in for the model. It reads the engine's
//! own prompts and answers each stage with schema-valid JSON, which makes it
//! useful for demos, benchmarks and randomized tests without a network.

use serde_json::{json, Map, Value};

use crate::catalog::{AttributeKind, ComponentSpec};
use crate::llm::tokens::{TokenEstimator, WordPunctEstimator};
use crate::llm::{BackendReply, ChatBackend, CompletionOptions, LlmError, PromptPart, Role, Usage};

const FEATURE_LIST_ID: &str = "https://guide.local/schemas/feature-list.json";
const SELECTION_ID: &str = "https://guide.local/schemas/selection-list.json";
const IMPLEMENTATION_ID: &str = "https://guide.local/schemas/feature-implementation.json";

pub struct HeuristicBackend {
    model_id: String,
    max_features: usize,
}

impl Default for HeuristicBackend {
    fn default() -> Self {
        HeuristicBackend { model_id: "heuristic-v1".into(), max_features: 8 }
    }
}

impl HeuristicBackend {
    pub fn new(model_id: impl Into<String>) -> Self {
        HeuristicBackend { model_id: model_id.into(), ..Default::default() }
    }

    /// Answers a prompt built by the engine's templates.
    pub fn answer(&self, parts: &[PromptPart]) -> Result<String, LlmError> {
        let prompt = parts
            .iter()
            .find(|p| p.role == Role::User)
            .map(|p| p.text.as_str())
            .ok_or_else(|| LlmError::Protocol("prompt has no user part".into()))?;
        let value = if prompt.contains(FEATURE_LIST_ID) {
            self.features(prompt)
        } else if prompt.contains(SELECTION_ID) {
            select(prompt)
        } else if prompt.contains(IMPLEMENTATION_ID) {
            implement(prompt)
        } else {
            return Err(LlmError::Protocol("prompt does not name a known output schema".into()));
        };
        Ok(value.to_string())
    }

    fn features(&self, prompt: &str) -> Value {
        let description = between(prompt, "App description:\n", "\n\nAnswer with").unwrap_or_default();
        let features: Vec<Value> = description
            .split(['.', ';', '\n'])
            .map(str::trim)
            .filter(|c| c.chars().any(char::is_alphanumeric))
            .take(self.max_features)
            .map(|clause| {
                let name: Vec<String> = clause.split_whitespace().take(4).map(capitalize).collect();
                json!({"name": name.join(" "), "description": format!("{clause}.")})
            })
            .collect();
        Value::Array(features)
    }
}

impl ChatBackend for HeuristicBackend {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn send(&self, parts: &[PromptPart], _opts: &CompletionOptions) -> Result<BackendReply, LlmError> {
        let text = self.answer(parts)?;
        let est = WordPunctEstimator;
        let usage = Usage {
            prompt_tokens: parts.iter().map(|p| est.estimate(&p.text) as u64).sum(),
            completion_tokens: est.estimate(&text) as u64,
        };
        Ok(BackendReply { text, usage, attempts: 1 })
    }
}

fn between<'a>(text: &'a str, start: &str, end: &str) -> Option<&'a str> {
    let from = text.find(start)? + start.len();
    let to = text[from..].find(end).map_or(text.len(), |i| from + i);
    Some(&text[from..to])
}

fn line_after<'a>(text: &'a str, prefix: &str) -> &'a str {
    text.lines().find_map(|l| l.strip_prefix(prefix)).unwrap_or("")
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            if c.is_uppercase() && !cur.is_empty() && cur.chars().last().is_some_and(char::is_lowercase) {
                out.push(std::mem::take(&mut cur));
            }
            cur.extend(c.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Picks up to two types whose group or type name shares the most words with
/// the feature; falls back to a plain label.
fn select(prompt: &str) -> Value {
    let feature: Vec<String> = words(&format!(
        "{} {}",
        line_after(prompt, "Feature: "),
        line_after(prompt, "Feature description: ")
    ))
    .into_iter()
    .map(|w| w.trim_end_matches('s').to_string())
    .collect();
    let mut scored: Vec<(usize, usize, String)> = Vec::new();
    let mut order = 0;
    for line in prompt.lines() {
        let Some((group, types)) = line.strip_prefix("- ").and_then(|l| l.split_once(": ")) else {
            continue;
        };
        for ty in types.split(", ") {
            let mut vocab = words(group);
            vocab.extend(words(ty));
            let score = vocab
                .iter()
                .filter(|v| feature.iter().any(|f| f == v.trim_end_matches('s')))
                .count();
            scored.push((score, order, ty.to_string()));
            order += 1;
        }
    }
    scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut picked: Vec<String> = scored.iter().filter(|s| s.0 > 0).take(2).map(|s| s.2.clone()).collect();
    if picked.is_empty() {
        let fallback = ["Label", "BodyText"]
            .into_iter()
            .find(|t| scored.iter().any(|s| s.2 == *t))
            .map(str::to_string)
            .or_else(|| scored.first().map(|s| s.2.clone()));
        picked.extend(fallback);
    }
    json!({ "components": picked })
}

fn region(prompt: &str) -> (f64, f64, f64, f64) {
    let line = line_after(prompt, "Place every component inside this region of the screen: ");
    let nums: Vec<f64> = line
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter_map(|t| t.trim_end_matches('.').parse().ok())
        .collect();
    match nums[..] {
        [x0, x1, y0, y1, ..] => (x0, y0, x1 - x0, y1 - y0),
        _ => (0.0, 0.0, 360.0, 120.0),
    }
}

fn attribute_value(spec: &ComponentSpec, name: &str, kind: AttributeKind, label: &str, icon: &str) -> Value {
    let def = spec.attribute(name);
    if let Some(default) = def.and_then(|d| d.default.clone()) {
        return default;
    }
    match kind {
        AttributeKind::String => json!(label),
        AttributeKind::Number => json!(1),
        AttributeKind::Boolean => json!(true),
        AttributeKind::Enum => def
            .and_then(|d| d.allowed_values.as_ref())
            .and_then(|v| v.first().map(|s| json!(s)))
            .unwrap_or(Value::Null),
        AttributeKind::Color => json!("#6750A4"),
        AttributeKind::IconRef => json!(icon),
    }
}

/// Stacks one instance per retrieved spec inside the requested region and
/// fills every required attribute.
fn implement(prompt: &str) -> Value {
    let label = line_after(prompt, "Feature: ").trim();
    let label = if label.is_empty() { "Item" } else { label };
    let specs: Vec<ComponentSpec> = prompt
        .lines()
        .filter(|l| l.starts_with('{'))
        .filter_map(|l| serde_json::from_str(l).ok())
        .collect();
    let icon = between(prompt, "name: glyph:\n", "\n")
        .and_then(|l| l.split(": ").next())
        .unwrap_or("star")
        .to_string();
    let (x, y, w, h) = region(prompt);
    let n = specs.len().max(1) as f64;
    let slot_h = (h / n).max(1.0);
    let comp_h = (slot_h - 8.0).clamp(1.0, 56.0);
    let comp_w = (w - 32.0).max(1.0);
    let instances: Vec<Value> = specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let mut attributes = Map::new();
            for a in spec.attributes.iter().filter(|a| a.required) {
                attributes.insert(a.name.clone(), attribute_value(spec, &a.name, a.kind, label, &icon));
            }
            json!({
                "type_name": spec.type_name,
                "posX": x + 16.0,
                "posY": y + slot_h * i as f64 + 4.0,
                "width": comp_w,
                "height": comp_h,
                "attributes": attributes,
            })
        })
        .collect();
    json!({ "instances": instances })
}
