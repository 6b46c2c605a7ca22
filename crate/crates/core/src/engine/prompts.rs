//! Versioned prompt templates and prompt assembly.
//!
//! Templates live in `templates/<id>.txt` and use `{name}` placeholders.
//! Substitution is a single pass, so placeholder-like text inside inserted
//! values (JSON schemas, user descriptions) is left alone.

use crate::catalog::{render_full_specs, ComponentSpec, IconDef, SimplifiedCatalogView};
use crate::ir::{fragment_schema_text, Frame, FragmentKind, GuiFeature, Violation};
use crate::llm::PromptPart;

use super::{EngineError, PipelineConfig, Region};

const TEMPLATES: &[(&str, &str)] = &[
    ("system.v1", include_str!("../../templates/system.v1.txt")),
    ("feature-generation.v1", include_str!("../../templates/feature-generation.v1.txt")),
    ("component-selection.v1", include_str!("../../templates/component-selection.v1.txt")),
    ("feature-implementation.v1", include_str!("../../templates/feature-implementation.v1.txt")),
    ("repair.v1", include_str!("../../templates/repair.v1.txt")),
];

pub fn template_ids() -> impl Iterator<Item = &'static str> {
    TEMPLATES.iter().map(|(id, _)| *id)
}

pub fn template(id: &str) -> Option<&'static str> {
    TEMPLATES.iter().find(|(t, _)| *t == id).map(|(_, text)| *text)
}

/// Names of the `{placeholder}` tokens in a template, in order of appearance.
pub fn placeholders(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) if is_name(&after[..close]) => {
                out.push(&after[..close]);
                rest = &after[close + 1..];
            }
            _ => rest = after,
        }
    }
    out
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase() || b == b'_')
}

pub(crate) fn check_template(id: &str, needs: &[&str]) -> Result<(), EngineError> {
    let text = template(id).ok_or_else(|| EngineError::Precondition(format!("unknown prompt template `{id}`")))?;
    let present = placeholders(text);
    if let Some(missing) = needs.iter().find(|n| !present.contains(n)) {
        return Err(EngineError::Precondition(format!("template `{id}` lacks placeholder {{{missing}}}")));
    }
    Ok(())
}

/// Replaces each `{name}` with its value in one left-to-right pass.
pub fn fill(text: &str, values: &[(&str, &str)]) -> Result<String, EngineError> {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) if is_name(&after[..close]) => {
                let name = &after[..close];
                let value = values
                    .iter()
                    .find(|(k, _)| *k == name)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| EngineError::Precondition(format!("no value for placeholder {{{name}}}")))?;
                out.push_str(value);
                rest = &after[close + 1..];
            }
            _ => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    Ok(out)
}

fn render(id: &str, values: &[(&str, &str)]) -> Result<String, EngineError> {
    let text = template(id).ok_or_else(|| EngineError::Precondition(format!("unknown prompt template `{id}`")))?;
    fill(text.trim_end(), values)
}

fn with_system(cfg: &PipelineConfig, user: String) -> Result<Vec<PromptPart>, EngineError> {
    Ok(vec![PromptPart::system(render(&cfg.system_prompt_template, &[])?), PromptPart::user(user)])
}

pub fn feature_prompt(description: &str, cfg: &PipelineConfig) -> Result<Vec<PromptPart>, EngineError> {
    let user = render(
        &cfg.feature_prompt_template,
        &[("description", description), ("schema", fragment_schema_text(FragmentKind::FeatureList))],
    )?;
    with_system(cfg, user)
}

pub fn selection_prompt(
    feature: &GuiFeature,
    view: &SimplifiedCatalogView,
    cfg: &PipelineConfig,
) -> Result<Vec<PromptPart>, EngineError> {
    let user = render(
        &cfg.selection_prompt_template,
        &[
            ("feature_name", &feature.name),
            ("feature_description", &feature.description),
            ("library_view", &view.serialized_form),
            ("schema", fragment_schema_text(FragmentKind::SelectionList)),
        ],
    )?;
    with_system(cfg, user)
}

pub fn icon_lines(icons: &[IconDef]) -> String {
    icons.iter().map(|i| format!("{}: {}", i.name, i.glyph)).collect::<Vec<_>>().join("\n")
}

pub fn frame_text(frame: &Frame) -> String {
    format!("{} x {} px", frame.width, frame.height)
}

pub fn implementation_prompt(
    feature: &GuiFeature,
    specs: &[&ComponentSpec],
    icons: &[IconDef],
    frame: &Frame,
    region: &Region,
    cfg: &PipelineConfig,
) -> Result<Vec<PromptPart>, EngineError> {
    let specs_text = render_full_specs(specs.iter().copied());
    let user = render(
        &cfg.implementation_prompt_template,
        &[
            ("frame", &frame_text(frame)),
            ("feature_name", &feature.name),
            ("feature_description", &feature.description),
            ("region", &region.describe()),
            ("component_specs", &specs_text),
            ("icons", &icon_lines(icons)),
            ("schema", fragment_schema_text(FragmentKind::FeatureImplementation)),
        ],
    )?;
    with_system(cfg, user)
}

/// The original prompt, the rejected answer, and the violation list.
pub fn repair_prompt(
    base: &[PromptPart],
    previous_output: &str,
    violations: &[Violation],
    cfg: &PipelineConfig,
) -> Result<Vec<PromptPart>, EngineError> {
    let listed = serde_json::to_string_pretty(violations).expect("violations serialize");
    let mut parts = base.to_vec();
    parts.push(PromptPart::assistant(previous_output));
    parts.push(PromptPart::user(render(&cfg.repair_prompt_template, &[("violations", &listed)])?));
    Ok(parts)
}
