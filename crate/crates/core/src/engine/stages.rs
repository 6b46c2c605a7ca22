use std::collections::HashSet;

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::catalog::{ComponentSpec, IconDef, SimplifiedCatalogView};
use crate::ir::{
    validate_fragment_kind, validate_fragment_shape, ComponentInstance, FeatureOrigin, FeatureStatus, Frame,
    FragmentKind, GuiFeature, SpecSubset, Violation,
};
use crate::llm::ChatModel;

use super::geometry::clamp_instance;
use super::ids::{doc_id_for, feature_id};
use super::prompts::{feature_prompt, implementation_prompt, selection_prompt};
use super::repair::{parse_json, run_with_repair};
use super::{EngineError, PipelineConfig, Region, Stage, StageTrace};

#[derive(Deserialize)]
struct FeatureDraft {
    name: String,
    description: String,
}

#[derive(Deserialize)]
struct Selection {
    components: Vec<String>,
}

#[derive(Deserialize)]
struct Implementation {
    instances: Vec<InstanceDraft>,
}

#[derive(Deserialize)]
struct InstanceDraft {
    type_name: String,
    #[serde(rename = "posX")]
    pos_x: f64,
    #[serde(rename = "posY")]
    pos_y: f64,
    width: f64,
    height: f64,
    #[serde(default)]
    attributes: Map<String, Value>,
    #[serde(default)]
    icon: Option<String>,
    #[serde(default)]
    slot: Option<String>,
    #[serde(default)]
    children: Vec<InstanceDraft>,
}

fn shape_checked(raw: &str, kind: FragmentKind) -> Result<Value, Vec<Violation>> {
    let value = parse_json(raw)?;
    let report = validate_fragment_shape(&value, kind);
    if report.valid {
        Ok(value)
    } else {
        Err(report.violations)
    }
}

fn decode<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T, Vec<Violation>> {
    serde_json::from_value(value).map_err(|e| vec![Violation::new("", "type", e.to_string())])
}

/// Feature list for `description`, with ids derived from `doc_id`.
pub(crate) fn decompose_for(
    doc_id: &str,
    description: &str,
    cfg: &PipelineConfig,
    llm: &dyn ChatModel,
) -> Result<(Vec<GuiFeature>, StageTrace), EngineError> {
    if description.trim().is_empty() {
        return Err(EngineError::EmptyDescription);
    }
    let base = feature_prompt(description, cfg)?;
    let (drafts, trace) = run_with_repair(Stage::Decompose, None, base, cfg, llm, |raw, _| {
        let drafts: Vec<FeatureDraft> = decode(shape_checked(raw, FragmentKind::FeatureList)?)?;
        let mut blank = Vec::new();
        for (i, d) in drafts.iter().enumerate() {
            for (field, text) in [("name", &d.name), ("description", &d.description)] {
                if text.trim().is_empty() {
                    blank.push(Violation::new(format!("/{i}/{field}"), "min-length", format!("{field} is blank")));
                }
            }
        }
        if blank.is_empty() {
            Ok(drafts)
        } else {
            Err(blank)
        }
    })?;
    let mut taken: HashSet<String> = HashSet::new();
    let features = drafts
        .into_iter()
        .enumerate()
        .map(|(ordinal, d)| {
            let name = d.name.trim().to_string();
            let id = feature_id(doc_id, &name, ordinal, &|c| taken.contains(c));
            taken.insert(id.clone());
            GuiFeature {
                id,
                name,
                description: d.description.trim().to_string(),
                origin: FeatureOrigin::Generated,
                status: FeatureStatus::Pending,
            }
        })
        .collect();
    Ok((features, trace))
}

/// Stage 1: high-level description to a pending feature list.
pub fn decompose(
    description: &str,
    cfg: &PipelineConfig,
    llm: &dyn ChatModel,
) -> Result<(Vec<GuiFeature>, StageTrace), EngineError> {
    decompose_for(&doc_id_for(description), description, cfg, llm)
}

/// Stage 2: component types for one feature, picked from the simplified view.
/// Names outside the view are sent back as violations.
pub fn select_components(
    feature: &GuiFeature,
    view: &SimplifiedCatalogView,
    cfg: &PipelineConfig,
    llm: &dyn ChatModel,
) -> Result<(Vec<String>, StageTrace), EngineError> {
    if view.is_empty() {
        return Err(EngineError::Precondition("simplified catalog view is empty".into()));
    }
    let base = selection_prompt(feature, view, cfg)?;
    let (names, mut trace) = run_with_repair(Stage::Select, Some(&feature.id), base, cfg, llm, |raw, _| {
        let value = shape_checked(raw, FragmentKind::SelectionList)?;
        let selection: Selection = decode(value)?;
        let unknown: Vec<Violation> = selection
            .components
            .iter()
            .enumerate()
            .filter(|(_, n)| !view.contains(n))
            .map(|(i, n)| {
                Violation::new(
                    format!("/components/{i}"),
                    "unknown-type",
                    format!("`{n}` is not a component type of the library"),
                )
            })
            .collect();
        if !unknown.is_empty() {
            return Err(unknown);
        }
        let mut seen = HashSet::new();
        Ok(selection.components.into_iter().filter(|n| seen.insert(n.clone())).collect::<Vec<_>>())
    })?;
    trace.components = names.clone();
    Ok((names, trace))
}

fn build_instance(draft: InstanceDraft, feature_id: &str, next: &mut usize) -> ComponentInstance {
    *next += 1;
    let instance_id = format!("{feature_id}-{next}");
    let children = draft.children.into_iter().map(|c| build_instance(c, feature_id, next)).collect();
    ComponentInstance {
        instance_id,
        type_name: draft.type_name,
        feature_id: feature_id.to_string(),
        pos_x: draft.pos_x,
        pos_y: draft.pos_y,
        width: draft.width,
        height: draft.height,
        attributes: draft.attributes,
        icon: draft.icon,
        slot: draft.slot,
        children,
    }
}

/// Stage 3: positioned instances for one feature. The prompt carries only
/// the retrieved specs, the icon collection, the general attributes and the
/// fragment schema. Instances get engine-assigned ids, are tagged with the
/// feature, and are clamped into the frame.
pub fn implement_feature(
    feature: &GuiFeature,
    specs: &[&ComponentSpec],
    icons: &[IconDef],
    frame: &Frame,
    region: &Region,
    cfg: &PipelineConfig,
    llm: &dyn ChatModel,
) -> Result<(Vec<ComponentInstance>, StageTrace), EngineError> {
    if specs.is_empty() {
        return Err(EngineError::Precondition("no component specs to implement with".into()));
    }
    if !frame.is_valid() {
        return Err(EngineError::Precondition("frame dimensions must be positive".into()));
    }
    let resolver = SpecSubset { specs: specs.to_vec(), icons };
    let base = implementation_prompt(feature, specs, icons, frame, region, cfg)?;
    let (instances, mut trace) =
        run_with_repair(Stage::Implement, Some(&feature.id), base, cfg, llm, |raw, trace| {
            let value = parse_json(raw)?;
            let report = validate_fragment_kind(&value, FragmentKind::FeatureImplementation, &resolver);
            if !report.valid {
                return Err(report.violations);
            }
            let implementation: Implementation = decode(value)?;
            let mut next = 0;
            let mut warnings = Vec::new();
            let instances: Vec<ComponentInstance> = implementation
                .instances
                .into_iter()
                .map(|d| {
                    let mut inst = build_instance(d, &feature.id, &mut next);
                    clamp_instance(&mut inst, frame, &mut warnings);
                    inst
                })
                .collect();
            trace.warnings = warnings;
            Ok(instances)
        })?;
    let mut used: Vec<String> = Vec::new();
    for inst in instances.iter().flat_map(|i| i.walk()) {
        if !used.contains(&inst.type_name) {
            used.push(inst.type_name.clone());
        }
    }
    trace.components = used;
    Ok((instances, trace))
}
