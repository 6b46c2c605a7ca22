use crate::catalog::{lookup_full_specs, simplify, Catalog, SimplifiedCatalogView};
use crate::ir::{merge_feature_implementation, Frame, GuiDocument, IrError};
use crate::llm::ChatModel;

use super::geometry::band_region;
use super::ids::doc_id_for;
use super::stages::{decompose_for, implement_feature, select_components};
use super::{EngineError, Outcome, PipelineConfig, RunFailure, Stage, StageTrace};

/// Empty document awaiting decomposition.
pub fn new_document(description: &str, frame: Frame) -> Result<GuiDocument, EngineError> {
    if description.trim().is_empty() {
        return Err(EngineError::EmptyDescription);
    }
    if !frame.is_valid() {
        return Err(EngineError::Precondition("frame dimensions must be positive".into()));
    }
    Ok(GuiDocument::new(doc_id_for(description), frame, description))
}

/// Replaces the document's features with a freshly generated, pending list.
/// Existing instances are dropped.
pub fn decompose_into(
    doc: &GuiDocument,
    cfg: &PipelineConfig,
    llm: &dyn ChatModel,
) -> Result<(GuiDocument, Vec<StageTrace>), RunFailure> {
    cfg.validate()?;
    let (features, trace) = decompose_for(&doc.doc_id, &doc.description, cfg, llm)?;
    let mut next = doc.clone();
    next.features = features;
    next.instances.clear();
    next.revision += 1;
    Ok((next, vec![trace]))
}

/// Select, retrieve, implement and merge one feature. Traces are appended to
/// `traces` whether or not the feature succeeds.
fn implement_one(
    doc: &GuiDocument,
    feature_id: &str,
    catalog: &Catalog,
    view: &SimplifiedCatalogView,
    cfg: &PipelineConfig,
    llm: &dyn ChatModel,
    traces: &mut Vec<StageTrace>,
) -> Result<GuiDocument, EngineError> {
    let index = doc
        .feature_index(feature_id)
        .ok_or_else(|| EngineError::UnknownFeature(feature_id.to_string()))?;
    let feature = &doc.features[index];

    let names = match select_components(feature, view, cfg, llm) {
        Ok((names, trace)) => {
            traces.push(trace);
            names
        }
        Err(e) => {
            traces.extend(e.trace().cloned());
            return Err(e);
        }
    };

    let specs = match lookup_full_specs(catalog, &names) {
        Ok(specs) => specs,
        Err(e) => {
            let mut trace = StageTrace::start(Stage::Implement, Some(feature_id));
            trace.error = Some(e.to_string());
            traces.push(trace);
            return Err(EngineError::Precondition(e.to_string()));
        }
    };

    let region = band_region(&doc.frame, index, doc.features.len());
    let instances = match implement_feature(feature, &specs, catalog.icons(), &doc.frame, &region, cfg, llm) {
        Ok((instances, trace)) => {
            traces.push(trace);
            instances
        }
        Err(e) => {
            traces.extend(e.trace().cloned());
            return Err(e);
        }
    };

    merge_feature_implementation(doc, feature_id, instances, catalog).map_err(|e| {
        if let Some(last) = traces.last_mut() {
            last.outcome = Outcome::Failed;
            last.error = Some(e.to_string());
            if let IrError::ValidationFailed(report) = &e {
                last.violations = report.violations.clone();
            }
        }
        EngineError::Merge(e)
    })
}

/// Implements every pending feature in document order. A failing feature
/// stays pending and the run moves on.
pub fn generate_pending(
    doc: &GuiDocument,
    catalog: &Catalog,
    cfg: &PipelineConfig,
    llm: &dyn ChatModel,
) -> Result<(GuiDocument, Vec<StageTrace>), RunFailure> {
    cfg.validate()?;
    let view = simplify(catalog);
    let pending: Vec<String> = doc
        .features
        .iter()
        .filter(|f| f.status == crate::ir::FeatureStatus::Pending)
        .map(|f| f.id.clone())
        .collect();
    let mut current = doc.clone();
    let mut traces = Vec::new();
    for id in pending {
        match implement_one(&current, &id, catalog, &view, cfg, llm, &mut traces) {
            Ok(next) => current = next,
            Err(e) => log::warn!("feature {id} left pending: {e}"),
        }
    }
    Ok((current, traces))
}

/// Decompose, then implement each feature.
pub fn run_pipeline(
    description: &str,
    catalog: &Catalog,
    frame: Frame,
    cfg: &PipelineConfig,
    llm: &dyn ChatModel,
) -> Result<(GuiDocument, Vec<StageTrace>), RunFailure> {
    let doc = new_document(description, frame)?;
    let (doc, mut traces) = decompose_into(&doc, cfg, llm)?;
    let (doc, more) = generate_pending(&doc, catalog, cfg, llm)?;
    traces.extend(more);
    Ok((doc, traces))
}

/// Re-runs selection and implementation for exactly one feature. On failure
/// the input document is untouched and the traces come back in the error.
pub fn regenerate_feature(
    doc: &GuiDocument,
    feature_id: &str,
    catalog: &Catalog,
    cfg: &PipelineConfig,
    llm: &dyn ChatModel,
) -> Result<(GuiDocument, Vec<StageTrace>), RunFailure> {
    cfg.validate()?;
    if doc.feature(feature_id).is_none() {
        return Err(EngineError::UnknownFeature(feature_id.to_string()).into());
    }
    let view = simplify(catalog);
    let mut traces = Vec::new();
    match implement_one(doc, feature_id, catalog, &view, cfg, llm, &mut traces) {
        Ok(next) => Ok((next, traces)),
        Err(error) => Err(RunFailure { error, traces }),
    }
}
