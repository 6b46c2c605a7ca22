use crate::ir::{FeatureOrigin, FeatureStatus, GuiDocument, GuiFeature};

use super::ids::feature_id;
use super::EngineError;

fn non_blank(field: &str, text: &str) -> Result<String, EngineError> {
    let t = text.trim();
    if t.is_empty() {
        Err(EngineError::Precondition(format!("feature {field} must not be empty")))
    } else {
        Ok(t.to_string())
    }
}

/// Appends a user-authored pending feature; returns the new document and the
/// assigned feature id.
pub fn add_feature(doc: &GuiDocument, name: &str, description: &str) -> Result<(GuiDocument, String), EngineError> {
    let name = non_blank("name", name)?;
    let description = non_blank("description", description)?;
    let salt = doc.features.len() + doc.revision as usize;
    let id = feature_id(&doc.doc_id, &name, salt, &|c| doc.feature(c).is_some());
    let mut next = doc.clone();
    next.features.push(GuiFeature {
        id: id.clone(),
        name,
        description,
        origin: FeatureOrigin::UserAdded,
        status: FeatureStatus::Pending,
    });
    next.revision += 1;
    Ok((next, id))
}

/// Changes name and/or description. An implemented feature becomes stale and
/// keeps its instances until regenerated.
pub fn edit_feature(
    doc: &GuiDocument,
    id: &str,
    name: Option<&str>,
    description: Option<&str>,
) -> Result<GuiDocument, EngineError> {
    let index = doc.feature_index(id).ok_or_else(|| EngineError::UnknownFeature(id.to_string()))?;
    let name = name.map(|n| non_blank("name", n)).transpose()?;
    let description = description.map(|d| non_blank("description", d)).transpose()?;
    let mut next = doc.clone();
    let feature = &mut next.features[index];
    if let Some(name) = name {
        feature.name = name;
    }
    if let Some(description) = description {
        feature.description = description;
    }
    feature.origin = FeatureOrigin::UserEdited;
    if feature.status == FeatureStatus::Implemented {
        feature.status = FeatureStatus::Stale;
    }
    next.revision += 1;
    Ok(next)
}

/// Removes the feature and every instance it owns.
pub fn delete_feature(doc: &GuiDocument, id: &str) -> Result<GuiDocument, EngineError> {
    let index = doc.feature_index(id).ok_or_else(|| EngineError::UnknownFeature(id.to_string()))?;
    let mut next = doc.clone();
    next.features.remove(index);
    next.instances.retain(|i| i.feature_id != id);
    next.revision += 1;
    Ok(next)
}
