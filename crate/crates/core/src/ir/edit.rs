use std::collections::{BTreeMap, BTreeSet};

use super::{validate_document, ComponentInstance, FeatureStatus, GuiDocument, IrError, ValidationReport, Violation};
use crate::catalog::Catalog;

/// Replaces the instances owned by one feature and marks it implemented.
///
/// Instances of every other feature are carried over untouched and in order.
/// The new instances take the position of the feature's first old instance,
/// or go to the end when the feature had none.
pub fn merge_feature_implementation(
    doc: &GuiDocument,
    feature_id: &str,
    instances: Vec<ComponentInstance>,
    catalog: &Catalog,
) -> Result<GuiDocument, IrError> {
    let idx = doc
        .feature_index(feature_id)
        .ok_or_else(|| IrError::UnknownFeature(feature_id.to_string()))?;

    let mut pre = Vec::new();
    if instances.is_empty() {
        pre.push(Violation::new(
            format!("/features/{idx}"),
            "implemented-without-instances",
            format!("feature `{feature_id}` cannot be implemented by zero instances"),
        ));
    }
    for (i, inst) in instances.iter().enumerate() {
        for (depth_idx, node) in inst.walk().into_iter().enumerate() {
            if node.feature_id != feature_id {
                pre.push(Violation::new(
                    format!("/instances/{i}"),
                    "feature-mismatch",
                    format!(
                        "instance #{depth_idx} `{}` belongs to `{}`, not `{feature_id}`",
                        node.instance_id, node.feature_id
                    ),
                ));
            }
        }
    }
    if !pre.is_empty() {
        return Err(IrError::ValidationFailed(ValidationReport::from_violations(pre)));
    }

    let insert_at = doc.instances.iter().position(|i| i.feature_id == feature_id);
    let mut merged: Vec<ComponentInstance> = Vec::with_capacity(doc.instances.len() + instances.len());
    let mut pending = Some(instances);
    for (pos, inst) in doc.instances.iter().enumerate() {
        if Some(pos) == insert_at {
            merged.extend(pending.take().unwrap_or_default());
        }
        if inst.feature_id != feature_id {
            merged.push(inst.clone());
        }
    }
    if let Some(rest) = pending {
        merged.extend(rest);
    }

    let mut next = doc.clone();
    next.instances = merged;
    next.features[idx].status = FeatureStatus::Implemented;
    next.revision += 1;

    let report = validate_document(&next, catalog);
    if report.valid {
        Ok(next)
    } else {
        Err(IrError::ValidationFailed(report))
    }
}

/// Feature ids whose owned instance sets differ between two revisions of the
/// same document. Instances are compared structurally, independent of order.
pub fn diff_documents(a: &GuiDocument, b: &GuiDocument) -> Result<BTreeSet<String>, IrError> {
    if a.doc_id != b.doc_id {
        return Err(IrError::DocumentMismatch(a.doc_id.clone(), b.doc_id.clone()));
    }
    let owned = |doc: &GuiDocument| {
        let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for inst in &doc.instances {
            map.entry(inst.feature_id.clone())
                .or_default()
                .push(serde_json::to_string(inst).expect("instance serializes"));
        }
        for list in map.values_mut() {
            list.sort();
        }
        map
    };
    let left = owned(a);
    let right = owned(b);
    let ids: BTreeSet<&String> = left.keys().chain(right.keys()).collect();
    Ok(ids
        .into_iter()
        .filter(|id| left.get(*id) != right.get(*id))
        .cloned()
        .collect())
}
