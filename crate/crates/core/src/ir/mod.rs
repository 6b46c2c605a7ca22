//! The open GUI prototype representation and its validators.
//!
//! A [`GuiDocument`] is a plain value: mutations return a new document with a
//! higher revision. Validation only detects problems; it never repairs them.

mod edit;
mod schema;
mod validate;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

pub use edit::{diff_documents, merge_feature_implementation};
pub use schema::{fragment_schema_text, ir_schema_text, FragmentKind};
pub(crate) use schema::rule_for_kind;
pub use validate::{
    validate_document, validate_document_value, validate_fragment, validate_fragment_kind, validate_fragment_shape,
    ComponentResolver, SpecSubset,
};

pub const IR_VERSION: &str = "1.0";

#[derive(Debug, Error)]
pub enum IrError {
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("unknown fragment schema id `{0}`")]
    UnknownSchemaId(String),
    #[error("documents `{0}` and `{1}` are not revisions of the same document")]
    DocumentMismatch(String, String),
    #[error("document failed validation with {} violation(s)", .0.violations.len())]
    ValidationFailed(ValidationReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub width: f64,
    pub height: f64,
}

impl Frame {
    pub fn new(width: f64, height: f64) -> Self {
        Frame { width, height }
    }

    pub fn is_valid(&self) -> bool {
        self.width.is_finite() && self.height.is_finite() && self.width > 0.0 && self.height > 0.0
    }
}

impl Default for Frame {
    /// A compact phone screen in logical pixels.
    fn default() -> Self {
        Frame::new(412.0, 915.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureOrigin {
    Generated,
    UserAdded,
    UserEdited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureStatus {
    Pending,
    Implemented,
    Stale,
}

impl FeatureStatus {
    /// Allowed lifecycle moves. Re-implementing an implemented feature is a
    /// regeneration and keeps it implemented.
    pub fn can_become(self, next: FeatureStatus) -> bool {
        use FeatureStatus::*;
        matches!(
            (self, next),
            (Pending, Implemented) | (Implemented, Stale) | (Stale, Implemented) | (Implemented, Implemented)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuiFeature {
    pub id: String,
    pub name: String,
    pub description: String,
    pub origin: FeatureOrigin,
    pub status: FeatureStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentInstance {
    pub instance_id: String,
    pub type_name: String,
    pub feature_id: String,
    #[serde(rename = "posX")]
    pub pos_x: f64,
    #[serde(rename = "posY")]
    pub pos_y: f64,
    pub width: f64,
    pub height: f64,
    #[serde(default)]
    pub attributes: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub icon: Option<String>,
    /// Slot of the parent this child fills; unset on top-level instances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ComponentInstance>,
}

impl ComponentInstance {
    /// This instance and all descendants, depth first.
    pub fn walk(&self) -> Vec<&ComponentInstance> {
        let mut out = vec![self];
        for child in &self.children {
            out.extend(child.walk());
        }
        out
    }

    pub fn right(&self) -> f64 {
        self.pos_x + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.pos_y + self.height
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuiDocument {
    pub ir_version: String,
    pub doc_id: String,
    pub frame: Frame,
    pub description: String,
    pub revision: u64,
    pub features: Vec<GuiFeature>,
    pub instances: Vec<ComponentInstance>,
}

impl GuiDocument {
    pub fn new(doc_id: impl Into<String>, frame: Frame, description: impl Into<String>) -> Self {
        GuiDocument {
            ir_version: IR_VERSION.to_string(),
            doc_id: doc_id.into(),
            frame,
            description: description.into(),
            revision: 0,
            features: Vec::new(),
            instances: Vec::new(),
        }
    }

    pub fn feature(&self, id: &str) -> Option<&GuiFeature> {
        self.features.iter().find(|f| f.id == id)
    }

    pub fn feature_index(&self, id: &str) -> Option<usize> {
        self.features.iter().position(|f| f.id == id)
    }

    /// Top-level instances owned by a feature, in document order.
    pub fn instances_of<'a>(&'a self, feature_id: &'a str) -> impl Iterator<Item = &'a ComponentInstance> + 'a {
        self.instances.iter().filter(move |i| i.feature_id == feature_id)
    }

    /// Every instance including nested children, depth first.
    pub fn all_instances(&self) -> Vec<&ComponentInstance> {
        self.instances.iter().flat_map(|i| i.walk()).collect()
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// JSON pointer into the validated input.
    pub path: String,
    pub rule: String,
    pub message: String,
}

impl Violation {
    pub fn new(path: impl Into<String>, rule: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            path: path.into(),
            rule: rule.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport {
            valid: violations.is_empty(),
            violations,
        }
    }

    pub fn ok() -> Self {
        Self::from_violations(Vec::new())
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}
