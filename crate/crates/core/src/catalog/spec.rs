use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CatalogError, SharedValidator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttributeKind {
    String,
    Number,
    Boolean,
    Enum,
    Color,
    IconRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributeDef {
    pub name: String,
    pub kind: AttributeKind,
    #[serde(default)]
    pub required: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IconDef {
    pub name: String,
    /// Short text drawn in place of the icon by the wireframe renderer.
    pub glyph: String,
}

/// Full specification of one component type.
#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub group: String,
    #[serde(rename = "type")]
    pub type_name: String,
    pub description: String,
    pub attributes: Vec<AttributeDef>,
    pub slots: Vec<String>,
    /// JSON schema (draft 2020-12) for the `attributes` object of an instance.
    #[serde(rename = "schema")]
    pub schema_fragment: Value,
    #[serde(skip)]
    validator: Option<SharedValidator>,
}

impl fmt::Debug for ComponentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComponentSpec")
            .field("group", &self.group)
            .field("type_name", &self.type_name)
            .field("attributes", &self.attributes.len())
            .field("slots", &self.slots)
            .finish_non_exhaustive()
    }
}

impl PartialEq for ComponentSpec {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group
            && self.type_name == other.type_name
            && self.description == other.description
            && self.attributes == other.attributes
            && self.slots == other.slots
            && self.schema_fragment == other.schema_fragment
    }
}

impl ComponentSpec {
    /// A spec whose schema fragment is derived from its attribute list.
    pub fn new(
        group: impl Into<String>,
        type_name: impl Into<String>,
        description: impl Into<String>,
        attributes: Vec<AttributeDef>,
        slots: Vec<String>,
    ) -> Self {
        let type_name = type_name.into();
        let schema_fragment = derive_fragment(&type_name, &attributes);
        ComponentSpec {
            group: group.into(),
            type_name,
            description: description.into(),
            attributes,
            slots,
            schema_fragment,
            validator: None,
        }
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeDef> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn has_slot(&self, slot: &str) -> bool {
        self.slots.iter().any(|s| s == slot)
    }

    /// Compact JSON of the catalog entry; this exact text is what an
    /// implementation prompt carries for the spec.
    pub fn full_text(&self) -> String {
        serde_json::to_string(self).expect("component spec serializes")
    }

    /// Compact JSON of the schema fragment alone.
    pub fn fragment_text(&self) -> String {
        serde_json::to_string(&self.schema_fragment).expect("schema serializes")
    }

    /// Validates an instance's attribute object, yielding `(pointer, kind
    /// label, message)` for each violation. Pointers are relative to the
    /// attribute object.
    pub fn attribute_errors(&self, attributes: &Value) -> Vec<(String, &'static str, String)> {
        let validator = match &self.validator {
            Some(v) => v.clone(),
            None => match jsonschema::draft202012::new(&self.schema_fragment) {
                Ok(v) => Arc::new(v),
                Err(e) => return vec![(String::new(), "schema", e.to_string())],
            },
        };
        validator
            .iter_errors(attributes)
            .map(|e| {
                (
                    e.instance_path.as_str().to_string(),
                    crate::ir::rule_for_kind(&e.kind),
                    e.to_string(),
                )
            })
            .collect()
    }

    pub(super) fn compile(&mut self) -> Result<(), CatalogError> {
        let invalid = |reason: String| CatalogError::InvalidSchemaFragment {
            type_name: self.type_name.clone(),
            reason,
        };
        if !self.schema_fragment.is_object() {
            return Err(invalid("schema must be a JSON object".into()));
        }
        jsonschema::draft202012::meta::validate(&self.schema_fragment)
            .map_err(|e| invalid(e.to_string()))?;
        let validator =
            jsonschema::draft202012::new(&self.schema_fragment).map_err(|e| invalid(e.to_string()))?;
        self.validator = Some(Arc::new(validator));
        Ok(())
    }

    pub(super) fn check_attributes(&self, icons: &HashSet<&str>) -> Result<(), CatalogError> {
        let bad = |reason: String| CatalogError::InvalidComponent {
            type_name: self.type_name.clone(),
            reason,
        };
        let mut names = HashSet::new();
        for attr in &self.attributes {
            if attr.name.is_empty() {
                return Err(bad("attribute with empty name".into()));
            }
            if !names.insert(attr.name.as_str()) {
                return Err(bad(format!("duplicate attribute `{}`", attr.name)));
            }
            if attr.kind == AttributeKind::Enum
                && attr.allowed_values.as_ref().map_or(true, |v| v.is_empty())
            {
                return Err(bad(format!(
                    "enum attribute `{}` needs at least one allowed value",
                    attr.name
                )));
            }
            if let Some(default) = &attr.default {
                if !default_fits(attr, default, icons) {
                    return Err(bad(format!(
                        "default {default} of `{}` does not match kind {:?}",
                        attr.name, attr.kind
                    )));
                }
            }
        }
        let mut slots = HashSet::new();
        for slot in &self.slots {
            if slot.is_empty() || !slots.insert(slot.as_str()) {
                return Err(bad(format!("invalid or duplicate slot `{slot}`")));
            }
        }
        Ok(())
    }
}

pub(crate) fn is_hex_color(s: &str) -> bool {
    s.len() == 7 && s.starts_with('#') && s[1..].chars().all(|c| c.is_ascii_hexdigit())
}

fn default_fits(attr: &AttributeDef, value: &Value, icons: &HashSet<&str>) -> bool {
    match attr.kind {
        AttributeKind::String => value.is_string(),
        AttributeKind::Number => value.is_number(),
        AttributeKind::Boolean => value.is_boolean(),
        AttributeKind::Enum => value.as_str().is_some_and(|s| {
            attr.allowed_values
                .as_ref()
                .is_some_and(|allowed| allowed.iter().any(|a| a == s))
        }),
        AttributeKind::Color => value.as_str().is_some_and(is_hex_color),
        AttributeKind::IconRef => value.as_str().is_some_and(|s| icons.contains(s)),
    }
}

/// Builds the attribute-object schema implied by an attribute list.
pub(crate) fn derive_fragment(type_name: &str, attributes: &[AttributeDef]) -> Value {
    let mut properties = serde_json::Map::new();
    let mut required = Vec::new();
    for attr in attributes {
        let mut prop = match attr.kind {
            AttributeKind::String => serde_json::json!({"type": "string"}),
            AttributeKind::Number => serde_json::json!({"type": "number"}),
            AttributeKind::Boolean => serde_json::json!({"type": "boolean"}),
            AttributeKind::Enum => {
                serde_json::json!({"enum": attr.allowed_values.clone().unwrap_or_default()})
            }
            AttributeKind::Color => {
                serde_json::json!({"type": "string", "pattern": "^#[0-9A-Fa-f]{6}$"})
            }
            AttributeKind::IconRef => serde_json::json!({"type": "string", "minLength": 1}),
        };
        if attr.required {
            required.push(Value::String(attr.name.clone()));
            if attr.kind == AttributeKind::String {
                prop["minLength"] = 1.into();
            }
        }
        properties.insert(attr.name.clone(), prop);
    }
    let mut schema = serde_json::json!({
        "title": format!("{type_name} attributes"),
        "type": "object",
        "properties": properties,
        "additionalProperties": false,
    });
    if !required.is_empty() {
        schema["required"] = Value::Array(required);
    }
    schema
}
