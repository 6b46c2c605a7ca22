use std::collections::HashSet;

use serde_json::Value;

use super::schema::{ir_validator, schema_violations};
use super::{FragmentKind, GuiDocument, IrError, ValidationReport, Violation};
use crate::catalog::{AttributeKind, Catalog, ComponentSpec, IconDef};

/// Where instance type names and icons are resolved during validation.
pub trait ComponentResolver {
    fn spec(&self, type_name: &str) -> Option<&ComponentSpec>;
    fn has_icon(&self, name: &str) -> bool;
}

impl ComponentResolver for Catalog {
    fn spec(&self, type_name: &str) -> Option<&ComponentSpec> {
        self.get(type_name)
    }

    fn has_icon(&self, name: &str) -> bool {
        self.icon(name).is_some()
    }
}

/// A resolver restricted to a retrieved set of specs.
pub struct SpecSubset<'a> {
    pub specs: Vec<&'a ComponentSpec>,
    pub icons: &'a [IconDef],
}

impl ComponentResolver for SpecSubset<'_> {
    fn spec(&self, type_name: &str) -> Option<&ComponentSpec> {
        self.specs.iter().copied().find(|s| s.type_name == type_name)
    }

    fn has_icon(&self, name: &str) -> bool {
        self.icons.iter().any(|i| i.name == name)
    }
}

pub fn validate_document(doc: &GuiDocument, catalog: &Catalog) -> ValidationReport {
    let value = serde_json::to_value(doc).expect("document serializes");
    validate_document_value(&value, catalog)
}

/// Validates raw JSON claiming to be a document: the published structural
/// schema first, then references (features, types, icons, slots) and the
/// per-type attribute schemas. Every violation is reported.
pub fn validate_document_value(value: &Value, catalog: &Catalog) -> ValidationReport {
    let mut out = schema_violations(ir_validator(), value, "");

    let features = value.get("features").and_then(Value::as_array);
    let instances = value.get("instances").and_then(Value::as_array);

    let mut feature_ids = HashSet::new();
    if let Some(features) = features {
        for (i, f) in features.iter().enumerate() {
            if let Some(id) = f.get("id").and_then(Value::as_str) {
                if !feature_ids.insert(id.to_string()) {
                    out.push(Violation::new(
                        format!("/features/{i}/id"),
                        "duplicate-id",
                        format!("feature id `{id}` is used more than once"),
                    ));
                }
            }
        }
    }

    let mut ctx = DocContext {
        feature_ids: &feature_ids,
        instance_ids: HashSet::new(),
    };
    let mut owners = HashSet::new();
    if let Some(instances) = instances {
        for (i, inst) in instances.iter().enumerate() {
            if let Some(owner) = inst.get("feature_id").and_then(Value::as_str) {
                owners.insert(owner.to_string());
            }
            check_instance(inst, &format!("/instances/{i}"), catalog, None, Some(&mut ctx), &mut out);
        }
    }

    if let Some(features) = features {
        for (i, f) in features.iter().enumerate() {
            let implemented = f.get("status").and_then(Value::as_str) == Some("implemented");
            let id = f.get("id").and_then(Value::as_str).unwrap_or_default();
            if implemented && !owners.contains(id) {
                out.push(Violation::new(
                    format!("/features/{i}/status"),
                    "implemented-without-instances",
                    format!("feature `{id}` is implemented but owns no instances"),
                ));
            }
        }
    }

    ValidationReport::from_violations(out)
}

/// Validates a model-produced fragment by schema id.
pub fn validate_fragment(raw: &Value, expected: &str, catalog: &Catalog) -> Result<ValidationReport, IrError> {
    let kind: FragmentKind = expected.parse()?;
    Ok(validate_fragment_kind(raw, kind, catalog))
}

/// Schema-only check of a fragment, without resolving type names or icons.
pub fn validate_fragment_shape(raw: &Value, kind: FragmentKind) -> ValidationReport {
    ValidationReport::from_violations(schema_violations(kind.validator(), raw, ""))
}

pub fn validate_fragment_kind(raw: &Value, kind: FragmentKind, resolver: &dyn ComponentResolver) -> ValidationReport {
    let mut out = schema_violations(kind.validator(), raw, "");
    match kind {
        FragmentKind::FeatureList => {}
        FragmentKind::SelectionList => {
            if let Some(names) = raw.get("components").and_then(Value::as_array) {
                for (i, name) in names.iter().enumerate() {
                    if let Some(name) = name.as_str() {
                        if resolver.spec(name).is_none() {
                            out.push(Violation::new(
                                format!("/components/{i}"),
                                "unknown-type",
                                format!("`{name}` is not a component type of the library"),
                            ));
                        }
                    }
                }
            }
        }
        FragmentKind::FeatureImplementation => {
            if let Some(instances) = raw.get("instances").and_then(Value::as_array) {
                for (i, inst) in instances.iter().enumerate() {
                    check_instance(inst, &format!("/instances/{i}"), resolver, None, None, &mut out);
                }
            }
        }
    }
    ValidationReport::from_violations(out)
}

struct DocContext<'a> {
    feature_ids: &'a HashSet<String>,
    instance_ids: HashSet<String>,
}

fn check_instance(
    inst: &Value,
    path: &str,
    resolver: &dyn ComponentResolver,
    parent: Option<(&ComponentSpec, Option<&str>)>,
    mut doc: Option<&mut DocContext<'_>>,
    out: &mut Vec<Violation>,
) {
    if !inst.is_object() {
        return;
    }
    let feature_id = inst.get("feature_id").and_then(Value::as_str);

    if let Some(ctx) = doc.as_deref_mut() {
        if let Some(id) = inst.get("instance_id").and_then(Value::as_str) {
            if !ctx.instance_ids.insert(id.to_string()) {
                out.push(Violation::new(
                    format!("{path}/instance_id"),
                    "duplicate-id",
                    format!("instance id `{id}` is used more than once"),
                ));
            }
        }
        if let Some(fid) = feature_id {
            match parent {
                Some((_, Some(parent_fid))) if parent_fid != fid => out.push(Violation::new(
                    format!("{path}/feature_id"),
                    "feature-mismatch",
                    format!("child belongs to `{fid}` but its parent belongs to `{parent_fid}`"),
                )),
                _ if !ctx.feature_ids.contains(fid) => out.push(Violation::new(
                    format!("{path}/feature_id"),
                    "unknown-feature",
                    format!("feature `{fid}` does not exist"),
                )),
                _ => {}
            }
        }
    }

    if let Some((parent_spec, _)) = parent {
        match inst.get("slot").and_then(Value::as_str) {
            Some(slot) if parent_spec.has_slot(slot) => {}
            Some(slot) => out.push(Violation::new(
                format!("{path}/slot"),
                "undeclared-slot",
                format!("`{}` has no slot `{slot}`", parent_spec.type_name),
            )),
            None => out.push(Violation::new(
                path,
                "undeclared-slot",
                format!(
                    "child of `{}` must name one of its slots {:?}",
                    parent_spec.type_name, parent_spec.slots
                ),
            )),
        }
    }

    if let Some(icon) = inst.get("icon").and_then(Value::as_str) {
        if !resolver.has_icon(icon) {
            out.push(Violation::new(
                format!("{path}/icon"),
                "unknown-icon",
                format!("icon `{icon}` is not in the icon collection"),
            ));
        }
    }

    let Some(type_name) = inst.get("type_name").and_then(Value::as_str) else {
        return;
    };
    let Some(spec) = resolver.spec(type_name) else {
        out.push(Violation::new(
            format!("{path}/type_name"),
            "unknown-type",
            format!("`{type_name}` is not an available component type"),
        ));
        return;
    };

    let empty = Value::Object(Default::default());
    let attributes = inst.get("attributes").unwrap_or(&empty);
    if attributes.is_object() {
        let base = if inst.get("attributes").is_some() {
            format!("{path}/attributes")
        } else {
            path.to_string()
        };
        for (pointer, rule, message) in spec.attribute_errors(attributes) {
            out.push(Violation::new(format!("{base}{pointer}"), rule, message));
        }
        for attr in spec.attributes.iter().filter(|a| a.kind == AttributeKind::IconRef) {
            if let Some(name) = attributes.get(&attr.name).and_then(Value::as_str) {
                if !resolver.has_icon(name) {
                    out.push(Violation::new(
                        format!("{base}/{}", attr.name),
                        "unknown-icon",
                        format!("icon `{name}` is not in the icon collection"),
                    ));
                }
            }
        }
    }

    if let Some(children) = inst.get("children").and_then(Value::as_array) {
        for (j, child) in children.iter().enumerate() {
            check_instance(
                child,
                &format!("{path}/children/{j}"),
                resolver,
                Some((spec, feature_id)),
                doc.as_deref_mut(),
                out,
            );
        }
    }
}
