//! Component library ingestion and retrieval.
//!
//! The catalog holds the full specification of every component type. Two
//! views are derived from it: the simplified view (group and type names only)
//! used when asking the model which types a feature needs, and the full specs
//! of the selected types, which are the only specs shown when asking for an
//! implementation.

mod spec;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::Read;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::llm::tokens::TokenEstimator;

pub use spec::{AttributeDef, AttributeKind, ComponentSpec, IconDef};

/// Minimum size of a production catalog. Smaller catalogs load fine (tests use
/// them) but are reported as a warning.
pub const MIN_PRODUCTION_COMPONENTS: usize = 59;

const BUNDLED_CATALOG: &str = include_str!("../../assets/material3-catalog.json");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("malformed catalog file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("failed to read catalog: {0}")]
    Io(#[from] std::io::Error),
    #[error("duplicate component type name `{0}`")]
    DuplicateTypeName(String),
    #[error("duplicate icon name `{0}`")]
    DuplicateIcon(String),
    #[error("invalid schema fragment for `{type_name}`: {reason}")]
    InvalidSchemaFragment { type_name: String, reason: String },
    #[error("invalid component `{type_name}`: {reason}")]
    InvalidComponent { type_name: String, reason: String },
    #[error("unknown component type name(s): {}", .0.join(", "))]
    UnknownTypeName(Vec<String>),
    #[error("catalog is empty; nothing to measure")]
    EmptyCatalog,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    version: String,
    icons: Vec<IconDef>,
    components: Vec<ComponentSpec>,
}

/// Result of loading a catalog file.
#[derive(Debug)]
pub struct LoadedCatalog {
    pub catalog: Catalog,
    pub warnings: Vec<String>,
}

/// An immutable, validated component library.
#[derive(Debug, Clone)]
pub struct Catalog {
    version: String,
    components: Vec<ComponentSpec>,
    icons: Vec<IconDef>,
    by_type: HashMap<String, usize>,
    icon_index: HashMap<String, usize>,
}

/// Parses and validates a catalog file. Malformed entries are rejected, never
/// repaired.
pub fn load_catalog(mut source: impl Read) -> Result<LoadedCatalog, CatalogError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let file: CatalogFile = serde_json::from_str(&text)?;
    Catalog::from_parts(file.version, file.icons, file.components)
}

impl Catalog {
    /// The Material-Design-3-derived catalog shipped with this crate.
    pub fn bundled() -> Catalog {
        load_catalog(BUNDLED_CATALOG.as_bytes())
            .expect("bundled catalog is valid")
            .catalog
    }

    /// Raw text of the bundled catalog file.
    pub fn bundled_source() -> &'static str {
        BUNDLED_CATALOG
    }

    pub fn from_parts(
        version: String,
        icons: Vec<IconDef>,
        mut components: Vec<ComponentSpec>,
    ) -> Result<LoadedCatalog, CatalogError> {
        let mut warnings = Vec::new();

        let mut icon_index = HashMap::with_capacity(icons.len());
        for (i, icon) in icons.iter().enumerate() {
            if icon.name.is_empty() {
                return Err(CatalogError::InvalidComponent {
                    type_name: String::new(),
                    reason: "icon with empty name".into(),
                });
            }
            if icon_index.insert(icon.name.clone(), i).is_some() {
                return Err(CatalogError::DuplicateIcon(icon.name.clone()));
            }
        }
        let icon_names: HashSet<&str> = icons.iter().map(|i| i.name.as_str()).collect();

        let mut by_type = HashMap::with_capacity(components.len());
        for (i, spec) in components.iter_mut().enumerate() {
            if spec.type_name.trim().is_empty() {
                return Err(CatalogError::InvalidComponent {
                    type_name: spec.type_name.clone(),
                    reason: "type name must not be empty".into(),
                });
            }
            if by_type.insert(spec.type_name.clone(), i).is_some() {
                return Err(CatalogError::DuplicateTypeName(spec.type_name.clone()));
            }
            spec.check_attributes(&icon_names)?;
            spec.compile()?;
        }

        if components.is_empty() {
            warnings.push("catalog contains no components".to_string());
        } else if components.len() < MIN_PRODUCTION_COMPONENTS {
            warnings.push(format!(
                "catalog contains {} components; a full library has at least {}",
                components.len(),
                MIN_PRODUCTION_COMPONENTS
            ));
        }

        Ok(LoadedCatalog {
            catalog: Catalog {
                version,
                components,
                icons,
                by_type,
                icon_index,
            },
            warnings,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn components(&self) -> &[ComponentSpec] {
        &self.components
    }

    pub fn icons(&self) -> &[IconDef] {
        &self.icons
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn get(&self, type_name: &str) -> Option<&ComponentSpec> {
        self.by_type.get(type_name).map(|&i| &self.components[i])
    }

    pub fn icon(&self, name: &str) -> Option<&IconDef> {
        self.icon_index.get(name).map(|&i| &self.icons[i])
    }

    pub fn groups(&self) -> BTreeSet<&str> {
        self.components.iter().map(|c| c.group.as_str()).collect()
    }

    /// Serialization of every full spec, exactly as specs appear in an
    /// implementation prompt.
    pub fn full_serialization(&self) -> String {
        render_full_specs(self.components.iter())
    }
}

/// Serializes specs one per line, each as compact JSON of its catalog entry.
pub fn render_full_specs<'a>(specs: impl IntoIterator<Item = &'a ComponentSpec>) -> String {
    specs
        .into_iter()
        .map(ComponentSpec::full_text)
        .collect::<Vec<_>>()
        .join("\n")
}

/// One group of the simplified view.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewEntry {
    pub group: String,
    pub type_names: Vec<String>,
}

/// Group and type names only; what the selection prompt sees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplifiedCatalogView {
    pub entries: Vec<ViewEntry>,
    pub serialized_form: String,
}

impl SimplifiedCatalogView {
    pub fn contains(&self, type_name: &str) -> bool {
        self.entries
            .iter()
            .any(|e| e.type_names.iter().any(|t| t == type_name))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().flat_map(|e| {
            e.type_names
                .iter()
                .map(move |t| (e.group.as_str(), t.as_str()))
        })
    }
}

/// Projects the catalog onto (group, type names). Groups keep the order of
/// their first appearance; types keep catalog order.
pub fn simplify(catalog: &Catalog) -> SimplifiedCatalogView {
    let mut entries: Vec<ViewEntry> = Vec::new();
    for spec in &catalog.components {
        match entries.iter_mut().find(|e| e.group == spec.group) {
            Some(entry) => entry.type_names.push(spec.type_name.clone()),
            None => entries.push(ViewEntry {
                group: spec.group.clone(),
                type_names: vec![spec.type_name.clone()],
            }),
        }
    }
    let serialized_form = entries
        .iter()
        .map(|e| format!("- {}: {}", e.group, e.type_names.join(", ")))
        .collect::<Vec<_>>()
        .join("\n");
    SimplifiedCatalogView {
        entries,
        serialized_form,
    }
}

/// Retrieves full specs in request order, without duplicates. Every unknown
/// name is reported.
pub fn lookup_full_specs<'c, S: AsRef<str>>(
    catalog: &'c Catalog,
    type_names: &[S],
) -> Result<Vec<&'c ComponentSpec>, CatalogError> {
    let mut seen = HashSet::new();
    let mut found = Vec::new();
    let mut unknown = Vec::new();
    for name in type_names {
        let name = name.as_ref();
        if !seen.insert(name) {
            continue;
        }
        match catalog.get(name) {
            Some(spec) => found.push(spec),
            None => unknown.push(name.to_string()),
        }
    }
    if unknown.is_empty() {
        Ok(found)
    } else {
        Err(CatalogError::UnknownTypeName(unknown))
    }
}

/// Token cost of the full catalog versus the simplified view.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReductionReport {
    pub estimator: String,
    pub components: usize,
    pub full_tokens: usize,
    pub simplified_tokens: usize,
    pub ratio: f64,
}

pub fn measure_token_reduction(
    catalog: &Catalog,
    estimator: &dyn TokenEstimator,
) -> Result<ReductionReport, CatalogError> {
    if catalog.is_empty() {
        return Err(CatalogError::EmptyCatalog);
    }
    let full_tokens = estimator.estimate(&catalog.full_serialization());
    if full_tokens == 0 {
        return Err(CatalogError::EmptyCatalog);
    }
    let simplified_tokens = estimator.estimate(&simplify(catalog).serialized_form);
    let ratio = (1.0 - simplified_tokens as f64 / full_tokens as f64).clamp(0.0, 1.0);
    Ok(ReductionReport {
        estimator: estimator.name().to_string(),
        components: catalog.len(),
        full_tokens,
        simplified_tokens,
        ratio,
    })
}

/// JSON value of a catalog entry, as it is written in the catalog file.
pub fn spec_to_value(spec: &ComponentSpec) -> Value {
    serde_json::to_value(spec).expect("component spec serializes")
}

pub(crate) type SharedValidator = Arc<jsonschema::Validator>;

#[cfg(test)]
mod tests;
