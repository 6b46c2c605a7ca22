use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use jsonschema::error::ValidationErrorKind;
use jsonschema::Validator;
use serde_json::Value;

use super::{IrError, Violation};

const IR_SCHEMA: &str = include_str!("../../../../docs/ir-schema.json");
const FEATURE_LIST_SCHEMA: &str = include_str!("../../../../docs/schemas/feature-list.schema.json");
const SELECTION_LIST_SCHEMA: &str = include_str!("../../../../docs/schemas/selection-list.schema.json");
const FEATURE_IMPLEMENTATION_SCHEMA: &str =
    include_str!("../../../../docs/schemas/feature-implementation.schema.json");

/// The three shapes model output is validated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FragmentKind {
    FeatureList,
    SelectionList,
    FeatureImplementation,
}

impl FragmentKind {
    pub const ALL: [FragmentKind; 3] = [
        FragmentKind::FeatureList,
        FragmentKind::SelectionList,
        FragmentKind::FeatureImplementation,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FragmentKind::FeatureList => "feature-list",
            FragmentKind::SelectionList => "selection-list",
            FragmentKind::FeatureImplementation => "feature-implementation",
        }
    }

    fn source(self) -> &'static str {
        match self {
            FragmentKind::FeatureList => FEATURE_LIST_SCHEMA,
            FragmentKind::SelectionList => SELECTION_LIST_SCHEMA,
            FragmentKind::FeatureImplementation => FEATURE_IMPLEMENTATION_SCHEMA,
        }
    }

    pub(crate) fn validator(self) -> &'static Validator {
        static CELLS: [OnceLock<Validator>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
        let idx = self as usize;
        CELLS[idx].get_or_init(|| compile(self.source()))
    }
}

impl fmt::Display for FragmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FragmentKind {
    type Err = IrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FragmentKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| IrError::UnknownSchemaId(s.to_string()))
    }
}

/// Published text of a fragment schema, embedded verbatim in prompts.
pub fn fragment_schema_text(kind: FragmentKind) -> &'static str {
    kind.source().trim_end()
}

pub fn ir_schema_text() -> &'static str {
    IR_SCHEMA
}

pub(crate) fn ir_validator() -> &'static Validator {
    static CELL: OnceLock<Validator> = OnceLock::new();
    CELL.get_or_init(|| compile(IR_SCHEMA))
}

fn compile(source: &str) -> Validator {
    let value: Value = serde_json::from_str(source).expect("published schema is JSON");
    jsonschema::draft202012::new(&value).expect("published schema compiles")
}

/// Short, stable rule label for a schema error kind.
pub(crate) fn rule_for_kind(kind: &ValidationErrorKind) -> &'static str {
    use ValidationErrorKind as K;
    match kind {
        K::Required { .. } => "required-attribute",
        K::Type { .. } => "type",
        K::Enum { .. } => "enum",
        K::Constant { .. } => "const",
        K::AdditionalProperties { .. } => "additional-property",
        K::MinItems { .. } => "min-items",
        K::MaxItems { .. } => "max-items",
        K::MinLength { .. } => "min-length",
        K::MaxLength { .. } => "max-length",
        K::Minimum { .. } | K::ExclusiveMinimum { .. } => "minimum",
        K::Maximum { .. } | K::ExclusiveMaximum { .. } => "maximum",
        K::Pattern { .. } => "pattern",
        _ => "schema",
    }
}

/// Runs a compiled schema and converts every error to a violation, with
/// pointers prefixed by `base`.
pub(crate) fn schema_violations(validator: &Validator, value: &Value, base: &str) -> Vec<Violation> {
    validator
        .iter_errors(value)
        .map(|e| {
            Violation::new(
                format!("{base}{}", e.instance_path.as_str()),
                rule_for_kind(&e.kind),
                e.to_string(),
            )
        })
        .collect()
}
