use super::*;
use crate::llm::tokens::WordPunctEstimator;
use proptest::prelude::*;

fn attr(name: &str, kind: AttributeKind, required: bool) -> AttributeDef {
    AttributeDef {
        name: name.into(),
        kind,
        required,
        allowed_values: None,
        default: None,
    }
}

fn small(components: Vec<ComponentSpec>) -> Catalog {
    Catalog::from_parts("t".into(), vec![], components)
        .unwrap()
        .catalog
}

#[test]
fn bundled_catalog_covers_named_groups() {
    let catalog = Catalog::bundled();
    assert!(catalog.len() >= MIN_PRODUCTION_COMPONENTS);
    let groups = catalog.groups();
    for g in ["Button", "Checkbox", "Label", "Search Bar", "Dialog", "Top App Bar"] {
        assert!(groups.contains(g), "missing group {g}");
    }
    assert_eq!(catalog.get("FloatingActionButton").unwrap().group, "Button");
}

#[test]
fn bundled_load_has_no_warnings() {
    let loaded = load_catalog(Catalog::bundled_source().as_bytes()).unwrap();
    assert!(loaded.warnings.is_empty(), "{:?}", loaded.warnings);
}

#[test]
fn empty_catalog_loads_with_warning() {
    let src = r#"{"version":"0","icons":[],"components":[]}"#;
    let loaded = load_catalog(src.as_bytes()).unwrap();
    assert!(loaded.catalog.is_empty());
    assert_eq!(loaded.warnings.len(), 1);
}

#[test]
fn duplicate_type_name_rejected() {
    let chip = r#"{"group":"Chip","type":"Chip","description":"","attributes":[],"slots":[],"schema":{"type":"object"}}"#;
    let src = format!(r#"{{"version":"0","icons":[],"components":[{chip},{chip}]}}"#);
    match load_catalog(src.as_bytes()) {
        Err(CatalogError::DuplicateTypeName(name)) => assert_eq!(name, "Chip"),
        other => panic!("expected DuplicateTypeName, got {other:?}"),
    }
}

#[test]
fn unknown_top_level_key_is_parse_error() {
    let src = r#"{"version":"0","icons":[],"components":[],"extra":1}"#;
    assert!(matches!(load_catalog(src.as_bytes()), Err(CatalogError::Parse(_))));
    assert!(matches!(load_catalog("{".as_bytes()), Err(CatalogError::Parse(_))));
}

#[test]
fn invalid_schema_fragment_rejected() {
    let src = r#"{"version":"0","icons":[],"components":[
        {"group":"G","type":"T","description":"","attributes":[],"slots":[],"schema":{"type":"not-a-type"}}]}"#;
    assert!(matches!(
        load_catalog(src.as_bytes()),
        Err(CatalogError::InvalidSchemaFragment { .. })
    ));
    let src = r#"{"version":"0","icons":[],"components":[
        {"group":"G","type":"T","description":"","attributes":[],"slots":[],"schema":[]}]}"#;
    assert!(matches!(
        load_catalog(src.as_bytes()),
        Err(CatalogError::InvalidSchemaFragment { .. })
    ));
}

#[test]
fn enum_without_values_and_bad_default_rejected() {
    let spec = ComponentSpec::new("G", "T", "", vec![attr("v", AttributeKind::Enum, false)], vec![]);
    assert!(matches!(
        Catalog::from_parts("0".into(), vec![], vec![spec]),
        Err(CatalogError::InvalidComponent { .. })
    ));

    let mut a = attr("c", AttributeKind::Color, true);
    a.default = Some(Value::from("red"));
    let spec = ComponentSpec::new("G", "T", "", vec![a], vec![]);
    assert!(matches!(
        Catalog::from_parts("0".into(), vec![], vec![spec]),
        Err(CatalogError::InvalidComponent { .. })
    ));
}

#[test]
fn empty_type_name_rejected() {
    let spec = ComponentSpec::new("G", " ", "", vec![], vec![]);
    assert!(Catalog::from_parts("0".into(), vec![], vec![spec]).is_err());
}

#[test]
fn simplify_projects_groups() {
    let catalog = small(vec![
        ComponentSpec::new("Button", "ElevatedButton", "d", vec![], vec![]),
        ComponentSpec::new("Button", "FloatingActionButton", "d", vec![], vec![]),
    ]);
    let view = simplify(&catalog);
    assert_eq!(
        view.entries,
        vec![ViewEntry {
            group: "Button".into(),
            type_names: vec!["ElevatedButton".into(), "FloatingActionButton".into()],
        }]
    );
    assert_eq!(view.serialized_form, "- Button: ElevatedButton, FloatingActionButton");
}

#[test]
fn simplify_empty_catalog() {
    let view = simplify(&small(vec![]));
    assert!(view.entries.is_empty());
    assert_eq!(view.serialized_form, "");
}

#[test]
fn simplified_view_leaks_no_spec_details() {
    let catalog = Catalog::bundled();
    let view = simplify(&catalog);
    for spec in catalog.components() {
        assert!(!view.serialized_form.contains(&spec.fragment_text()));
        for a in &spec.attributes {
            // attribute names such as "label" can coincide with words in
            // type names; check the quoted JSON key form instead
            assert!(!view.serialized_form.contains(&format!("\"{}\"", a.name)));
        }
    }
}

#[test]
fn lookup_in_request_order_and_deduplicated() {
    let catalog = Catalog::bundled();
    let specs = lookup_full_specs(&catalog, &["FloatingActionButton"]).unwrap();
    assert_eq!(specs.len(), 1);
    assert_eq!(specs[0].group, "Button");

    let specs = lookup_full_specs(&catalog, &["TextField", "ElevatedButton", "TextField"]).unwrap();
    let names: Vec<_> = specs.iter().map(|s| s.type_name.as_str()).collect();
    assert_eq!(names, ["TextField", "ElevatedButton"]);

    assert!(lookup_full_specs::<&str>(&catalog, &[]).unwrap().is_empty());
}

#[test]
fn lookup_reports_unknown_names() {
    let catalog = Catalog::bundled();
    match lookup_full_specs(&catalog, &["FloatingActionButton", "NoSuchWidget"]) {
        Err(CatalogError::UnknownTypeName(names)) => assert_eq!(names, ["NoSuchWidget"]),
        other => panic!("unexpected {other:?}"),
    }
}

/// Independent oracle for the reduction harness: re-serializes the raw catalog
/// file (sorted keys, straight from `serde_json::Value`) and counts units with
/// a separately written counter.
fn oracle_counts(raw: &str) -> (usize, usize) {
    fn count(text: &str) -> usize {
        let mut n = 0;
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_alphanumeric() || c == '_' {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                n += 1;
            } else {
                n += 1;
                i += 1;
            }
        }
        if n == 0 {
            0
        } else {
            n + 1
        }
    }
    let value: Value = serde_json::from_str(raw).unwrap();
    let comps = value["components"].as_array().unwrap();
    let full = comps
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join("\n");
    let mut groups: Vec<(String, Vec<String>)> = Vec::new();
    for c in comps {
        let g = c["group"].as_str().unwrap().to_string();
        let t = c["type"].as_str().unwrap().to_string();
        if let Some(entry) = groups.iter_mut().find(|(name, _)| *name == g) {
            entry.1.push(t);
        } else {
            groups.push((g, vec![t]));
        }
    }
    let simplified = groups
        .iter()
        .map(|(g, ts)| format!("- {g}: {}", ts.join(", ")))
        .collect::<Vec<_>>()
        .join("\n");
    (count(&full), count(&simplified))
}

#[test]
fn bundled_reduction_matches_oracle() {
    let report = measure_token_reduction(&Catalog::bundled(), &WordPunctEstimator).unwrap();
    let (full, simplified) = oracle_counts(Catalog::bundled_source());
    assert_eq!(report.full_tokens, full);
    assert_eq!(report.simplified_tokens, simplified);
    // frozen from the oracle above (and cross-checked with a python script)
    assert_eq!(report.full_tokens, FROZEN_FULL_TOKENS);
    assert_eq!(report.simplified_tokens, FROZEN_SIMPLIFIED_TOKENS);
    assert!(report.ratio >= 0.5, "ratio {}", report.ratio);
    assert!(report.ratio <= 1.0);
}

const FROZEN_FULL_TOKENS: usize = 17478;
const FROZEN_SIMPLIFIED_TOKENS: usize = 228;

#[test]
fn reduction_zero_when_views_cost_the_same() {
    struct Flat;
    impl TokenEstimator for Flat {
        fn name(&self) -> &str {
            "flat"
        }
        fn estimate(&self, _text: &str) -> usize {
            10
        }
    }
    let report = measure_token_reduction(&Catalog::bundled(), &Flat).unwrap();
    assert_eq!(report.ratio, 0.0);
}

#[test]
fn reduction_of_bare_component_is_small_relative_to_rich_catalog() {
    let bare = small(vec![ComponentSpec::new("Button", "FloatingActionButton", "", vec![], vec![])]);
    let report = measure_token_reduction(&bare, &WordPunctEstimator).unwrap();
    assert_eq!(report.simplified_tokens, 5);
    assert_eq!(report.full_tokens, FROZEN_BARE_FULL_TOKENS);
    let bundled = measure_token_reduction(&Catalog::bundled(), &WordPunctEstimator).unwrap();
    assert!(report.ratio < bundled.ratio);
}

const FROZEN_BARE_FULL_TOKENS: usize = 75;

#[test]
fn empty_catalog_cannot_be_measured() {
    assert!(matches!(
        measure_token_reduction(&small(vec![]), &WordPunctEstimator),
        Err(CatalogError::EmptyCatalog)
    ));
}

fn arb_catalog() -> impl Strategy<Value = Catalog> {
    let groups = prop::sample::select(vec!["Button", "Chip", "Card", "List", "Label"]);
    prop::collection::vec((groups, 0usize..4), 0..12).prop_map(|items| {
        let specs = items
            .into_iter()
            .enumerate()
            .map(|(i, (g, n_attrs))| {
                let attrs = (0..n_attrs)
                    .map(|k| attr(&format!("a{k}"), AttributeKind::String, k == 0))
                    .collect();
                ComponentSpec::new(g, format!("Type{i}"), "generated", attrs, vec![])
            })
            .collect();
        small(specs)
    })
}

proptest! {
    #[test]
    fn projection_soundness(catalog in arb_catalog()) {
        let view = simplify(&catalog);
        let from_view: BTreeSet<(String, String)> =
            view.pairs().map(|(g, t)| (g.to_string(), t.to_string())).collect();
        let from_catalog: BTreeSet<(String, String)> = catalog
            .components()
            .iter()
            .map(|c| (c.group.clone(), c.type_name.clone()))
            .collect();
        prop_assert_eq!(from_view, from_catalog);
        prop_assert_eq!(view.pairs().count(), catalog.len());
    }

    #[test]
    fn determinism(catalog in arb_catalog()) {
        prop_assert_eq!(simplify(&catalog), simplify(&catalog));
        prop_assert_eq!(catalog.full_serialization(), catalog.full_serialization());
    }

    #[test]
    fn retrieval_round_trip(catalog in arb_catalog(), mask in prop::collection::vec(any::<bool>(), 12)) {
        let subset: Vec<String> = catalog
            .components()
            .iter()
            .zip(mask.iter())
            .filter(|(_, keep)| **keep)
            .map(|(c, _)| c.type_name.clone())
            .collect();
        let specs = lookup_full_specs(&catalog, &subset).unwrap();
        let got: Vec<String> = specs.iter().map(|s| s.type_name.clone()).collect();
        prop_assert_eq!(got, subset);
    }

    #[test]
    fn monotone_reduction(catalog in arb_catalog(), target in any::<prop::sample::Index>(), extra in 1usize..4) {
        prop_assume!(!catalog.is_empty());
        let before = measure_token_reduction(&catalog, &WordPunctEstimator).unwrap();
        let mut specs = catalog.components().to_vec();
        let idx = target.index(specs.len());
        let spec = &specs[idx];
        let mut attrs = spec.attributes.clone();
        for k in 0..extra {
            attrs.push(attr(&format!("extra{k}"), AttributeKind::Number, false));
        }
        specs[idx] = ComponentSpec::new(spec.group.clone(), spec.type_name.clone(), spec.description.clone(), attrs, vec![]);
        let after = measure_token_reduction(&small(specs), &WordPunctEstimator).unwrap();
        prop_assert!(after.ratio >= before.ratio);
    }
}
