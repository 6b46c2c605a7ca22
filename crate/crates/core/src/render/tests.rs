use proptest::prelude::*;
use serde_json::{json, Map, Value};

use super::*;
use crate::catalog::{AttributeKind, Catalog, ComponentSpec};
use crate::ir::{ComponentInstance, FeatureOrigin, FeatureStatus, Frame, GuiDocument, GuiFeature};

fn inst(id: &str, type_name: &str, feature: &str, geom: (f64, f64, f64, f64), attrs: Value) -> ComponentInstance {
    ComponentInstance {
        instance_id: id.into(),
        type_name: type_name.into(),
        feature_id: feature.into(),
        pos_x: geom.0,
        pos_y: geom.1,
        width: geom.2,
        height: geom.3,
        attributes: attrs.as_object().cloned().unwrap_or_default(),
        icon: None,
        slot: None,
        children: vec![],
    }
}

fn feature(id: &str, status: FeatureStatus) -> GuiFeature {
    GuiFeature {
        id: id.into(),
        name: format!("{id} & <name>"),
        description: format!("{id} description"),
        origin: FeatureOrigin::Generated,
        status,
    }
}

/// Attributes that satisfy every required attribute of `spec`.
fn required_attrs(spec: &ComponentSpec, catalog: &Catalog, word: &str) -> Map<String, Value> {
    let mut out = Map::new();
    for a in spec.attributes.iter().filter(|a| a.required) {
        let v = match a.kind {
            AttributeKind::String => json!(word),
            AttributeKind::Number => json!(1),
            AttributeKind::Boolean => json!(true),
            AttributeKind::Color => json!("#000000"),
            AttributeKind::Enum => json!(a.allowed_values.as_ref().unwrap()[0]),
            AttributeKind::IconRef => json!(catalog.icons()[0].name),
        };
        out.insert(a.name.clone(), v);
    }
    out
}

fn parse_num(node: roxmltree::Node, name: &str) -> f64 {
    node.attribute(name).unwrap_or_else(|| panic!("missing {name}")).parse().unwrap()
}

/// Geometry of each `rect.bounds`, keyed by instance id.
fn bounds(svg: &str) -> Vec<(String, [f64; 4])> {
    let tree = roxmltree::Document::parse(svg).expect("well-formed svg");
    tree.descendants()
        .filter(|n| n.has_tag_name("rect") && n.attribute("class") == Some("bounds"))
        .map(|n| {
            let id = n.attribute("data-instance").unwrap().to_string();
            (id, [parse_num(n, "x"), parse_num(n, "y"), parse_num(n, "width"), parse_num(n, "height")])
        })
        .collect()
}

fn feature_groups(svg: &str) -> Vec<String> {
    let tree = roxmltree::Document::parse(svg).unwrap();
    tree.descendants()
        .filter(|n| n.has_tag_name("g") && n.attribute("class") == Some("feature"))
        .map(|n| n.attribute("id").unwrap().to_string())
        .collect()
}

fn sample() -> GuiDocument {
    let mut doc = GuiDocument::new("doc-1", Frame::new(412.0, 915.0), "sample");
    doc.features = vec![
        feature("a", FeatureStatus::Implemented),
        feature("b", FeatureStatus::Pending),
        feature("c", FeatureStatus::Stale),
    ];
    let mut card = inst("c-1", "OutlinedCard", "c", (16.0, 400.0, 380.0, 200.0), json!({"title": "Card"}));
    card.children.push(ComponentInstance {
        slot: Some("actions".into()),
        ..inst("c-2", "TextButton", "c", (24.0, 540.0, 100.0, 40.0), json!({"label": "More"}))
    });
    doc.instances = vec![
        inst("a-1", "FilledButton", "a", (10.0, 20.0, 120.0, 40.0), json!({"label": "Save <now>"})),
        inst("a-2", "TextField", "a", (10.0, 80.0, 300.5, 56.25), json!({"label": "Email", "inputType": "email"})),
        card,
    ];
    doc
}

#[test]
fn empty_document_has_only_the_frame() {
    let doc = GuiDocument::new("d", Frame::default(), "");
    let svg = render_svg(&doc, &Catalog::bundled(), &RenderOptions::default()).unwrap();
    let tree = roxmltree::Document::parse(&svg).unwrap();
    let root = tree.root_element();
    assert_eq!(root.attribute("width"), Some("412"));
    assert_eq!(root.attribute("height"), Some("915"));
    let children: Vec<_> = root.children().filter(|n| n.is_element()).collect();
    assert_eq!(children.len(), 1);
    assert_eq!(children[0].attribute("class"), Some("frame"));
}

#[test]
fn button_is_a_rect_with_its_label() {
    let mut doc = GuiDocument::new("d", Frame::default(), "");
    doc.features = vec![feature("f", FeatureStatus::Implemented)];
    doc.instances = vec![inst("f-1", "FilledButton", "f", (10.0, 20.0, 120.0, 40.0), json!({"label": "Go"}))];
    let svg = render_svg(&doc, &Catalog::bundled(), &RenderOptions::default()).unwrap();
    assert_eq!(bounds(&svg), vec![("f-1".to_string(), [10.0, 20.0, 120.0, 40.0])]);
    let tree = roxmltree::Document::parse(&svg).unwrap();
    let text = tree.descendants().find(|n| n.has_tag_name("text")).unwrap();
    assert_eq!(text.text(), Some("Go"));
    assert_eq!(text.attribute("clip-path"), Some("url(#clip.f-1)"));
}

#[test]
fn parse_back_matches_geometry_at_several_scales() {
    let doc = sample();
    for scale in [1.0, 2.5, 0.3] {
        let opts = RenderOptions { scale, show_feature_outlines: true, ..RenderOptions::default() };
        let svg = render_svg(&doc, &Catalog::bundled(), &opts).unwrap();
        let got = bounds(&svg);
        let all = doc.all_instances();
        assert_eq!(got.len(), all.len());
        for inst in all {
            let (_, g) = got.iter().find(|(id, _)| *id == inst.instance_id).unwrap();
            let want = [inst.pos_x * scale, inst.pos_y * scale, inst.width * scale, inst.height * scale];
            assert_eq!(*g, want, "{} at scale {scale}", inst.instance_id);
        }
    }
}

#[test]
fn groups_exist_for_features_owning_instances() {
    let svg = render_svg(&sample(), &Catalog::bundled(), &RenderOptions::default()).unwrap();
    assert_eq!(feature_groups(&svg), vec!["a", "c"]);
    assert!(svg.contains(r#"data-status="stale""#));
    assert!(svg.contains("Save &lt;now&gt;"));
    assert!(svg.contains("a &amp; &lt;name&gt;"));
}

#[test]
fn nested_children_sit_inside_their_parent_group() {
    let svg = render_svg(&sample(), &Catalog::bundled(), &RenderOptions::default()).unwrap();
    let tree = roxmltree::Document::parse(&svg).unwrap();
    let child = tree.descendants().find(|n| n.attribute("data-instance") == Some("c-2") && n.has_tag_name("g")).unwrap();
    let parent = child.parent_element().unwrap();
    assert_eq!(parent.attribute("data-instance"), Some("c-1"));
}

#[test]
fn rendering_is_deterministic() {
    let doc = sample();
    let cat = Catalog::bundled();
    let a = render_svg(&doc, &cat, &RenderOptions::default()).unwrap();
    let b = render_svg(&doc.clone(), &cat, &RenderOptions::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn invalid_input_is_rejected() {
    let mut doc = sample();
    doc.instances[0].type_name = "HoloPanel".into();
    let err = render_svg(&doc, &Catalog::bundled(), &RenderOptions::default()).unwrap_err();
    assert!(matches!(err, RenderError::InvalidDocument(r) if r.has_rule("unknown-type")));
    for opts in [
        RenderOptions { scale: 0.0, ..RenderOptions::default() },
        RenderOptions { scale: f64::NAN, ..RenderOptions::default() },
        RenderOptions { background: "\"/><script".into(), ..RenderOptions::default() },
    ] {
        assert!(matches!(render_svg(&sample(), &Catalog::bundled(), &opts), Err(RenderError::InvalidOptions(_))));
    }
}

#[test]
fn glyph_table_covers_every_bundled_group() {
    let table = GlyphTable::bundled();
    let cat = Catalog::bundled();
    for group in cat.groups() {
        assert!(table.covers_group(group), "group {group} has no glyph");
    }
    assert_eq!(table.kind(Some("Button"), "FloatingActionButton"), GlyphKind::IconButton);
    assert_eq!(table.kind(Some("Button"), "FilledButton"), GlyphKind::Button);
    assert_eq!(table.kind(None, "Anything"), GlyphKind::Box);
    assert!(GlyphTable::parse(r#"{"default":"blob","groups":{}}"#).is_err());
}

#[test]
fn icon_glyph_comes_from_the_catalog() {
    let cat = Catalog::bundled();
    let icon = &cat.icons()[0];
    let mut doc = GuiDocument::new("d", Frame::default(), "");
    doc.features = vec![feature("f", FeatureStatus::Implemented)];
    doc.instances = vec![inst("f-1", "Icon", "f", (0.0, 0.0, 24.0, 24.0), json!({"name": icon.name}))];
    let svg = render_svg(&doc, &cat, &RenderOptions::default()).unwrap();
    assert!(svg.contains(&format!(">{}</text>", icon.glyph)));
}

#[test]
fn layout_examples() {
    let cat = Catalog::bundled();
    let mut doc = GuiDocument::new("d", Frame::default(), "");
    doc.features = vec![feature("p", FeatureStatus::Implemented), feature("q", FeatureStatus::Implemented)];
    doc.instances = vec![
        inst("p-1", "Label", "p", (0.0, 0.0, 100.0, 100.0), json!({"text": "x"})),
        inst("q-1", "Label", "q", (50.0, 50.0, 100.0, 100.0), json!({"text": "y"})),
    ];
    let r = layout_report(&doc);
    assert_eq!(r.overlaps, vec![("p-1".to_string(), "q-1".to_string())]);
    assert!(r.out_of_frame.is_empty());

    doc.instances[1].pos_x = 100.0;
    doc.instances[1].pos_y = 0.0;
    assert!(layout_report(&doc).is_clean(), "touching edges do not overlap");

    doc.instances[1].pos_x = doc.frame.width - 10.0;
    doc.instances[1].width = 50.0;
    doc.instances[1].height = 20.0;
    let r = layout_report(&doc);
    assert_eq!(r.out_of_frame, vec!["q-1"]);
    assert!(render_svg(&doc, &cat, &RenderOptions::default()).is_ok());
}

#[test]
fn same_feature_overlap_is_not_reported() {
    let mut doc = GuiDocument::new("d", Frame::default(), "");
    doc.features = vec![feature("p", FeatureStatus::Implemented)];
    doc.instances = vec![
        inst("p-1", "Label", "p", (0.0, 0.0, 100.0, 100.0), json!({"text": "x"})),
        inst("p-2", "Label", "p", (50.0, 50.0, 100.0, 100.0), json!({"text": "y"})),
    ];
    assert!(layout_report(&doc).is_clean());
}

prop_compose! {
    fn arb_doc()(
        layout in prop::collection::vec(
            prop::collection::vec((any::<prop::sample::Index>(), 0.0f64..400.0, 0.0f64..900.0, 1.0f64..400.0, 1.0f64..300.0), 0..5),
            1..5,
        ),
        word in "[ -~]{1,12}",
    ) -> GuiDocument {
        let cat = Catalog::bundled();
        let mut doc = GuiDocument::new("rand", Frame::default(), "random");
        for (fi, insts) in layout.into_iter().enumerate() {
            let fid = format!("f{fi}");
            doc.features.push(feature(&fid, if insts.is_empty() { FeatureStatus::Pending } else { FeatureStatus::Implemented }));
            for (k, (pick, x, y, w, h)) in insts.into_iter().enumerate() {
                let spec = pick.get(cat.components());
                let mut i = inst(&format!("{fid}-{}", k + 1), &spec.type_name, &fid, (x, y, w, h), json!({}));
                i.attributes = required_attrs(spec, &cat, &word);
                doc.instances.push(i);
            }
        }
        doc
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_valid_document_renders_faithfully(doc in arb_doc(), scale in 0.25f64..4.0) {
        let cat = Catalog::bundled();
        let report = crate::ir::validate_document(&doc, &cat);
        prop_assert!(report.valid, "{:?}", report.violations);
        let svg = render_svg(&doc, &cat, &RenderOptions { scale, ..RenderOptions::default() }).unwrap();
        let got = bounds(&svg);
        prop_assert_eq!(got.len(), doc.instances.len());
        for (inst, (id, g)) in doc.instances_in_render_order().into_iter().zip(got) {
            prop_assert_eq!(&inst.instance_id, &id);
            prop_assert_eq!(g, [inst.pos_x * scale, inst.pos_y * scale, inst.width * scale, inst.height * scale]);
        }
        let owners: Vec<String> = doc.features.iter()
            .filter(|f| doc.instances.iter().any(|i| i.feature_id == f.id))
            .map(|f| f.id.clone())
            .collect();
        prop_assert_eq!(feature_groups(&svg), owners);
    }
}

trait RenderOrder {
    fn instances_in_render_order(&self) -> Vec<&ComponentInstance>;
}

impl RenderOrder for GuiDocument {
    fn instances_in_render_order(&self) -> Vec<&ComponentInstance> {
        self.features.iter().flat_map(|f| self.instances_of(&f.id).flat_map(|i| i.walk())).collect()
    }
}
