//! SVG 1.1 wireframe writer.
//!
//! Every instance gets a `rect.bounds` carrying its exact box times the
//! scale; the group sketch is drawn on top, and text is clipped to the box.

use serde_json::Value;

use crate::catalog::{AttributeKind, Catalog};
use crate::ir::{validate_document, ComponentInstance, FeatureStatus, GuiDocument, GuiFeature};

use super::glyph::{GlyphKind, GlyphTable};
use super::{RenderError, RenderOptions};

const INK: &str = "#49454F";
const OUTLINE: &str = "#79747E";
const SURFACE: &str = "#F3EDF7";
const PRIMARY: &str = "#6750A4";
const ON_PRIMARY: &str = "#FFFFFF";
const ERROR: &str = "#B3261E";

const LABEL_KEYS: &[&str] = &[
    "label", "text", "title", "headline", "placeholder", "message", "value", "altText", "supportingText",
];

/// Shortest round-trip decimal; never `-0`.
fn num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn esc(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

fn status_name(s: FeatureStatus) -> &'static str {
    match s {
        FeatureStatus::Pending => "pending",
        FeatureStatus::Implemented => "implemented",
        FeatureStatus::Stale => "stale",
    }
}

/// Box in output coordinates.
#[derive(Clone, Copy)]
struct Px {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl Px {
    fn cx(&self) -> f64 {
        self.x + self.w / 2.0
    }

    fn cy(&self) -> f64 {
        self.y + self.h / 2.0
    }
}

struct Writer<'a> {
    out: String,
    scale: f64,
    catalog: &'a Catalog,
    table: &'a GlyphTable,
    depth: usize,
}

impl Writer<'_> {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn shape(&mut self, text: String) {
        self.line(&text);
    }

    fn text(&mut self, inst: &ComponentInstance, x: f64, y: f64, size: f64, anchor: &str, fill: &str, body: &str) {
        if body.is_empty() {
            return;
        }
        self.shape(format!(
            r#"<text x="{}" y="{}" font-family="Roboto, sans-serif" font-size="{}" text-anchor="{anchor}" dominant-baseline="middle" fill="{fill}" clip-path="url(#clip.{})">{}</text>"#,
            num(x),
            num(y),
            num(size),
            esc(&inst.instance_id),
            esc(body)
        ));
    }

    fn icon_glyph(&self, inst: &ComponentInstance) -> Option<String> {
        let spec = self.catalog.get(&inst.type_name);
        let from_attr = spec.and_then(|s| {
            s.attributes
                .iter()
                .filter(|a| a.kind == AttributeKind::IconRef)
                .find_map(|a| inst.attributes.get(&a.name).and_then(Value::as_str))
        });
        let name = inst.icon.as_deref().or(from_attr)?;
        Some(self.catalog.icon(name).map_or_else(|| name.to_string(), |i| i.glyph.clone()))
    }

    fn label(inst: &ComponentInstance) -> String {
        LABEL_KEYS
            .iter()
            .find_map(|k| match inst.attributes.get(*k) {
                Some(Value::String(s)) if !s.is_empty() => Some(s.clone()),
                Some(Value::Number(n)) => Some(n.to_string()),
                _ => None,
            })
            .unwrap_or_default()
    }

    fn instance(&mut self, inst: &ComponentInstance) {
        let s = self.scale;
        let b = Px { x: inst.pos_x * s, y: inst.pos_y * s, w: inst.width * s, h: inst.height * s };
        let group = self.catalog.get(&inst.type_name).map(|spec| spec.group.as_str());
        let kind = self.table.kind(group, &inst.type_name);
        let id = esc(&inst.instance_id);
        self.line(&format!(
            r#"<g class="instance" data-instance="{id}" data-type="{}" data-glyph="{kind:?}">"#,
            esc(&inst.type_name)
        ));
        self.depth += 1;

        let (fill, stroke, rx) = match kind {
            GlyphKind::Button | GlyphKind::Chip | GlyphKind::Search => (SURFACE, OUTLINE, b.h.min(b.w) / 2.0),
            GlyphKind::IconButton => (SURFACE, OUTLINE, b.h.min(b.w) / 4.0),
            GlyphKind::Bar => (SURFACE, "none", 0.0),
            GlyphKind::Container | GlyphKind::Segmented => (ON_PRIMARY, OUTLINE, 12.0 * s),
            GlyphKind::TextField | GlyphKind::Image | GlyphKind::ListItem | GlyphKind::Box => {
                (ON_PRIMARY, OUTLINE, 4.0 * s)
            }
            _ => ("none", "none", 0.0),
        };
        self.shape(format!(
            r#"<rect class="bounds" data-instance="{id}" x="{}" y="{}" width="{}" height="{}" rx="{}" fill="{fill}" stroke="{stroke}"/>"#,
            num(b.x),
            num(b.y),
            num(b.w),
            num(b.h),
            num(rx.max(0.0))
        ));
        self.shape(format!(
            r#"<clipPath id="clip.{id}"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath>"#,
            num(b.x),
            num(b.y),
            num(b.w),
            num(b.h)
        ));
        self.sketch(inst, kind, b);

        for child in &inst.children {
            self.instance(child);
        }
        self.depth -= 1;
        self.line("</g>");
    }

    fn sketch(&mut self, inst: &ComponentInstance, kind: GlyphKind, b: Px) {
        let label = Self::label(inst);
        let size = (b.h * 0.4).clamp(6.0 * self.scale, 16.0 * self.scale);
        let pad = 8.0 * self.scale;
        let glyph = self.icon_glyph(inst).unwrap_or_default();
        match kind {
            GlyphKind::Button | GlyphKind::Chip => {
                let body = if glyph.is_empty() { label } else { format!("{glyph} {label}") };
                self.text(inst, b.cx(), b.cy(), size, "middle", PRIMARY, body.trim());
            }
            GlyphKind::IconButton | GlyphKind::Icon => {
                let body = if glyph.is_empty() { label } else { glyph };
                self.text(inst, b.cx(), b.cy(), size, "middle", INK, &body);
            }
            GlyphKind::Segmented => {
                let parts: Vec<String> = ["segments", "tabs"]
                    .iter()
                    .find_map(|k| inst.attributes.get(*k).and_then(Value::as_str))
                    .map(|v| v.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect())
                    .unwrap_or_else(|| vec![label]);
                let n = parts.len().max(1) as f64;
                let w = b.w / n;
                for (i, part) in parts.iter().enumerate() {
                    let x = b.x + w * i as f64;
                    if i > 0 {
                        self.shape(format!(
                            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{OUTLINE}"/>"#,
                            num(x),
                            num(b.y),
                            num(x),
                            num(b.y + b.h)
                        ));
                    }
                    self.text(inst, x + w / 2.0, b.cy(), size, "middle", INK, part);
                }
            }
            GlyphKind::Checkbox | GlyphKind::Radio => {
                let side = (b.h.min(b.w) * 0.6).max(1.0);
                let (x, y) = (b.x + (b.h.min(b.w) - side) / 2.0, b.cy() - side / 2.0);
                if kind == GlyphKind::Checkbox {
                    self.shape(format!(
                        r#"<rect x="{}" y="{}" width="{}" height="{}" rx="2" fill="none" stroke="{INK}"/>"#,
                        num(x),
                        num(y),
                        num(side),
                        num(side)
                    ));
                } else {
                    self.shape(format!(
                        r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="{INK}"/>"#,
                        num(x + side / 2.0),
                        num(b.cy()),
                        num(side / 2.0)
                    ));
                }
                self.text(inst, x + side + pad, b.cy(), size, "start", INK, &label);
            }
            GlyphKind::Switch => {
                let tw = (b.h * 1.6).min(b.w);
                self.shape(format!(
                    r#"<rect x="{}" y="{}" width="{}" height="{}" rx="{}" fill="{SURFACE}" stroke="{OUTLINE}"/>"#,
                    num(b.x + b.w - tw),
                    num(b.y),
                    num(tw),
                    num(b.h),
                    num(b.h / 2.0)
                ));
                self.shape(format!(
                    r#"<circle cx="{}" cy="{}" r="{}" fill="{OUTLINE}"/>"#,
                    num(b.x + b.w - tw + b.h / 2.0),
                    num(b.cy()),
                    num(b.h / 3.0)
                ));
                self.text(inst, b.x, b.cy(), size, "start", INK, &label);
            }
            GlyphKind::Slider | GlyphKind::Progress => {
                if kind == GlyphKind::Progress && (b.w - b.h).abs() < f64::EPSILON * b.w.max(1.0) * 8.0 {
                    self.shape(format!(
                        r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="{PRIMARY}" stroke-width="{}" stroke-dasharray="{} {}"/>"#,
                        num(b.cx()),
                        num(b.cy()),
                        num(b.w * 0.4),
                        num(b.w * 0.1),
                        num(b.w * 0.8),
                        num(b.w * 0.8)
                    ));
                    return;
                }
                self.shape(format!(
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{OUTLINE}" stroke-width="2"/>"#,
                    num(b.x),
                    num(b.cy()),
                    num(b.x + b.w),
                    num(b.cy())
                ));
                self.shape(format!(
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{PRIMARY}" stroke-width="4"/>"#,
                    num(b.x),
                    num(b.cy()),
                    num(b.cx()),
                    num(b.cy())
                ));
                if kind == GlyphKind::Slider {
                    self.shape(format!(
                        r#"<circle cx="{}" cy="{}" r="{}" fill="{PRIMARY}"/>"#,
                        num(b.cx()),
                        num(b.cy()),
                        num((b.h / 3.0).max(1.0))
                    ));
                }
            }
            GlyphKind::TextField => {
                self.shape(format!(
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{INK}"/>"#,
                    num(b.x),
                    num(b.y + b.h),
                    num(b.x + b.w),
                    num(b.y + b.h)
                ));
                self.text(inst, b.x + pad, b.cy(), size, "start", INK, &label);
            }
            GlyphKind::Search => {
                let r = (b.h * 0.2).max(1.0);
                let cx = b.x + b.h / 2.0;
                self.shape(format!(
                    r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="{INK}" stroke-width="2"/>"#,
                    num(cx),
                    num(b.cy()),
                    num(r)
                ));
                self.shape(format!(
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{INK}" stroke-width="2"/>"#,
                    num(cx + r * 0.7),
                    num(b.cy() + r * 0.7),
                    num(cx + r * 1.6),
                    num(b.cy() + r * 1.6)
                ));
                self.text(inst, b.x + b.h, b.cy(), size, "start", OUTLINE, &label);
            }
            GlyphKind::Bar => {
                let body = if glyph.is_empty() { label } else { format!("{glyph}  {label}") };
                self.text(inst, b.x + pad, b.cy(), size, "start", INK, body.trim());
            }
            GlyphKind::Container => {
                self.text(inst, b.x + pad * 2.0, b.y + pad * 2.0 + size / 2.0, size, "start", INK, &label);
            }
            GlyphKind::ListItem => {
                let sub = inst.attributes.get("supportingText").and_then(Value::as_str).unwrap_or("");
                let head = inst.attributes.get("headline").and_then(Value::as_str).map_or(label, str::to_string);
                if sub.is_empty() {
                    self.text(inst, b.x + pad * 2.0, b.cy(), size, "start", INK, &head);
                } else {
                    self.text(inst, b.x + pad * 2.0, b.y + b.h * 0.35, size, "start", INK, &head);
                    self.text(inst, b.x + pad * 2.0, b.y + b.h * 0.7, size * 0.85, "start", OUTLINE, sub);
                }
            }
            GlyphKind::Divider => {
                let (x1, y1, x2, y2) = if b.h > b.w {
                    (b.cx(), b.y, b.cx(), b.y + b.h)
                } else {
                    (b.x, b.cy(), b.x + b.w, b.cy())
                };
                self.shape(format!(
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{OUTLINE}"/>"#,
                    num(x1),
                    num(y1),
                    num(x2),
                    num(y2)
                ));
            }
            GlyphKind::Badge => {
                self.shape(format!(
                    r#"<ellipse cx="{}" cy="{}" rx="{}" ry="{}" fill="{ERROR}"/>"#,
                    num(b.cx()),
                    num(b.cy()),
                    num(b.w / 2.0),
                    num(b.h / 2.0)
                ));
                let count = inst.attributes.get("count").map(|v| v.to_string().trim_matches('"').to_string());
                self.text(inst, b.cx(), b.cy(), size, "middle", ON_PRIMARY, &count.unwrap_or_default());
            }
            GlyphKind::Image => {
                for (x1, y1, x2, y2) in [(b.x, b.y, b.x + b.w, b.y + b.h), (b.x, b.y + b.h, b.x + b.w, b.y)] {
                    self.shape(format!(
                        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{OUTLINE}"/>"#,
                        num(x1),
                        num(y1),
                        num(x2),
                        num(y2)
                    ));
                }
            }
            GlyphKind::Text => {
                self.text(inst, b.x, b.cy(), size, "start", INK, &label);
            }
            GlyphKind::Box => {
                let body = if label.is_empty() { inst.type_name.clone() } else { label };
                self.text(inst, b.cx(), b.cy(), size, "middle", INK, &body);
            }
        }
    }

    fn feature(&mut self, doc: &GuiDocument, feature: &GuiFeature, outlines: bool) {
        let owned: Vec<&ComponentInstance> = doc.instances_of(&feature.id).collect();
        if owned.is_empty() {
            return;
        }
        self.line(&format!(
            r#"<g id="{}" class="feature" data-name="{}" data-status="{}">"#,
            esc(&feature.id),
            esc(&feature.name),
            status_name(feature.status)
        ));
        self.depth += 1;
        if outlines {
            let s = self.scale;
            let x0 = owned.iter().map(|i| i.pos_x).fold(f64::INFINITY, f64::min);
            let y0 = owned.iter().map(|i| i.pos_y).fold(f64::INFINITY, f64::min);
            let x1 = owned.iter().map(|i| i.right()).fold(f64::NEG_INFINITY, f64::max);
            let y1 = owned.iter().map(|i| i.bottom()).fold(f64::NEG_INFINITY, f64::max);
            self.shape(format!(
                r#"<rect class="feature-outline" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{PRIMARY}" stroke-dasharray="4 2"/>"#,
                num(x0 * s),
                num(y0 * s),
                num((x1 - x0) * s),
                num((y1 - y0) * s)
            ));
        }
        for inst in owned {
            self.instance(inst);
        }
        self.depth -= 1;
        self.line("</g>");
    }
}

/// Renders with the bundled glyph table.
pub fn render_svg(doc: &GuiDocument, catalog: &Catalog, opts: &RenderOptions) -> Result<String, RenderError> {
    render_svg_with(doc, catalog, opts, GlyphTable::bundled())
}

/// One `<g id=feature_id>` per feature owning instances, in document order.
/// Output depends only on the inputs.
pub fn render_svg_with(
    doc: &GuiDocument,
    catalog: &Catalog,
    opts: &RenderOptions,
    table: &GlyphTable,
) -> Result<String, RenderError> {
    opts.validate()?;
    let report = validate_document(doc, catalog);
    if !report.valid {
        return Err(RenderError::InvalidDocument(report));
    }
    let s = opts.scale;
    let (w, h) = (num(doc.frame.width * s), num(doc.frame.height * s));
    let mut wr = Writer { out: String::new(), scale: s, catalog, table, depth: 0 };
    wr.line(r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    wr.line(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" data-doc-id="{}" data-revision="{}">"#,
        esc(&doc.doc_id),
        doc.revision
    ));
    wr.depth = 1;
    wr.line(&format!(
        r#"<rect class="frame" x="0" y="0" width="{w}" height="{h}" fill="{}" stroke="{OUTLINE}"/>"#,
        esc(&opts.background)
    ));
    for feature in &doc.features {
        wr.feature(doc, feature, opts.show_feature_outlines);
    }
    wr.depth = 0;
    wr.line("</svg>");
    Ok(wr.out)
}
