//! Group-to-sketch table shipped next to the bundled catalog.

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GlyphKind {
    Box,
    Button,
    IconButton,
    Segmented,
    Checkbox,
    Radio,
    Switch,
    Slider,
    TextField,
    Text,
    Search,
    Container,
    Bar,
    Chip,
    ListItem,
    Divider,
    Progress,
    Badge,
    Image,
    Icon,
}

impl FromStr for GlyphKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "box" => GlyphKind::Box,
            "button" => GlyphKind::Button,
            "icon-button" => GlyphKind::IconButton,
            "segmented" => GlyphKind::Segmented,
            "checkbox" => GlyphKind::Checkbox,
            "radio" => GlyphKind::Radio,
            "switch" => GlyphKind::Switch,
            "slider" => GlyphKind::Slider,
            "text-field" => GlyphKind::TextField,
            "text" => GlyphKind::Text,
            "search" => GlyphKind::Search,
            "container" => GlyphKind::Container,
            "bar" => GlyphKind::Bar,
            "chip" => GlyphKind::Chip,
            "list-item" => GlyphKind::ListItem,
            "divider" => GlyphKind::Divider,
            "progress" => GlyphKind::Progress,
            "badge" => GlyphKind::Badge,
            "image" => GlyphKind::Image,
            "icon" => GlyphKind::Icon,
            other => return Err(format!("unknown glyph kind `{other}`")),
        })
    }
}

#[derive(Deserialize)]
struct TableFile {
    default: String,
    groups: HashMap<String, String>,
    #[serde(default)]
    types: HashMap<String, String>,
}

/// Resolves the sketch for a component: type override, then group, then
/// the default.
#[derive(Debug, Clone)]
pub struct GlyphTable {
    default: GlyphKind,
    groups: HashMap<String, GlyphKind>,
    types: HashMap<String, GlyphKind>,
}

impl GlyphTable {
    pub fn parse(text: &str) -> Result<Self, String> {
        let file: TableFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let convert = |m: HashMap<String, String>| -> Result<HashMap<String, GlyphKind>, String> {
            m.into_iter().map(|(k, v)| Ok((k, v.parse()?))).collect()
        };
        Ok(GlyphTable {
            default: file.default.parse()?,
            groups: convert(file.groups)?,
            types: convert(file.types)?,
        })
    }

    pub fn bundled() -> &'static GlyphTable {
        static TABLE: OnceLock<GlyphTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            GlyphTable::parse(include_str!("../../assets/material3-glyphs.json")).expect("bundled glyph table parses")
        })
    }

    pub fn kind(&self, group: Option<&str>, type_name: &str) -> GlyphKind {
        self.types
            .get(type_name)
            .or_else(|| group.and_then(|g| self.groups.get(g)))
            .copied()
            .unwrap_or(self.default)
    }

    pub fn covers_group(&self, group: &str) -> bool {
        self.groups.contains_key(group)
    }
}
