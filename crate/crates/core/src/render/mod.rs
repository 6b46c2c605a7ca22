//! Static SVG preview of a document, plus a geometric sanity report.

mod glyph;
mod layout;
mod svg;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::ValidationReport;

pub use glyph::{GlyphKind, GlyphTable};
pub use layout::{layout_report, LayoutReport};
pub use svg::{render_svg, render_svg_with};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderOptions {
    pub scale: f64,
    pub show_feature_outlines: bool,
    /// Fill of the frame rectangle.
    pub background: String,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { scale: 1.0, show_feature_outlines: false, background: "#FFFBFE".into() }
    }
}

impl RenderOptions {
    pub fn validate(&self) -> Result<(), RenderError> {
        if !self.scale.is_finite() || self.scale <= 0.0 {
            return Err(RenderError::InvalidOptions(format!("scale {} must be finite and positive", self.scale)));
        }
        if self.background.is_empty() || self.background.chars().any(|c| matches!(c, '<' | '>' | '"' | '&')) {
            return Err(RenderError::InvalidOptions(format!("background `{}` is not a color", self.background)));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("document is not valid: {} violation(s)", .0.violations.len())]
    InvalidDocument(ValidationReport),
    #[error("invalid render options: {0}")]
    InvalidOptions(String),
}

#[cfg(test)]
mod tests;
