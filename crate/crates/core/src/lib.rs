//! Decomposed GUI prototype generation.
//!
//! A high-level app description is turned into a list of fine-grained GUI
//! features, each feature is mapped to a handful of component types picked
//! from a token-lean view of the component catalog, and only the full specs
//! of those types are handed to the model to produce positioned component
//! instances. The result is an open JSON document ([`ir::GuiDocument`]) that
//! can be validated, edited feature by feature, regenerated incrementally and
//! previewed as SVG.

pub mod catalog;
pub mod engine;
pub mod ir;
pub mod llm;
pub mod render;

pub use catalog::{Catalog, ComponentSpec, SimplifiedCatalogView};
pub use engine::{PipelineConfig, StageTrace};
pub use ir::{ComponentInstance, Frame, GuiDocument, GuiFeature, ValidationReport};
pub use llm::{ChatExchange, ChatModel};
