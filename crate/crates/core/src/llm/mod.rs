//! Chat-completion gateway with live, record and replay modes.
//!
//! Every model round-trip becomes a [`ChatExchange`]. In record mode the
//! exchange is appended to a JSON-lines fixture keyed by a SHA-256 of the
//! canonicalized prompt; replay serves exchanges from that fixture and never
//! touches the network.

mod config;
mod fixtures;
mod gateway;
mod http;
mod scripted;
pub mod tokens;

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{GatewayConfig, RetryPolicy, ENV_API_KEY, ENV_ENDPOINT, ENV_MODE, ENV_MODEL};
pub use fixtures::{FixtureLine, FixtureStore};
pub use gateway::Gateway;
pub use http::HttpBackend;
pub use scripted::{FnBackend, ScriptRule, ScriptedBackend};
pub use tokens::{estimate_tokens, TokenEstimator, WordPunctEstimator};

/// Default cap on generated tokens per completion.
pub const DEFAULT_MAX_OUTPUT_TOKENS: u32 = 4095;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptPart {
    pub role: Role,
    pub text: String,
}

impl PromptPart {
    pub fn system(text: impl Into<String>) -> Self {
        PromptPart { role: Role::System, text: text.into() }
    }

    pub fn user(text: impl Into<String>) -> Self {
        PromptPart { role: Role::User, text: text.into() }
    }

    pub fn assistant(text: impl Into<String>) -> Self {
        PromptPart { role: Role::Assistant, text: text.into() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Live,
    Record,
    Replay,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Live => "live",
            Mode::Record => "record",
            Mode::Replay => "replay",
        })
    }
}

impl FromStr for Mode {
    type Err = LlmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "live" => Ok(Mode::Live),
            "record" => Ok(Mode::Record),
            "replay" => Ok(Mode::Replay),
            other => Err(LlmError::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// One model round-trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatExchange {
    pub exchange_id: String,
    pub prompt_parts: Vec<PromptPart>,
    pub response_text: String,
    pub usage: Usage,
    pub mode: Mode,
    pub model_id: String,
    pub timestamp: DateTime<Utc>,
    /// HTTP attempts spent, including retries. 1 for replayed exchanges that
    /// were recorded on the first try.
    #[serde(default = "one")]
    pub attempts: u32,
}

fn one() -> u32 {
    1
}

impl ChatExchange {
    /// The full prompt as one string; what prompt scans look at.
    pub fn prompt_text(&self) -> String {
        self.prompt_parts
            .iter()
            .map(|p| p.text.as_str())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompletionOptions {
    pub max_output_tokens: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        CompletionOptions {
            max_output_tokens: DEFAULT_MAX_OUTPUT_TOKENS,
            temperature: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("model endpoint unavailable after {attempts} attempt(s): {reason}")]
    Unavailable { attempts: u32, reason: String },
    #[error("no recorded exchange for prompt hash {hash}")]
    FixtureMiss { hash: String },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("request rejected with HTTP {status}: {body}")]
    Rejected { status: u16, body: String },
    #[error("unexpected response: {0}")]
    Protocol(String),
    #[error("fixture file error: {0}")]
    Fixture(String),
    #[error("gateway configuration: {0}")]
    Config(String),
}

/// Anything that can answer a prompt with an exchange.
pub trait ChatModel: Send + Sync {
    fn complete(&self, parts: &[PromptPart], opts: &CompletionOptions) -> Result<ChatExchange, LlmError>;
}

impl<T: ChatModel + ?Sized> ChatModel for std::sync::Arc<T> {
    fn complete(&self, parts: &[PromptPart], opts: &CompletionOptions) -> Result<ChatExchange, LlmError> {
        (**self).complete(parts, opts)
    }
}

/// Raw answer of a transport.
#[derive(Debug, Clone)]
pub struct BackendReply {
    pub text: String,
    pub usage: Usage,
    pub attempts: u32,
}

/// Transport behind the gateway: an HTTP endpoint, or a scripted stand-in.
pub trait ChatBackend: Send + Sync {
    fn model_id(&self) -> &str;
    fn send(&self, parts: &[PromptPart], opts: &CompletionOptions) -> Result<BackendReply, LlmError>;
}

/// SHA-256 over the canonical JSON of `[[role, text], ...]`, hex encoded.
pub fn fixture_key(parts: &[PromptPart]) -> String {
    let canonical: Vec<[&str; 2]> = parts.iter().map(|p| [p.role.as_str(), p.text.as_str()]).collect();
    let bytes = serde_json::to_vec(&canonical).expect("prompt parts serialize");
    hex::encode(Sha256::digest(bytes))
}
