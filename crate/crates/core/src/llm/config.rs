use std::path::PathBuf;
use std::time::Duration;

use super::{LlmError, Mode, DEFAULT_MAX_OUTPUT_TOKENS};

pub const ENV_ENDPOINT: &str = "GUIDE_LLM_ENDPOINT";
pub const ENV_API_KEY: &str = "GUIDE_LLM_API_KEY";
pub const ENV_MODEL: &str = "GUIDE_LLM_MODEL";
pub const ENV_MODE: &str = "GUIDE_LLM_MODE";

#[derive(Debug, Clone, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 3,
            initial_backoff: Duration::from_millis(500),
            max_backoff: Duration::from_secs(8),
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (1-based): doubles from the initial
    /// backoff, capped.
    pub fn backoff(&self, retry: u32) -> Duration {
        let factor = 2u32.saturating_pow(retry.saturating_sub(1));
        self.initial_backoff.saturating_mul(factor).min(self.max_backoff)
    }
}

/// Gateway settings. The credential is referenced by environment variable
/// name and resolved only when a live backend is built.
#[derive(Debug, Clone, PartialEq)]
pub struct GatewayConfig {
    pub mode: Mode,
    pub endpoint: String,
    pub api_key_env: String,
    pub model_id: String,
    pub max_output_tokens: u32,
    pub timeout: Duration,
    pub retry: RetryPolicy,
    pub fixtures: Option<PathBuf>,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        GatewayConfig {
            mode: Mode::Replay,
            endpoint: "https://api.openai.com/v1".to_string(),
            api_key_env: ENV_API_KEY.to_string(),
            model_id: "gpt-4o".to_string(),
            max_output_tokens: DEFAULT_MAX_OUTPUT_TOKENS,
            timeout: Duration::from_secs(120),
            retry: RetryPolicy::default(),
            fixtures: None,
        }
    }
}

impl GatewayConfig {
    /// Defaults overridden by `GUIDE_LLM_*` variables.
    pub fn from_env() -> Result<Self, LlmError> {
        let mut cfg = GatewayConfig::default();
        if let Ok(endpoint) = std::env::var(ENV_ENDPOINT) {
            cfg.endpoint = endpoint;
        }
        if let Ok(model) = std::env::var(ENV_MODEL) {
            cfg.model_id = model;
        }
        if let Ok(mode) = std::env::var(ENV_MODE) {
            cfg.mode = mode.parse()?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.timeout.is_zero() {
            return Err(LlmError::Config("timeout must be positive".into()));
        }
        if self.max_output_tokens == 0 {
            return Err(LlmError::Config("max_output_tokens must be positive".into()));
        }
        if self.retry.max_attempts == 0 {
            return Err(LlmError::Config("retry.max_attempts must be at least 1".into()));
        }
        if self.mode != Mode::Live && self.fixtures.is_none() {
            return Err(LlmError::Config(format!("{} mode needs a fixture file", self.mode)));
        }
        Ok(())
    }

    pub fn chat_url(&self) -> String {
        let base = self.endpoint.trim_end_matches('/');
        if base.ends_with("/chat/completions") {
            base.to_string()
        } else {
            format!("{base}/chat/completions")
        }
    }
}
