//! OpenAI-compatible chat-completions transport with bounded retries.
//!
//! Retries happen on transport failures (connect errors, timeouts), HTTP 5xx
//! and 429. Other 4xx responses fail immediately.

use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{BackendReply, ChatBackend, CompletionOptions, GatewayConfig, LlmError, PromptPart, RetryPolicy, Usage};

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: Vec<WireMessage<'a>>,
    max_tokens: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    temperature: Option<f64>,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireContent,
}

#[derive(Deserialize)]
struct WireContent {
    #[serde(default)]
    content: Option<String>,
}

pub struct HttpBackend {
    client: reqwest::blocking::Client,
    url: String,
    api_key: String,
    model_id: String,
    retry: RetryPolicy,
}

impl std::fmt::Debug for HttpBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpBackend")
            .field("url", &self.url)
            .field("model_id", &self.model_id)
            .field("api_key", &"<redacted>")
            .finish()
    }
}

enum Failure {
    Transient(String),
    Fatal(LlmError),
}

impl HttpBackend {
    /// Resolves the credential from the environment variable named in `cfg`.
    pub fn new(cfg: &GatewayConfig) -> Result<Self, LlmError> {
        let api_key = std::env::var(&cfg.api_key_env)
            .map_err(|_| LlmError::Auth(format!("environment variable {} is not set", cfg.api_key_env)))?;
        Self::with_key(cfg, api_key)
    }

    pub fn with_key(cfg: &GatewayConfig, api_key: String) -> Result<Self, LlmError> {
        if cfg.timeout.is_zero() {
            return Err(LlmError::Config("timeout must be positive".into()));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(cfg.timeout)
            .build()
            .map_err(|e| LlmError::Config(e.to_string()))?;
        Ok(HttpBackend {
            client,
            url: cfg.chat_url(),
            api_key,
            model_id: cfg.model_id.clone(),
            retry: cfg.retry.clone(),
        })
    }

    fn attempt(&self, body: &WireRequest<'_>) -> Result<BackendReply, Failure> {
        let response = self
            .client
            .post(&self.url)
            .bearer_auth(&self.api_key)
            .json(body)
            .send()
            .map_err(|e| Failure::Transient(e.to_string()))?;
        let status = response.status();
        if status.is_success() {
            let parsed: WireResponse = response
                .json()
                .map_err(|e| Failure::Fatal(LlmError::Protocol(e.to_string())))?;
            let text = parsed
                .choices
                .into_iter()
                .next()
                .and_then(|c| c.message.content)
                .ok_or_else(|| Failure::Fatal(LlmError::Protocol("response has no message content".into())))?;
            return Ok(BackendReply { text, usage: parsed.usage.unwrap_or_default(), attempts: 1 });
        }
        let code = status.as_u16();
        let body = response.text().unwrap_or_default();
        match code {
            429 | 500..=599 => Err(Failure::Transient(format!("HTTP {code}"))),
            401 | 403 => Err(Failure::Fatal(LlmError::Auth(format!("HTTP {code}")))),
            _ => Err(Failure::Fatal(LlmError::Rejected { status: code, body })),
        }
    }
}

impl ChatBackend for HttpBackend {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn send(&self, parts: &[PromptPart], opts: &CompletionOptions) -> Result<BackendReply, LlmError> {
        let body = WireRequest {
            model: &self.model_id,
            messages: parts
                .iter()
                .map(|p| WireMessage { role: p.role.as_str(), content: &p.text })
                .collect(),
            max_tokens: opts.max_output_tokens,
            temperature: opts.temperature,
        };
        let mut last = String::new();
        for attempt in 1..=self.retry.max_attempts {
            if attempt > 1 {
                let delay: Duration = self.retry.backoff(attempt - 1);
                log::debug!("retrying chat completion in {delay:?} (attempt {attempt})");
                thread::sleep(delay);
            }
            match self.attempt(&body) {
                Ok(mut reply) => {
                    reply.attempts = attempt;
                    return Ok(reply);
                }
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Transient(reason)) => {
                    log::warn!("chat completion attempt {attempt} failed: {reason}");
                    last = reason;
                }
            }
        }
        Err(LlmError::Unavailable { attempts: self.retry.max_attempts, reason: last })
    }
}
