use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use chrono::Utc;

use super::{
    fixture_key, ChatBackend, ChatExchange, ChatModel, CompletionOptions, FixtureStore, GatewayConfig, HttpBackend,
    LlmError, Mode, PromptPart,
};

/// Routes completions according to the configured mode.
pub struct Gateway {
    mode: Mode,
    backend: Option<Arc<dyn ChatBackend>>,
    fixtures: Option<Arc<FixtureStore>>,
    backend_calls: AtomicUsize,
    served: Mutex<BTreeSet<String>>,
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway")
            .field("mode", &self.mode)
            .field("fixtures", &self.fixtures)
            .field("backend_calls", &self.backend_calls())
            .finish()
    }
}

impl Gateway {
    pub fn live(backend: Arc<dyn ChatBackend>) -> Self {
        Self::with(Mode::Live, Some(backend), None)
    }

    pub fn record(backend: Arc<dyn ChatBackend>, fixtures: Arc<FixtureStore>) -> Self {
        Self::with(Mode::Record, Some(backend), Some(fixtures))
    }

    /// A replaying gateway holds no transport at all.
    pub fn replay(fixtures: Arc<FixtureStore>) -> Self {
        Self::with(Mode::Replay, None, Some(fixtures))
    }

    fn with(mode: Mode, backend: Option<Arc<dyn ChatBackend>>, fixtures: Option<Arc<FixtureStore>>) -> Self {
        Gateway {
            mode,
            backend,
            fixtures,
            backend_calls: AtomicUsize::new(0),
            served: Mutex::new(BTreeSet::new()),
        }
    }

    /// Builds the gateway described by `cfg`, constructing the HTTP backend
    /// for live and record modes.
    pub fn from_config(cfg: &GatewayConfig) -> Result<Self, LlmError> {
        cfg.validate()?;
        match cfg.mode {
            Mode::Live => Ok(Self::live(Arc::new(HttpBackend::new(cfg)?))),
            Mode::Record => {
                let path = cfg.fixtures.as_ref().expect("validated");
                Ok(Self::record(
                    Arc::new(HttpBackend::new(cfg)?),
                    Arc::new(FixtureStore::open_or_create(path)?),
                ))
            }
            Mode::Replay => {
                let path = cfg.fixtures.as_ref().expect("validated");
                Ok(Self::replay(Arc::new(FixtureStore::open(path)?)))
            }
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn fixtures(&self) -> Option<&Arc<FixtureStore>> {
        self.fixtures.as_ref()
    }

    /// Number of times the transport was invoked.
    pub fn backend_calls(&self) -> usize {
        self.backend_calls.load(Ordering::SeqCst)
    }

    /// Fixture keys answered so far (replay and record).
    pub fn served_keys(&self) -> BTreeSet<String> {
        self.served.lock().expect("served lock").clone()
    }

    fn call_backend(&self, parts: &[PromptPart], opts: &CompletionOptions, key: &str) -> Result<ChatExchange, LlmError> {
        let backend = self
            .backend
            .as_ref()
            .ok_or_else(|| LlmError::Config(format!("{} mode needs a backend", self.mode)))?;
        self.backend_calls.fetch_add(1, Ordering::SeqCst);
        let reply = backend.send(parts, opts)?;
        if reply.usage.completion_tokens > u64::from(opts.max_output_tokens) {
            return Err(LlmError::Protocol(format!(
                "completion used {} tokens, limit is {}",
                reply.usage.completion_tokens, opts.max_output_tokens
            )));
        }
        Ok(ChatExchange {
            exchange_id: format!("ex-{}", &key[..16]),
            prompt_parts: parts.to_vec(),
            response_text: reply.text,
            usage: reply.usage,
            mode: self.mode,
            model_id: backend.model_id().to_string(),
            timestamp: Utc::now(),
            attempts: reply.attempts,
        })
    }
}

impl ChatModel for Gateway {
    fn complete(&self, parts: &[PromptPart], opts: &CompletionOptions) -> Result<ChatExchange, LlmError> {
        if parts.is_empty() {
            return Err(LlmError::Config("prompt must have at least one part".into()));
        }
        let key = fixture_key(parts);
        match self.mode {
            Mode::Live => self.call_backend(parts, opts, &key),
            Mode::Record => {
                let store = self.fixtures.as_ref().expect("record gateway has fixtures");
                let exchange = match store.get(&key) {
                    Some(existing) => existing,
                    None => {
                        let exchange = self.call_backend(parts, opts, &key)?;
                        store.insert(&key, &exchange)?;
                        exchange
                    }
                };
                self.served.lock().expect("served lock").insert(key);
                Ok(exchange)
            }
            Mode::Replay => {
                let store = self.fixtures.as_ref().expect("replay gateway has fixtures");
                let mut exchange = store.get(&key).ok_or_else(|| LlmError::FixtureMiss { hash: key.clone() })?;
                exchange.mode = Mode::Replay;
                self.served.lock().expect("served lock").insert(key);
                Ok(exchange)
            }
        }
    }
}
