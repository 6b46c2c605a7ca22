use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{ChatExchange, LlmError};

/// One line of a fixture file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureLine {
    pub key: String,
    pub exchange: ChatExchange,
}

#[derive(Default)]
struct Inner {
    index: HashMap<String, usize>,
    lines: Vec<FixtureLine>,
}

/// Content-hash keyed exchange store, optionally backed by a JSON-lines file.
/// Appends are serialized; a key is stored at most once.
pub struct FixtureStore {
    path: Option<PathBuf>,
    inner: Mutex<Inner>,
}

impl std::fmt::Debug for FixtureStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FixtureStore")
            .field("path", &self.path)
            .field("len", &self.len())
            .finish()
    }
}

impl FixtureStore {
    pub fn in_memory() -> Self {
        FixtureStore { path: None, inner: Mutex::new(Inner::default()) }
    }

    /// Opens an existing fixture file; a missing file is an error.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, LlmError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| LlmError::Fixture(format!("{}: {e}", path.display())))?;
        let mut inner = Inner::default();
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| LlmError::Fixture(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: FixtureLine = serde_json::from_str(&line)
                .map_err(|e| LlmError::Fixture(format!("{}:{}: {e}", path.display(), n + 1)))?;
            if !inner.index.contains_key(&parsed.key) {
                inner.index.insert(parsed.key.clone(), inner.lines.len());
                inner.lines.push(parsed);
            }
        }
        Ok(FixtureStore { path: Some(path.to_path_buf()), inner: Mutex::new(inner) })
    }

    /// Opens a fixture file for recording, creating it when absent.
    pub fn open_or_create(path: impl AsRef<Path>) -> Result<Self, LlmError> {
        let path = path.as_ref();
        if path.exists() {
            return Self::open(path);
        }
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| LlmError::Fixture(e.to_string()))?;
        }
        File::create(path).map_err(|e| LlmError::Fixture(format!("{}: {e}", path.display())))?;
        Ok(FixtureStore { path: Some(path.to_path_buf()), inner: Mutex::new(Inner::default()) })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &str) -> Option<ChatExchange> {
        let inner = self.inner.lock().expect("fixture lock");
        inner.index.get(key).map(|&i| inner.lines[i].exchange.clone())
    }

    /// Stores an exchange under `key`. Returns false when the key was already
    /// present (the existing entry wins).
    pub fn insert(&self, key: &str, exchange: &ChatExchange) -> Result<bool, LlmError> {
        let mut inner = self.inner.lock().expect("fixture lock");
        if inner.index.contains_key(key) {
            return Ok(false);
        }
        let line = FixtureLine { key: key.to_string(), exchange: exchange.clone() };
        if let Some(path) = &self.path {
            let mut text = serde_json::to_string(&line).map_err(|e| LlmError::Fixture(e.to_string()))?;
            text.push('\n');
            let mut file = OpenOptions::new()
                .append(true)
                .create(true)
                .open(path)
                .map_err(|e| LlmError::Fixture(format!("{}: {e}", path.display())))?;
            file.write_all(text.as_bytes()).map_err(|e| LlmError::Fixture(e.to_string()))?;
        }
        let idx = inner.lines.len();
        inner.index.insert(key.to_string(), idx);
        inner.lines.push(line);
        Ok(true)
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("fixture lock").lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All stored lines in insertion order.
    pub fn lines(&self) -> Vec<FixtureLine> {
        self.inner.lock().expect("fixture lock").lines.clone()
    }
}
