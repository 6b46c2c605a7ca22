#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{HeaderMap, Method, Request, StatusCode};
use axum::Router;
use guide_core::engine::Scenario;
use guide_core::llm::{FixtureStore, Gateway};
use guide_core::{Catalog, ChatModel, PipelineConfig};
use guide_service::{router, AppState, ProjectStore, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::Value;
use tempfile::TempDir;
use tower::ServiceExt;

pub fn fixtures_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn scenario(name: &str) -> Scenario {
    Scenario::load(&fixtures_root().join(name)).unwrap()
}

pub fn replay(name: &str) -> Gateway {
    let store = FixtureStore::open(fixtures_root().join(name).join("exchanges.jsonl")).unwrap();
    Gateway::replay(Arc::new(store))
}

pub struct Harness {
    pub app: Router,
    pub state: Arc<AppState>,
    pub dir: TempDir,
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }
}

impl Harness {
    pub fn new(llm: Arc<dyn ChatModel>) -> Harness {
        let dir = tempfile::tempdir().unwrap();
        Self::in_dir(dir, llm)
    }

    pub fn in_dir(dir: TempDir, llm: Arc<dyn ChatModel>) -> Harness {
        let store = ProjectStore::open(dir.path()).unwrap();
        let state = Arc::new(AppState::new(store, Catalog::bundled(), llm, PipelineConfig::default()));
        let app = router(state.clone(), &ServiceConfig::default());
        Harness { app, state, dir }
    }

    pub async fn call(&self, method: Method, uri: &str, body: Option<Value>, extra: &[(&str, &str)]) -> Reply {
        let mut req = Request::builder().method(method).uri(uri);
        for (k, v) in extra {
            req = req.header(*k, *v);
        }
        let req = match body {
            Some(v) => req.header("content-type", "application/json").body(Body::from(v.to_string())),
            None => req.body(Body::empty()),
        }
        .unwrap();
        let res = self.app.clone().oneshot(req).await.unwrap();
        let status = res.status();
        let headers = res.headers().clone();
        let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
        Reply { status, headers, body }
    }
}
