//! HTTP service: projects persisted as JSON files, pipeline runs, feature
//! editing with per-project write locks, previews.

mod app;
mod error;
pub mod openapi;
mod store;

pub use app::{router, AppState, ServiceConfig};
pub use error::{ApiError, ErrorCode};
pub use store::{Disk, FsDisk, Project, ProjectStore, StoreError};

/// Binds and serves until the process is stopped.
pub async fn serve(addr: std::net::SocketAddr, state: std::sync::Arc<AppState>, cfg: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state, &cfg)).await
}
