use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use guide_core::engine::EngineError;
use guide_core::ir::Violation;
use guide_core::render::RenderError;
use guide_core::ValidationReport;
use serde::{Deserialize, Serialize};

use crate::store::StoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadRequest,
    NotFound,
    Conflict,
    UpstreamLlm,
    Internal,
}

impl ErrorCode {
    pub fn status(self) -> StatusCode {
        match self {
            ErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ErrorCode::NotFound => StatusCode::NOT_FOUND,
            ErrorCode::Conflict => StatusCode::CONFLICT,
            ErrorCode::UpstreamLlm => StatusCode::BAD_GATEWAY,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<ValidationReport>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError { code, message: message.into(), detail: None }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::BadRequest, message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::NotFound, message)
    }

    pub fn conflict(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::Conflict, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::Internal, message)
    }

    pub fn with_detail(mut self, violations: Vec<Violation>) -> Self {
        if !violations.is_empty() {
            self.detail = Some(ValidationReport::from_violations(violations));
        }
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match &e {
            StoreError::NotFound(_) => ApiError::not_found(e.to_string()),
            StoreError::InvalidDocument(report) => {
                ApiError { detail: Some(report.clone()), ..ApiError::internal(e.to_string()) }
            }
            StoreError::CorruptProject { report, .. } => ApiError { detail: report.clone(), ..ApiError::internal(e.to_string()) },
            StoreError::Storage { .. } => ApiError::internal(e.to_string()),
        }
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let message = e.to_string();
        match e {
            EngineError::EmptyDescription | EngineError::Precondition(_) => ApiError::bad_request(message),
            EngineError::UnknownFeature(_) => ApiError::not_found(message),
            EngineError::LlmUnavailable { .. } => ApiError::new(ErrorCode::UpstreamLlm, message),
            EngineError::RepairExhausted { trace } => {
                ApiError::new(ErrorCode::UpstreamLlm, message).with_detail(trace.violations.clone())
            }
            EngineError::Merge(ir) => {
                let violations = match &ir {
                    guide_core::ir::IrError::ValidationFailed(report) => report.violations.clone(),
                    _ => Vec::new(),
                };
                ApiError::new(ErrorCode::UpstreamLlm, message).with_detail(violations)
            }
        }
    }
}

impl From<RenderError> for ApiError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::InvalidOptions(m) => ApiError::bad_request(m),
            RenderError::InvalidDocument(report) => {
                ApiError { detail: Some(report), ..ApiError::internal("stored document does not validate") }
            }
        }
    }
}
