use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use elp_resolve_core::Error;
use serde::Serialize;

/// Error payload: `{"error": code, "detail": message}`, plus the source
/// line for parse errors.
#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub error: &'static str,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, error: &'static str, detail: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                error,
                detail: detail.into(),
                line: None,
            },
        }
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("no session `{id}`"),
        )
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let detail = e.to_string();
        let (status, code, line) = match &e {
            Error::Syntax { line, .. } => (StatusCode::BAD_REQUEST, "parse_error", Some(*line)),
            Error::DuplicateRuleId { line, .. } => {
                (StatusCode::BAD_REQUEST, "parse_error", Some(*line))
            }
            Error::InvalidTarget(_) => (StatusCode::CONFLICT, "invalid_target", None),
            Error::StaleExtension(_) => (StatusCode::CONFLICT, "stale_extension", None),
            Error::EmptyHistory => (StatusCode::CONFLICT, "empty_history", None),
            Error::NotClean => (StatusCode::CONFLICT, "not_clean", None),
            Error::InvalidSelection { .. } => (StatusCode::BAD_REQUEST, "invalid_selection", None),
            Error::UnknownFormat(_) => (StatusCode::BAD_REQUEST, "unknown_format", None),
            Error::MalformedExtension(_) => (StatusCode::BAD_REQUEST, "malformed_extension", None),
            Error::TooLarge { .. } | Error::TooManyExtensions { .. } => {
                (StatusCode::UNPROCESSABLE_ENTITY, "too_large", None)
            }
            Error::UnresolvableRules { .. } => {
                (StatusCode::UNPROCESSABLE_ENTITY, "unresolvable", None)
            }
            Error::UnknownRule(_)
            | Error::UnknownGroup(_)
            | Error::NotConflicting(_)
            | Error::InconsistentExtension { .. } => {
                (StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", None)
            }
        };
        Self {
            status,
            body: ErrorBody {
                error: code,
                detail,
                line,
            },
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
