//! Read-only JSON API over one immutable dataset snapshot.
//!
//! Query parameters are named like the CLI flags and go through the same
//! [`AnalysisRequest::from_params`] path, so a response body equals the CLI
//! `--format json` output for the same parameters.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response as HttpResponse};
use axum::routing::get;
use axum::Router;
use serde::Serialize;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::trace::TraceLayer;

use crate::error::{Error, Result};
use crate::report::{self, AnalysisRequest, Endpoint, Response};
use crate::store::Dataset;

/// JSON error body.
#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
}

impl ApiError {
    fn bad_query(rejection: QueryRejection) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            error: "invalid_parameter",
            message: rejection.body_text(),
            parameter: None,
        }
    }
}

/// Caller faults map to 4xx, everything else to 500.
pub fn status_for(err: &Error) -> StatusCode {
    match err {
        Error::InvalidParameter { .. }
        | Error::EmptyRange { .. }
        | Error::UnknownGroup { .. }
        | Error::SchemeMismatch { .. }
        | Error::CategoryMismatch { .. }
        | Error::DegenerateK { .. }
        | Error::EmptyPayload
        | Error::KindMismatch { .. } => StatusCode::BAD_REQUEST,
        Error::UnknownInstitution { .. } => StatusCode::NOT_FOUND,
        Error::EmptyCohort { .. } | Error::ZeroPopulation { .. } => StatusCode::UNPROCESSABLE_ENTITY,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        let parameter = match &err {
            Error::InvalidParameter { parameter, .. } => Some(parameter.clone()),
            Error::UnknownGroup { .. } => Some("group".to_string()),
            Error::UnknownInstitution { .. } => Some("institution".to_string()),
            Error::EmptyRange { .. } => Some("years".to_string()),
            _ => None,
        };
        Self {
            status: status_for(&err),
            error: err.name(),
            message: err.to_string(),
            parameter,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> HttpResponse {
        let body = serde_json::to_string_pretty(&self).expect("error bodies serialize");
        (self.status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

fn json(response: &Response) -> HttpResponse {
    ([(header::CONTENT_TYPE, "application/json")], response.to_json()).into_response()
}

type Params = std::result::Result<Query<Vec<(String, String)>>, QueryRejection>;

async fn analysis(endpoint: Endpoint, ds: Arc<Dataset>, params: Params) -> std::result::Result<HttpResponse, ApiError> {
    let Query(pairs) = params.map_err(ApiError::bad_query)?;
    let request = AnalysisRequest::from_params(endpoint, &pairs)?;
    Ok(json(&report::execute(&ds, &request)?))
}

fn no_params(params: Params) -> std::result::Result<(), ApiError> {
    let Query(pairs) = params.map_err(ApiError::bad_query)?;
    match pairs.first() {
        Some((name, _)) => Err(Error::InvalidParameter {
            parameter: name.clone(),
            reason: "this endpoint takes no parameters".into(),
        }
        .into()),
        None => Ok(()),
    }
}

/// Builds the router. `cors_origin` of `*` allows any origin.
pub fn router(ds: Arc<Dataset>, cors_origin: Option<&str>) -> Result<Router> {
    let mut app =
        Router::new()
            .route(
                "/api/institutions",
                get(|State(ds): State<Arc<Dataset>>, q: Params| async move {
                    no_params(q).map(|_| json(&report::institutions(&ds)))
                }),
            )
            .route(
                "/api/scheme",
                get(|State(ds): State<Arc<Dataset>>, q: Params| async move {
                    no_params(q).map(|_| json(&report::scheme(&ds)))
                }),
            );
    for endpoint in Endpoint::ALL {
        app = app.route(
            &format!("/api/{}", endpoint.name()),
            get(move |State(ds): State<Arc<Dataset>>, q: Params| analysis(endpoint, ds, q)),
        );
    }
    let mut app = app.with_state(ds).layer(TraceLayer::new_for_http());
    if let Some(origin) = cors_origin {
        let allow = if origin == "*" {
            AllowOrigin::any()
        } else {
            let value = HeaderValue::from_str(origin)
                .map_err(|_| Error::invalid("cors-origin", format!("`{origin}` is not a valid origin")))?;
            AllowOrigin::exact(value)
        };
        app = app.layer(CorsLayer::new().allow_origin(allow).allow_methods([Method::GET]));
    }
    Ok(app)
}

/// Serves `ds` on `addr` until interrupted (Ctrl-C / SIGTERM).
pub fn serve(ds: Dataset, addr: SocketAddr, cors_origin: Option<String>) -> Result<()> {
    let app = router(Arc::new(ds), cors_origin.as_deref())?;
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        tracing::info!(%addr, "listening");
        axum::serve(listener, app)
            .with_graceful_shutdown(shutdown_signal())
            .await?;
        Ok(())
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = terminate => {},
    }
    tracing::info!("shutting down");
}
