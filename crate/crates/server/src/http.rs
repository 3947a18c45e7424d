//! `POST /parse` and `GET /healthz`.

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Deserialize;
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;
use tracing::info;

use crate::batcher::BatcherConfig;
use crate::engine::Engine;
use crate::service::{ServeError, Service, ServiceConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServerConfig {
    pub host: String,
    pub port: u16,
    pub workers: usize,
    pub batch_window: Duration,
    pub max_batch_sentences: usize,
    /// False turns cross-request batching off.
    pub batching: bool,
    pub queue_depth: usize,
    pub record_tickets: bool,
}

impl Default for ServerConfig {
    fn default() -> Self {
        let batcher = BatcherConfig::default();
        ServerConfig {
            host: "0.0.0.0".to_string(),
            port: 8000,
            workers: 4,
            batch_window: batcher.window,
            max_batch_sentences: batcher.max_sentences,
            batching: true,
            queue_depth: 1024,
            record_tickets: false,
        }
    }
}

impl ServerConfig {
    pub fn service(&self) -> ServiceConfig {
        let batcher = if self.batching {
            BatcherConfig {
                window: self.batch_window,
                max_sentences: self.max_batch_sentences.max(1),
                merge: true,
            }
        } else {
            BatcherConfig::unbatched()
        };
        ServiceConfig {
            workers: self.workers.max(1),
            batcher,
            queue_depth: self.queue_depth,
            record_tickets: self.record_tickets,
        }
    }
}

/// Text is one document or a list of documents.
#[derive(Deserialize)]
#[serde(untagged)]
enum Text {
    One(String),
    Many(Vec<String>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParseRequest {
    text: Option<Text>,
    tokens: Option<Vec<Vec<String>>>,
    models: Option<Vec<String>>,
    language: Option<String>,
}

impl IntoResponse for ServeError {
    fn into_response(self) -> Response {
        let status = match self {
            ServeError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServeError::Unprocessable(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServeError::Busy(_) => StatusCode::SERVICE_UNAVAILABLE,
            ServeError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let mut response = (status, json_body(json!({ "error": self.to_string() }).to_string())).into_response();
        if status == StatusCode::SERVICE_UNAVAILABLE {
            response.headers_mut().insert(header::RETRY_AFTER, header::HeaderValue::from_static("1"));
        }
        response
    }
}

fn json_body(body: String) -> impl IntoResponse {
    ([(header::CONTENT_TYPE, "application/json")], body)
}

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/parse", post(parse))
        .route("/healthz", get(healthz))
        .with_state(service)
}

async fn parse(State(service): State<Arc<Service>>, body: Bytes) -> Result<Response, ServeError> {
    let request: ParseRequest =
        serde_json::from_slice(&body).map_err(|e| ServeError::BadRequest(format!("malformed body: {}", e)))?;
    let signature = service.resolve(request.models.as_deref(), request.language.as_deref())?;
    let sentences = match (request.text, request.tokens) {
        (Some(Text::One(text)), None) => service.tokenize(&signature, &text),
        (Some(Text::Many(texts)), None) => texts.iter().flat_map(|t| service.tokenize(&signature, t)).collect(),
        (None, Some(tokens)) => {
            for (i, sentence) in tokens.iter().enumerate() {
                if sentence.is_empty() {
                    return Err(ServeError::Unprocessable(format!("sentence {} is empty", i)));
                }
                if let Some(j) = sentence.iter().position(|t| t.trim().is_empty()) {
                    return Err(ServeError::Unprocessable(format!("token {} of sentence {} is empty", j, i)));
                }
            }
            tokens
        }
        _ => return Err(ServeError::BadRequest("exactly one of `text` and `tokens` is required".into())),
    };
    let doc = service.submit(signature, sentences).await?;
    let body = doc.to_json().map_err(|e| ServeError::Internal(e.to_string()))?;
    Ok(json_body(body).into_response())
}

async fn healthz(State(service): State<Arc<Service>>) -> Response {
    let config = service.config();
    let body = json!({
        "status": "ok",
        "service": "mtnlp-server",
        "version": env!("CARGO_PKG_VERSION"),
        "models": service.models(),
        "workers": config.workers,
        "batching": config.batcher.merge,
        "batch_window_ms": config.batcher.window.as_secs_f64() * 1000.0,
        "max_batch_sentences": config.batcher.max_sentences,
        "queue_depth": config.queue_depth,
        "in_flight": service.in_flight(),
    });
    json_body(body.to_string()).into_response()
}

/// A running server.
pub struct ServerHandle {
    addr: SocketAddr,
    service: Arc<Service>,
    shutdown: Option<oneshot::Sender<()>>,
    task: JoinHandle<std::io::Result<()>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn service(&self) -> &Arc<Service> {
        &self.service
    }

    /// Waits until the server stops on its own (it never does unless it fails).
    pub async fn wait(mut self) -> std::io::Result<()> {
        self.shutdown.take();
        (&mut self.task).await.unwrap_or_else(|e| Err(std::io::Error::other(e)))
    }

    pub async fn shutdown(mut self) -> std::io::Result<()> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        (&mut self.task).await.unwrap_or_else(|e| Err(std::io::Error::other(e)))
    }
}

/// Binds `config.host:config.port` (port 0 picks a free one) and starts
/// serving in the background.
pub async fn serve(config: &ServerConfig, engine: Arc<dyn Engine>) -> std::io::Result<ServerHandle> {
    let listener = TcpListener::bind((config.host.as_str(), config.port)).await?;
    let addr = listener.local_addr()?;
    let service = Service::start(engine, config.service());
    let app = router(Arc::clone(&service));
    let (tx, rx) = oneshot::channel::<()>();
    info!(%addr, workers = config.workers, "listening");
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async move {
                // a dropped sender (see `wait`) means run forever
                if rx.await.is_err() {
                    std::future::pending::<()>().await;
                }
            })
            .await
    });
    Ok(ServerHandle {
        addr,
        service,
        shutdown: Some(tx),
        task,
    })
}
