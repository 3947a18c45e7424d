//! HTTP serving with arrival-time batching.

pub mod batcher;
pub mod engine;
pub mod http;
pub mod route;
pub mod service;
pub mod sim;

pub use batcher::{Batcher, BatcherConfig, Signature};
pub use engine::{CostModel, Engine, MockEngine, ModelInfo, PipelineEngine};
pub use http::{router, serve, ServerConfig, ServerHandle};
pub use service::{ServeError, Service, ServiceConfig, TicketRecord};
