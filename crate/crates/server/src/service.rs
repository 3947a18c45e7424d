//! Request dispatch: ingress -> scheduler -> FIFO ticket queue -> workers.
//!
//! Handlers hand envelopes to a single scheduler task over a channel. The
//! scheduler owns the [`Batcher`] and forwards closed tickets, in closing
//! order, to a queue drained by a fixed pool of workers. Each request waits on
//! its own reply channel.

use std::ops::Range;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use mtnlp_core::{Document, Task};
use serde::Serialize;
use thiserror::Error;
use tokio::sync::{mpsc, oneshot};
use tracing::{debug, warn};

use crate::batcher::{Batcher, BatcherConfig, Clock, Envelope, Signature, SystemClock, Ticket};
use crate::engine::{Engine, ModelInfo};
use crate::route::route_responses;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ServeError {
    #[error("{0}")]
    BadRequest(String),

    #[error("{0}")]
    Unprocessable(String),

    #[error("server busy: {0} requests in flight")]
    Busy(usize),

    #[error("{0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServiceConfig {
    pub workers: usize,
    pub batcher: BatcherConfig,
    /// Requests accepted but not yet answered; beyond this new ones get 503.
    pub queue_depth: usize,
    /// Keep a log of every ticket (for tests and debugging).
    pub record_tickets: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            workers: 4,
            batcher: BatcherConfig::default(),
            queue_depth: 1024,
            record_tickets: false,
        }
    }
}

/// What a worker did with one ticket.
#[derive(Clone, Debug, Serialize)]
pub struct TicketRecord {
    pub seq: u64,
    pub signature: String,
    /// (request id, the request's own signature, sentence range)
    pub members: Vec<(u64, String, Range<usize>)>,
    pub worker: usize,
    pub started: Duration,
    pub finished: Duration,
    pub retried: bool,
}

struct Job {
    signature: Signature,
    sentences: Vec<Vec<String>>,
    reply: oneshot::Sender<Result<Document, ServeError>>,
}

struct Shared {
    engine: Arc<dyn Engine>,
    clock: Arc<dyn Clock>,
    log: Option<Mutex<Vec<TicketRecord>>>,
}

pub struct Service {
    config: ServiceConfig,
    models: Vec<ModelInfo>,
    shared: Arc<Shared>,
    ingress: mpsc::UnboundedSender<Envelope<Job>>,
    in_flight: Arc<AtomicUsize>,
    next_id: AtomicU64,
}

/// Releases a request's queue slot however the request ends.
struct Slot(Arc<AtomicUsize>);

impl Drop for Slot {
    fn drop(&mut self) {
        self.0.fetch_sub(1, Ordering::SeqCst);
    }
}

impl Service {
    /// Spawns the scheduler and workers on the current tokio runtime.
    pub fn start(engine: Arc<dyn Engine>, config: ServiceConfig) -> Arc<Service> {
        let shared = Arc::new(Shared {
            engine: Arc::clone(&engine),
            clock: Arc::new(SystemClock::default()),
            log: config.record_tickets.then(|| Mutex::new(Vec::new())),
        });
        let (ingress, inbox) = mpsc::unbounded_channel();
        let (ticket_tx, ticket_rx) = mpsc::unbounded_channel();
        tokio::spawn(schedule(inbox, ticket_tx, Batcher::new(config.batcher), Arc::clone(&shared.clock)));
        let queue = Arc::new(tokio::sync::Mutex::new(ticket_rx));
        for worker in 0..config.workers.max(1) {
            tokio::spawn(work(worker, Arc::clone(&queue), Arc::clone(&shared)));
        }
        Arc::new(Service {
            models: engine.models(),
            config,
            shared,
            ingress,
            in_flight: Arc::new(AtomicUsize::new(0)),
            next_id: AtomicU64::new(0),
        })
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn models(&self) -> &[ModelInfo] {
        &self.models
    }

    pub fn in_flight(&self) -> usize {
        self.in_flight.load(Ordering::SeqCst)
    }

    pub fn tickets(&self) -> Vec<TicketRecord> {
        match &self.shared.log {
            Some(log) => log.lock().unwrap_or_else(|e| e.into_inner()).clone(),
            None => Vec::new(),
        }
    }

    /// Picks the model for a request: the first loaded model of the language
    /// (default: the first model's) that serves every requested task.
    pub fn resolve(&self, tasks: Option<&[String]>, language: Option<&str>) -> Result<Signature, ServeError> {
        let language = match language {
            Some(l) => l.trim().to_lowercase(),
            None => self.models.first().map(|m| m.language.clone()).unwrap_or_default(),
        };
        let candidates: Vec<&ModelInfo> = self.models.iter().filter(|m| m.language == language).collect();
        if candidates.is_empty() {
            let mut served: Vec<&str> = self.models.iter().map(|m| m.language.as_str()).collect();
            served.dedup();
            return Err(ServeError::Unprocessable(format!(
                "language {:?} is not served (available: {})",
                language,
                served.join(", ")
            )));
        }
        let requested: Option<Vec<Task>> = match tasks {
            None => None,
            Some([]) => return Err(ServeError::Unprocessable("`models` is empty".into())),
            Some(names) => Some(
                names
                    .iter()
                    .map(|n| n.parse::<Task>().map_err(|e| ServeError::Unprocessable(e.to_string())))
                    .collect::<Result<_, _>>()?,
            ),
        };
        match requested {
            None => {
                let m = candidates[0];
                Ok(Signature::new(&m.identifier, &m.language, m.tasks.clone()))
            }
            Some(tasks) => candidates
                .iter()
                .find(|m| tasks.iter().all(|t| m.tasks.contains(t)))
                .map(|m| Signature::new(&m.identifier, &m.language, tasks.clone()))
                .ok_or_else(|| {
                    let names: Vec<&str> = tasks.iter().map(|t| t.as_str()).collect();
                    ServeError::Unprocessable(format!("no loaded {} model serves {}", language, names.join(",")))
                }),
        }
    }

    pub fn tokenize(&self, signature: &Signature, text: &str) -> Vec<Vec<String>> {
        self.shared.engine.tokenize(&signature.model, text)
    }

    /// Queues `sentences` and waits for the request's document.
    pub async fn submit(&self, signature: Signature, sentences: Vec<Vec<String>>) -> Result<Document, ServeError> {
        if sentences.is_empty() {
            return Ok(Document::default());
        }
        let before = self.in_flight.fetch_add(1, Ordering::SeqCst);
        let _slot = Slot(Arc::clone(&self.in_flight));
        if before >= self.config.queue_depth {
            return Err(ServeError::Busy(before));
        }
        let (reply, response) = oneshot::channel();
        let env = Envelope {
            id: self.next_id.fetch_add(1, Ordering::SeqCst),
            arrival: self.shared.clock.now(),
            sentences: sentences.len(),
            signature: signature.clone(),
            payload: Job {
                signature,
                sentences,
                reply,
            },
        };
        self.ingress
            .send(env)
            .map_err(|_| ServeError::Internal("scheduler stopped".into()))?;
        response
            .await
            .unwrap_or_else(|_| Err(ServeError::Internal("request dropped".into())))
    }
}

async fn schedule(
    mut inbox: mpsc::UnboundedReceiver<Envelope<Job>>,
    tickets: mpsc::UnboundedSender<Ticket<Job>>,
    mut batcher: Batcher<Job>,
    clock: Arc<dyn Clock>,
) {
    loop {
        let wait = batcher.next_deadline().map(|d| d.saturating_sub(clock.now()));
        tokio::select! {
            msg = inbox.recv() => match msg {
                Some(env) => {
                    batcher.push(env, clock.now());
                    // take whatever else is already waiting before closing anything
                    while let Ok(env) = inbox.try_recv() {
                        batcher.push(env, clock.now());
                    }
                }
                None => batcher.flush(),
            },
            _ = tokio::time::sleep(wait.unwrap_or_default()), if wait.is_some() => batcher.tick(clock.now()),
        }
        while let Some(ticket) = batcher.pop_ready() {
            debug!(seq = ticket.seq, signature = %ticket.signature, members = ticket.members.len(), "ticket closed");
            if tickets.send(ticket).is_err() {
                return;
            }
        }
        if inbox.is_closed() && batcher.pending() == 0 {
            return;
        }
    }
}

async fn work(worker: usize, queue: Arc<tokio::sync::Mutex<mpsc::UnboundedReceiver<Ticket<Job>>>>, shared: Arc<Shared>) {
    loop {
        let ticket = match queue.lock().await.recv().await {
            Some(t) => t,
            None => return,
        };
        let started = shared.clock.now();
        let mut sentences = Vec::with_capacity(ticket.sentences());
        for m in &ticket.members {
            sentences.extend(m.payload.sentences.iter().cloned());
        }
        let result = run(&shared.engine, &ticket.signature, sentences).await;
        let routed = route_responses(
            &result,
            ticket.members.iter().map(|m| (m.range.clone(), m.payload.sentences.as_slice())),
        );

        let retry = ticket.members.len() > 1;
        let mut retried = false;
        let mut replies = Vec::with_capacity(ticket.members.len());
        for (member, outcome) in ticket.members.iter().zip(routed) {
            let outcome = match outcome {
                Ok(doc) => Ok(doc),
                Err(e) if retry => {
                    // isolate the failure: rerun this request on its own
                    retried = true;
                    warn!(seq = ticket.seq, id = member.id, error = %e, "batch member failed, retrying alone");
                    let alone = run(&shared.engine, &ticket.signature, member.payload.sentences.clone()).await;
                    route_responses(&alone, [(0..member.payload.sentences.len(), member.payload.sentences.as_slice())])
                        .remove(0)
                        .map_err(|e| ServeError::Internal(e.to_string()))
                }
                Err(e) => Err(ServeError::Internal(e.to_string())),
            };
            replies.push(outcome);
        }

        if let Some(log) = &shared.log {
            log.lock().unwrap_or_else(|e| e.into_inner()).push(TicketRecord {
                seq: ticket.seq,
                signature: ticket.signature.to_string(),
                members: ticket
                    .members
                    .iter()
                    .map(|m| (m.id, m.payload.signature.to_string(), m.range.clone()))
                    .collect(),
                worker,
                started,
                finished: shared.clock.now(),
                retried,
            });
        }
        for (member, reply) in ticket.members.into_iter().zip(replies) {
            // the client may have gone away; nothing to do then
            let _ = member.payload.reply.send(reply);
        }
    }
}

async fn run(engine: &Arc<dyn Engine>, signature: &Signature, sentences: Vec<Vec<String>>) -> Result<Document, String> {
    let engine = Arc::clone(engine);
    let signature = signature.clone();
    match tokio::task::spawn_blocking(move || engine.run(&signature, sentences)).await {
        Ok(result) => result.map_err(|e| e.to_string()),
        Err(join) => Err(format!("engine panicked: {}", join)),
    }
}
