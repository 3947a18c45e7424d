//! Arrival-time batching of requests that share a task signature.
//!
//! [`Batcher`] is a plain state machine: callers pass the current time to
//! every operation, so the same code runs under the wall clock in the server
//! and under a simulated clock in tests.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use mtnlp_core::Task;

/// Requests may share a batch only when their signatures are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub model: String,
    pub language: String,
    /// Canonical order, no duplicates.
    pub tasks: Vec<Task>,
}

impl Signature {
    pub fn new(model: impl Into<String>, language: impl Into<String>, mut tasks: Vec<Task>) -> Self {
        tasks.sort();
        tasks.dedup();
        Signature {
            model: model.into(),
            language: language.into(),
            tasks,
        }
    }

    /// Document-level tasks see a whole request, so such requests are never
    /// merged with others.
    pub fn mergeable(&self) -> bool {
        !self.tasks.iter().any(|t| t.is_document_level())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tasks: Vec<&str> = self.tasks.iter().map(|t| t.as_str()).collect();
        write!(f, "{}/{}[{}]", self.model, self.language, tasks.join(","))
    }
}

/// One accepted request on its way to a batch.
#[derive(Debug)]
pub struct Envelope<P> {
    pub id: u64,
    pub arrival: Duration,
    pub signature: Signature,
    pub sentences: usize,
    pub payload: P,
}

/// A request inside a ticket, with its slice of the assembled batch.
#[derive(Debug)]
pub struct Member<P> {
    pub id: u64,
    pub arrival: Duration,
    pub range: Range<usize>,
    pub payload: P,
}

/// A closed batch, ready for a worker.
#[derive(Debug)]
pub struct Ticket<P> {
    /// Position in closing order, starting at 0.
    pub seq: u64,
    pub signature: Signature,
    pub opened: Duration,
    pub members: Vec<Member<P>>,
}

impl<P> Ticket<P> {
    pub fn sentences(&self) -> usize {
        self.members.last().map_or(0, |m| m.range.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatcherConfig {
    /// How long the first request of a batch waits for company.
    pub window: Duration,
    /// A batch closes as soon as it holds this many sentences.
    pub max_sentences: usize,
    /// When false every request becomes its own ticket immediately.
    pub merge: bool,
}

impl Default for BatcherConfig {
    fn default() -> Self {
        BatcherConfig {
            window: Duration::from_millis(5),
            max_sentences: 128,
            merge: true,
        }
    }
}

impl BatcherConfig {
    pub fn unbatched() -> Self {
        BatcherConfig {
            window: Duration::ZERO,
            max_sentences: 1,
            merge: false,
        }
    }
}

struct Open<P> {
    signature: Signature,
    opened: Duration,
    sentences: usize,
    members: Vec<Member<P>>,
}

pub struct Batcher<P> {
    config: BatcherConfig,
    // ordered by opening time
    open: Vec<Open<P>>,
    ready: VecDeque<Ticket<P>>,
    next_seq: u64,
}

impl<P> Batcher<P> {
    pub fn new(config: BatcherConfig) -> Self {
        Batcher {
            config,
            open: Vec::new(),
            ready: VecDeque::new(),
            next_seq: 0,
        }
    }

    pub fn config(&self) -> BatcherConfig {
        self.config
    }

    /// Adds a request. Requests are expected in arrival order.
    ///
    /// A new batch's window starts at `now`, not at the request's arrival, so
    /// a scheduler that falls behind merges its backlog instead of emitting
    /// it one request at a time.
    pub fn push(&mut self, env: Envelope<P>, now: Duration) {
        self.tick(now);
        if !self.config.merge || !env.signature.mergeable() {
            self.emit(env.signature.clone(), now, vec![member(env, 0)]);
            return;
        }
        let cap = self.config.max_sentences;
        if let Some(i) = self.open.iter().position(|o| o.signature == env.signature) {
            if self.open[i].sentences + env.sentences > cap {
                self.close(i);
            } else {
                let open = &mut self.open[i];
                let start = open.sentences;
                open.sentences += env.sentences;
                open.members.push(member(env, start));
                if open.sentences >= cap {
                    self.close(i);
                }
                return;
            }
        }
        if env.sentences >= cap {
            self.emit(env.signature.clone(), now, vec![member(env, 0)]);
            return;
        }
        self.open.push(Open {
            signature: env.signature.clone(),
            opened: now,
            sentences: env.sentences,
            members: vec![member(env, 0)],
        });
        self.tick(now);
    }

    /// Closes every batch whose window has elapsed, oldest first.
    pub fn tick(&mut self, now: Duration) {
        while let Some(i) = self.open.iter().position(|o| o.opened + self.config.window <= now) {
            self.close(i);
        }
    }

    /// Closes everything still open.
    pub fn flush(&mut self) {
        while !self.open.is_empty() {
            self.close(0);
        }
    }

    /// When the oldest open batch is due.
    pub fn next_deadline(&self) -> Option<Duration> {
        self.open.iter().map(|o| o.opened + self.config.window).min()
    }

    pub fn pop_ready(&mut self) -> Option<Ticket<P>> {
        self.ready.pop_front()
    }

    pub fn has_ready(&self) -> bool {
        !self.ready.is_empty()
    }

    pub fn pending(&self) -> usize {
        self.open.iter().map(|o| o.members.len()).sum::<usize>() + self.ready.iter().map(|t| t.members.len()).sum::<usize>()
    }

    fn close(&mut self, i: usize) {
        let open = self.open.remove(i);
        self.emit(open.signature, open.opened, open.members);
    }

    fn emit(&mut self, signature: Signature, opened: Duration, members: Vec<Member<P>>) {
        self.ready.push_back(Ticket {
            seq: self.next_seq,
            signature,
            opened,
            members,
        });
        self.next_seq += 1;
    }
}

fn member<P>(env: Envelope<P>, start: usize) -> Member<P> {
    Member {
        id: env.id,
        arrival: env.arrival,
        range: start..start + env.sentences,
        payload: env.payload,
    }
}

/// Source of "now" for the scheduler.
pub trait Clock: Send + Sync {
    fn now(&self) -> Duration;
}

/// Time since construction.
pub struct SystemClock(Instant);

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock(Instant::now())
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }
}

/// A clock that only moves when told to.
#[derive(Default)]
pub struct ManualClock(AtomicU64);

impl ManualClock {
    pub fn set(&self, t: Duration) {
        self.0.store(t.as_nanos() as u64, Ordering::SeqCst);
    }

    pub fn advance(&self, by: Duration) {
        self.0.fetch_add(by.as_nanos() as u64, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Duration {
        Duration::from_nanos(self.0.load(Ordering::SeqCst))
    }
}
