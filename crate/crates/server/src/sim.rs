//! Discrete-event replay of the dispatcher: the same [`Batcher`] and FIFO
//! ticket queue as the server, with simulated time and a latency function
//! standing in for the engine.

use std::time::Duration;

use crate::batcher::{Batcher, BatcherConfig, Clock, Envelope, ManualClock, Signature, Ticket};

#[derive(Clone, Debug)]
pub struct SimRequest {
    pub id: u64,
    pub arrival: Duration,
    pub signature: Signature,
    pub sentences: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimOutcome {
    pub id: u64,
    pub ticket: u64,
    pub worker: usize,
    pub started: Duration,
    pub completed: Duration,
}

/// Runs `requests` (sorted by arrival) through a batcher and `workers`
/// workers. Returns one outcome per request in completion order; ties are
/// broken by ticket then request order.
pub fn simulate(
    requests: &[SimRequest],
    config: BatcherConfig,
    workers: usize,
    latency: impl Fn(&Ticket<()>) -> Duration,
) -> Vec<SimOutcome> {
    let workers = workers.max(1);
    let clock = ManualClock::default();
    let mut batcher: Batcher<()> = Batcher::new(config);
    let mut queue = std::collections::VecDeque::new();
    let mut busy: Vec<Option<Duration>> = vec![None; workers];
    let mut arrivals = requests.iter().peekable();
    let mut out = Vec::with_capacity(requests.len());

    while out.len() < requests.len() {
        // completions free workers first, then arrivals, then batch deadlines
        for slot in busy.iter_mut() {
            if slot.is_some_and(|t| t <= clock.now()) {
                *slot = None;
            }
        }
        while let Some(r) = arrivals.next_if(|r| r.arrival <= clock.now()) {
            let env = Envelope {
                id: r.id,
                arrival: r.arrival,
                signature: r.signature.clone(),
                sentences: r.sentences,
                payload: (),
            };
            batcher.push(env, clock.now());
        }
        batcher.tick(clock.now());
        while let Some(t) = batcher.pop_ready() {
            queue.push_back(t);
        }
        for (worker, slot) in busy.iter_mut().enumerate() {
            if slot.is_some() {
                continue;
            }
            let Some(ticket) = queue.pop_front() else { break };
            let started = clock.now();
            let completed = started + latency(&ticket);
            *slot = Some(completed);
            out.extend(ticket.members.iter().map(|m| SimOutcome {
                id: m.id,
                ticket: ticket.seq,
                worker,
                started,
                completed,
            }));
        }

        let next = [
            arrivals.peek().map(|r| r.arrival),
            batcher.next_deadline(),
            busy.iter().flatten().copied().filter(|_| !queue.is_empty()).min(),
        ]
        .into_iter()
        .flatten()
        .min();
        match next {
            Some(t) if t > clock.now() => clock.set(t),
            Some(_) => {}
            None if out.len() < requests.len() => unreachable!("simulation stalled"),
            None => {}
        }
    }
    out.sort_by_key(|o| (o.completed, o.ticket));
    out
}
