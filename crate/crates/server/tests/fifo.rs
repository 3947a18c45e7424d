use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use mtnlp_core::Task;
use mtnlp_server::sim::{simulate, SimRequest};
use mtnlp_server::{BatcherConfig, CostModel, MockEngine, ServerConfig, Signature};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn ms(v: u64) -> Duration {
    Duration::from_millis(v)
}

fn classes() -> Vec<Signature> {
    vec![
        Signature::new("M_EN", "en", vec![Task::Pos]),
        Signature::new("M_EN", "en", vec![Task::Pos, Task::Ner]),
        Signature::new("M_EN", "en", vec![Task::Lem]),
        Signature::new("C_EN", "en", vec![Task::Dcr]),
    ]
}

fn workload(rng: &mut StdRng, n: usize) -> Vec<SimRequest> {
    let classes = classes();
    let mut arrivals: Vec<u64> = (0..n).map(|_| rng.random_range(0..300)).collect();
    arrivals.sort();
    arrivals
        .into_iter()
        .enumerate()
        .map(|(id, at)| SimRequest {
            id: id as u64,
            arrival: ms(at),
            signature: classes[rng.random_range(0..classes.len())].clone(),
            sentences: rng.random_range(1..=6),
        })
        .collect()
}

/// Replays random workloads with equal batch latencies and checks that,
/// within every signature class, requests complete in arrival order.
/// Returns how many requests had to wait for a worker.
pub fn fifo_under_simulated_clock(trials: usize, seed: u64) -> usize {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut queued = 0;
    for _ in 0..trials {
        let n = rng.random_range(5..80);
        let requests = workload(&mut rng, n);
        let workers = rng.random_range(1..=4);
        let config = BatcherConfig {
            window: ms(rng.random_range(0..15)),
            max_sentences: rng.random_range(1..20),
            merge: true,
        };
        let latency = ms(rng.random_range(10..60));
        let outcomes = simulate(&requests, config, workers, |_| latency);
        assert_eq!(outcomes.len(), requests.len());

        let mut by_class: BTreeMap<&Signature, Vec<u64>> = BTreeMap::new();
        for o in &outcomes {
            let r = &requests[o.id as usize];
            by_class.entry(&r.signature).or_default().push(o.id);
            assert!(o.started >= r.arrival);
            assert_eq!(o.completed, o.started + latency);
            if o.started > r.arrival + config.window {
                queued += 1;
            }
        }
        for (signature, ids) in by_class {
            let arrivals: Vec<Duration> = ids.iter().map(|&i| requests[i as usize].arrival).collect();
            assert!(
                arrivals.windows(2).all(|w| w[0] <= w[1]),
                "{} completed out of arrival order: {:?}",
                signature,
                ids
            );
        }
    }
    queued
}

#[test]
fn completion_follows_arrival_within_each_class() {
    let queued = fifo_under_simulated_clock(300, 11);
    assert!(queued > 0, "workload never saturated the workers");
}

#[test]
fn close_arrivals_share_a_ticket() {
    let pos = Signature::new("M_EN", "en", vec![Task::Pos]);
    let requests = [
        SimRequest { id: 0, arrival: ms(0), signature: pos.clone(), sentences: 1 },
        SimRequest { id: 1, arrival: ms(1), signature: pos.clone(), sentences: 1 },
        SimRequest { id: 2, arrival: ms(2), signature: Signature::new("M_EN", "en", vec![Task::Lem]), sentences: 1 },
    ];
    let config = BatcherConfig { window: ms(10), max_sentences: 128, merge: true };
    let out = simulate(&requests, config, 2, |_| ms(5));
    let ticket: BTreeMap<u64, u64> = out.iter().map(|o| (o.id, o.ticket)).collect();
    assert_eq!(ticket[&0], ticket[&1]);
    assert_ne!(ticket[&0], ticket[&2]);
    assert_eq!(out[0].started, ms(10));
}

#[test]
fn single_worker_runs_tickets_back_to_back() {
    let pos = Signature::new("M_EN", "en", vec![Task::Pos]);
    let requests: Vec<SimRequest> = (0..5)
        .map(|i| SimRequest { id: i, arrival: ms(0), signature: pos.clone(), sentences: 1 })
        .collect();
    let out = simulate(&requests, BatcherConfig::unbatched(), 1, |_| ms(7));
    let starts: Vec<Duration> = out.iter().map(|o| o.started).collect();
    assert_eq!(starts, (0..5).map(|k| ms(7 * k)).collect::<Vec<_>>());
    assert_eq!(out.iter().map(|o| o.id).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
}

/// The live server with one worker and batching off executes tickets in the
/// order requests arrived.
#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn live_queue_is_fifo() {
    let engine = Arc::new(MockEngine::new(CostModel { fixed: ms(15), per_sentence: ms(0) }));
    let config = ServerConfig {
        host: "127.0.0.1".into(),
        port: 0,
        workers: 1,
        batching: false,
        record_tickets: true,
        ..ServerConfig::default()
    };
    let server = mtnlp_server::serve(&config, engine).await.unwrap();
    let url = format!("{}/parse", server.url());
    let http = reqwest::Client::new();
    let mut handles = Vec::new();
    for i in 0..8 {
        let (http, url) = (http.clone(), url.clone());
        handles.push(tokio::spawn(async move {
            let body = serde_json::json!({ "tokens": [[format!("r{}", i)]] });
            http.post(&url).json(&body).send().await.unwrap().status().as_u16()
        }));
        // let each request reach the queue before the next one is sent
        tokio::time::sleep(ms(3)).await;
    }
    for h in handles {
        assert_eq!(h.await.unwrap(), 200);
    }
    let tickets = server.service().tickets();
    let ids: Vec<u64> = tickets.iter().map(|t| t.members[0].0).collect();
    assert_eq!(ids, (0..8).collect::<Vec<_>>());
    assert!(tickets.windows(2).all(|w| w[0].finished <= w[1].started));
    server.shutdown().await.unwrap();
}
