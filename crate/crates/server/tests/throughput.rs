use std::sync::Arc;
use std::time::{Duration, Instant};

use mtnlp_server::{serve, CostModel, MockEngine, ServerConfig};
use tokio::sync::Barrier;

pub const COST: CostModel = CostModel {
    fixed: Duration::from_millis(20),
    per_sentence: Duration::from_millis(1),
};

/// Sends `requests` one-sentence requests at once; returns their statuses.
async fn fire(http: &reqwest::Client, url: &str, requests: usize) -> Vec<u16> {
    let barrier = Arc::new(Barrier::new(requests));
    let handles: Vec<_> = (0..requests)
        .map(|i| {
            let (http, url, barrier) = (http.clone(), url.to_string(), barrier.clone());
            tokio::spawn(async move {
                barrier.wait().await;
                let body = serde_json::json!({ "tokens": [[format!("w{}", i)]], "models": ["pos"] });
                http.post(&url).json(&body).send().await.unwrap().status().as_u16()
            })
        })
        .collect();
    let mut out = Vec::new();
    for h in handles {
        out.push(h.await.unwrap());
    }
    out
}

#[derive(Debug)]
pub struct Run {
    pub elapsed: Duration,
    pub batch_sizes: Vec<usize>,
}

impl Run {
    pub fn per_second(&self) -> f64 {
        self.batch_sizes.iter().sum::<usize>() as f64 / self.elapsed.as_secs_f64()
    }
}

/// Times `requests` simultaneous one-sentence requests.
pub async fn timed_run(batching: bool, requests: usize) -> Run {
    let engine = Arc::new(MockEngine::new(COST));
    let config = ServerConfig {
        host: "127.0.0.1".into(),
        port: 0,
        batching,
        ..ServerConfig::default()
    };
    let server = serve(&config, engine.clone()).await.unwrap();
    let url = format!("{}/parse", server.url());
    let http = reqwest::Client::new();
    // one untimed round opens the connections and starts the blocking threads
    let warm = fire(&http, &url, requests).await;
    assert!(warm.iter().all(|&s| s == 200));
    let before = engine.batch_sizes().len();

    let start = Instant::now();
    let statuses = fire(&http, &url, requests).await;
    let elapsed = start.elapsed();
    assert!(statuses.iter().all(|&s| s == 200));
    let sizes = engine.batch_sizes()[before..].to_vec();
    assert_eq!(sizes.iter().sum::<usize>(), requests);
    if !batching {
        assert_eq!(sizes.len(), requests);
    }
    server.shutdown().await.unwrap();
    Run { elapsed, batch_sizes: sizes }
}

/// Batched over unbatched throughput, once per run.
pub async fn speedups(runs: usize) -> Vec<(f64, Run, Run)> {
    let mut out = Vec::new();
    for _ in 0..runs {
        let batched = timed_run(true, 64).await;
        let unbatched = timed_run(false, 64).await;
        out.push((batched.per_second() / unbatched.per_second(), batched, unbatched));
    }
    out
}

#[tokio::test(flavor = "multi_thread", worker_threads = 8)]
async fn batching_at_least_doubles_throughput() {
    for (ratio, batched, unbatched) in speedups(3).await {
        assert!(ratio >= 2.0, "speedup {:.2}: {:?} vs {:?}", ratio, batched, unbatched.elapsed);
    }
}
