//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! The checks live next to the tests of the crate they exercise and are
//! pulled in here, so each oracle has a single definition.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

#[path = "../../core/tests/windowing.rs"]
#[allow(dead_code, unused_imports)]
mod windowing;

#[path = "../../core/tests/mst_oracle.rs"]
#[allow(dead_code, unused_imports)]
mod mst_oracle;

#[path = "../../core/tests/edit_scripts.rs"]
#[allow(dead_code, unused_imports)]
mod edit_scripts;

#[path = "../../core/tests/format_round_trips.rs"]
#[allow(dead_code, unused_imports)]
mod format_round_trips;

#[path = "../../core/tests/sampler_properties.rs"]
#[allow(dead_code, unused_imports)]
mod sampler_properties;

#[path = "../../core/tests/pipeline.rs"]
#[allow(dead_code, unused_imports)]
mod pipeline;

#[path = "../../server/tests/concurrency.rs"]
#[allow(dead_code, unused_imports)]
mod concurrency;

#[path = "../../server/tests/fifo.rs"]
#[allow(dead_code, unused_imports)]
mod fifo;

#[path = "../../server/tests/throughput.rs"]
#[allow(dead_code, unused_imports)]
mod throughput;

fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_multi_thread()
        .worker_threads(8)
        .enable_all()
        .build()
        .unwrap()
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else if let Some(s) = payload.downcast_ref::<&str>() {
        s.to_string()
    } else {
        "panicked".to_string()
    }
}

struct Suite {
    failed: usize,
}

impl Suite {
    fn check(&mut self, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Result<String, String>) {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| Err(panic_message(p)));
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {:.1?}, limit {:?}", elapsed, limit)),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS  {:<44} {:>8.2?}  {}", name, elapsed, detail),
            Err(reason) => {
                self.failed += 1;
                let first = reason.lines().next().unwrap_or_default();
                println!("FAIL  {:<44} {:>8.2?}  {}", name, elapsed, first);
            }
        }
    }
}

fn main() -> ExitCode {
    // failures are reported on the criterion line
    panic::set_hook(Box::new(|_| {}));
    let mut suite = Suite { failed: 0 };

    suite.check("sliding-window partition and restore", Some(Duration::from_secs(10)), || {
        windowing::check_all_plans();
        Ok("n in 2..=200 x m in 4..=32, exact".into())
    });

    suite.check("MST equals brute-force maximum", Some(Duration::from_secs(30)), || {
        mst_oracle::brute_force_agreement(1000, 0x5eed);
        Ok("1000 matrices, n <= 5, integer scores".into())
    });

    suite.check("edit-script round trip", None, || {
        let pairs = edit_scripts::lexicon_round_trip();
        Ok(format!("{} / {} lexicon pairs", pairs, pairs))
    });

    suite.check("golden JSON for the reference sentence", None, || {
        pipeline::check_golden();
        Ok("tok/lem/pos/ner/dep byte-for-byte".into())
    });

    suite.check("format round trips", None, || {
        format_round_trips::documents_survive_json(1000)?;
        format_round_trips::trees_survive_bracketing(1000)?;
        format_round_trips::graphs_survive_penman(1000)?;
        Ok("1000 documents, 1000 trees, 1000 Penman graphs".into())
    });

    suite.check("sampler caps and padding", None, || {
        let traded = sampler_properties::compare_with_random_order(1000, 2024);
        sampler_properties::brute_force_agreement(1000, 99);
        sampler_properties::check_reference_configuration();
        Ok(format!(
            "1000 cases incl. (128, 12800); (batches, padded) <= shuffled baseline; \
             {} cases pad more to save a batch, none at (128, 12800)",
            traded
        ))
    });

    suite.check("server under 100 concurrent clients", Some(Duration::from_secs(60)), || {
        let summary = runtime().block_on(concurrency::concurrent_clients(100, 4));
        let waited = fifo::fifo_under_simulated_clock(300, 11);
        Ok(format!(
            "exactly-once, routed, homogeneous; {} tickets ({} merged); FIFO over 300 simulated runs ({} queued)",
            summary.tickets, summary.merged_tickets, waited
        ))
    });

    suite.check("batching throughput", None, || {
        let runs = runtime().block_on(throughput::speedups(3));
        let ratios: Vec<f64> = runs.iter().map(|r| r.0).collect();
        let shown: Vec<String> = ratios.iter().map(|r| format!("{:.2}x", r)).collect();
        if ratios.iter().all(|&r| r >= 2.0) {
            Ok(format!("batched / unbatched req/s: {}", shown.join(", ")))
        } else {
            Err(format!("speedups below 2x: {}", shown.join(", ")))
        }
    });

    suite.check("encoder shared across tasks", None, || {
        let calls = pipeline::check_encoder_sharing();
        Ok(format!("1 task vs 7 tasks: equal calls ({:?})", calls))
    });

    if suite.failed == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", suite.failed);
        ExitCode::FAILURE
    }
}
