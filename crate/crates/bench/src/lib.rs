//! Synthetic event-log generation shared by the benchmarks.

use procmine::EventLog;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible loan-application-style log: a credit-check loop with
/// occasional document requests, an order-free verify/appraise pair, and an
/// accept/reject choice. Nine activities; trace lengths vary from 6 to 12.
pub fn synthetic_log(traces: usize, seed: u64) -> EventLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sequences = Vec::with_capacity(traces);
    for _ in 0..traces {
        let mut t = vec!["register"];
        for _ in 0..rng.random_range(1..=3) {
            t.push("check credit");
        }
        if rng.random_range(0..10) < 3 {
            t.push("request documents");
            t.push("check credit");
        }
        if rng.random_range(0..2) == 0 {
            t.extend(["verify", "appraise"]);
        } else {
            t.extend(["appraise", "verify"]);
        }
        t.push(if rng.random_range(0..10) < 7 { "accept" } else { "reject" });
        t.push("archive");
        sequences.push(t);
    }
    EventLog::from_activity_sequences(sequences)
}
