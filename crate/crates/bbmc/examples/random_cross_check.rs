//! Pit the experimenting engine against brute-force oracles that are
//! allowed to look inside the composed system, over a stream of random
//! instances. Any disagreement is a bug in one of them.
//!
//! The same harness backs `bbmc oracle-compare`.
//!
//! Run with: cargo run --release --example random_cross_check [seeds]

use bbmc::driver::DriverError;
use bbmc::oracle::{run_differential, DifferentialOptions};

fn main() -> Result<(), DriverError> {
    let seeds: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("seed count is a number"))
        .unwrap_or(100);

    let report = run_differential(&DifferentialOptions {
        seed_start: 0,
        seed_end: seeds,
        ..DifferentialOptions::default()
    })?;

    println!(
        "{} branching-time + {} recurrence checks over {seeds} random instances",
        report.checks, report.liveness_checks
    );
    println!(
        "longest experiment at {:.1}% (branching) / {:.1}% (recurrence) of the hard caps",
        100.0 * report.max_ctl_ratio,
        100.0 * report.max_liveness_ratio
    );
    println!(
        "closure-decided checks that touched the component: {}",
        report.definite_with_experiments
    );

    if report.disagreements.is_empty() {
        println!("no disagreements");
    } else {
        for d in &report.disagreements {
            println!(
                "DISAGREEMENT seed {} `{}` at {}: engine={} oracle={}",
                d.seed, d.formula, d.state, d.engine, d.oracle
            );
        }
    }
    Ok(())
}
