//! Decide a branching-time formula over a host system whose component is
//! only reachable through experiments.
//!
//! The query here is "on every path, once `s2` is reached there is no way
//! to dodge `s3` forever" — written as the negation of an exists-until.
//! Run with: cargo run --example branching_query

use bbmc::component::{ComponentHandle, ComponentSession};
use bbmc::ctl::analyze;
use bbmc::formula::parse_ctl;
use bbmc::liveness::BoundMode;
use bbmc::parse::{parse_component, parse_system};
use bbmc::runner::check_ctl;
use bbmc::symbol::StateId;
use bbmc::trace::Tracer;

fn main() {
    let sys = parse_system(include_str!("../fixtures/relay-abort.sys")).expect("system parses");
    let x = parse_component(include_str!("../fixtures/const-yes.cmp")).expect("component parses");

    let formula = parse_ctl("! E [ true U ( s2 & EG ! s3 ) ]").expect("formula parses");
    println!("formula: {formula}");

    // Static phase: build one witness graph per temporal operator and a
    // labeling that is exact where the component cannot interfere.
    let analysis = analyze(&sys, &formula);
    println!("witness graphs:");
    for wg in analysis.registry.graphs() {
        println!(
            "  id {} ({}), {} nodes, {} edges",
            wg.id,
            wg.kind.name(),
            wg.graph.nodes.len(),
            wg.graph.edges.len()
        );
    }
    for s in &sys.states {
        match analysis.labeling.get(s) {
            Some(e) => println!("  label {s}: {e}"),
            None => println!("  label {s}: (none)"),
        }
    }

    // Dynamic phase: discharge whatever the labeling left conditional by
    // experimenting on the component.
    let mut session = ComponentSession::new(ComponentHandle::reference(x), true);
    let outcome = check_ctl(
        &analysis,
        &mut session,
        &StateId::new("s0"),
        BoundMode::Exact,
        Tracer::disabled(),
    )
    .expect("component behaves");

    println!(
        "verdict at s0: {} ({})",
        outcome.verdict,
        if outcome.tested { "settled by testing" } else { "settled by the labeling" }
    );
    let log = session.log();
    println!(
        "experiments: {} ({} resets, longest input sequence {})",
        log.experiment_count(),
        log.reset_count(),
        log.max_experiment_length()
    );
}
