//! Ask whether a state can recur forever, and watch the two ways the
//! answer can arrive: settled outright by the closure relations, or put to
//! the component as a series of experiments.
//!
//! Run with: cargo run --example liveness_closure

use bbmc::component::{ComponentHandle, ComponentSession};
use bbmc::liveness::{check_io, comm_bounds_auto, BoundMode, IoAnswer};
use bbmc::parse::{parse_component, parse_system};
use bbmc::runner::test_liveness;
use bbmc::symbol::StateId;
use bbmc::trace::Tracer;

fn main() {
    let sys = parse_system(include_str!("../fixtures/relay.sys")).expect("system parses");
    let yes = parse_component(include_str!("../fixtures/const-yes.cmp")).expect("component parses");

    // From s2 the relay can never get back to s0, no matter what the
    // component answers: the closures alone decide, and the component is
    // never contacted.
    match check_io(&sys, &StateId::new("s2"), &StateId::new("s0")).expect("states exist") {
        IoAnswer::Definite(v) => println!("s2 revisits s0 infinitely often: {v} (no experiments)"),
        IoAnswer::Graph(_) => unreachable!("this query is closure-decidable"),
    }

    // From s0, visiting s2 forever depends on the component saying `yes`
    // often enough, so the closures hand back a communication graph and
    // the engine searches it experimentally.
    let answer = check_io(&sys, &StateId::new("s0"), &StateId::new("s2")).expect("states exist");
    let g = match answer {
        IoAnswer::Graph(g) => g,
        IoAnswer::Definite(_) => unreachable!("this query needs the component"),
    };
    println!(
        "s0 revisits s2: communication graph with {} nodes, {} edges",
        g.graph.nodes.len(),
        g.graph.edges.len()
    );

    let mut session = ComponentSession::new(ComponentHandle::reference_with_bound(yes, 3), true);
    let bounds = comm_bounds_auto(&g, BoundMode::Exact);
    let hit = test_liveness(&mut session, &g, &bounds, Tracer::disabled()).expect("component behaves");

    match hit {
        Some(trace) => {
            let rendered: Vec<String> = trace.iter().map(|(i, o)| format!("{i}/{o}")).collect();
            println!("accepted lasso: {}", rendered.join(" "));
        }
        None => println!("no accepted lasso"),
    }
    let log = session.log();
    println!(
        "experiments: {} ({} resets, longest input sequence {})",
        log.experiment_count(),
        log.reset_count(),
        log.max_experiment_length()
    );
}
