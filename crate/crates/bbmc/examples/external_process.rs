//! Check a property against a component that lives in another process,
//! reached over the line protocol (`RESET`/`IN x` in, `OK`/`OUT y` back).
//!
//! The "component" here is a five-line shell script that answers `yes` to
//! everything. Any executable speaking the protocol works the same way —
//! `bbmc serve-component --component file.cmp` is the reference adapter.
//! Because the process is opaque, the caller must vouch for a bound on its
//! state count; every verdict is conditional on that bound being honest.
//!
//! Run with: cargo run --example external_process

use std::time::Duration;

use bbmc::component::{ComponentHandle, ComponentSession};
use bbmc::liveness::{check_io, comm_bounds_auto, BoundMode, IoAnswer};
use bbmc::parse::parse_system;
use bbmc::runner::test_liveness;
use bbmc::symbol::StateId;
use bbmc::trace::Tracer;
use bbmc::wire::ExternalBackend;

const ADAPTER: &str = r#"
while read cmd rest; do
  case "$cmd" in
    RESET) echo OK ;;
    IN)    echo "OUT yes" ;;
    *)     exit 1 ;;
  esac
done
"#;

fn main() {
    let sys = parse_system(include_str!("../fixtures/relay.sys")).expect("system parses");

    let argv: Vec<String> = ["sh", "-c", ADAPTER].map(str::to_string).into();
    let backend =
        ExternalBackend::spawn(&argv, Duration::from_secs(5)).expect("adapter spawns");
    let handle = ComponentHandle::with_backend(
        sys.inputs.clone(),
        sys.outputs.clone(),
        2, // our promise: the process implements at most two states
        Box::new(backend),
    );
    let mut session = ComponentSession::new(handle, true);

    let g = match check_io(&sys, &StateId::new("s0"), &StateId::new("s2")).expect("states exist") {
        IoAnswer::Graph(g) => g,
        IoAnswer::Definite(v) => {
            println!("closure-decided: {v}");
            return;
        }
    };
    let bounds = comm_bounds_auto(&g, BoundMode::Exact);
    let hit = test_liveness(&mut session, &g, &bounds, Tracer::disabled())
        .expect("adapter speaks the protocol");

    match hit {
        Some(trace) => {
            let rendered: Vec<String> = trace.iter().map(|(i, o)| format!("{i}/{o}")).collect();
            println!("accepted lasso over the wire: {}", rendered.join(" "));
        }
        None => println!("no accepted lasso"),
    }
    let log = session.log();
    println!(
        "spoken with the process: {} experiments, {} resets",
        log.experiment_count(),
        log.reset_count()
    );
}
