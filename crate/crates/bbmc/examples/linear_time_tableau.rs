//! Decide an existential linear-time property — "some run delivers
//! infinitely often" — by crossing the host with a tableau for `G F s2`
//! and searching the product for a fair, component-approved lasso.
//!
//! Run with: cargo run --example linear_time_tableau

use bbmc::component::{ComponentHandle, ComponentSession};
use bbmc::liveness::BoundMode;
use bbmc::ltl::check_ltl;
use bbmc::parse::{parse_component, parse_system, parse_tableau};
use bbmc::symbol::StateId;
use bbmc::trace::Tracer;

fn main() {
    let sys = parse_system(include_str!("../fixtures/relay.sys")).expect("system parses");
    let tableau = parse_tableau(include_str!("../fixtures/gf-s2.tab")).expect("tableau parses");
    println!(
        "tableau `{}`: {} states, {} fairness sets",
        tableau.name,
        tableau.states.len(),
        tableau.fairness.len()
    );

    for file in ["const-yes.cmp", "const-no.cmp"] {
        let text = match file {
            "const-yes.cmp" => include_str!("../fixtures/const-yes.cmp"),
            _ => include_str!("../fixtures/const-no.cmp"),
        };
        let x = parse_component(text).expect("component parses");
        let mut session = ComponentSession::new(ComponentHandle::reference_with_bound(x, 2), true);
        let outcome = check_ltl(
            &sys,
            &tableau,
            &StateId::new("s0"),
            &mut session,
            BoundMode::Exact,
            Tracer::disabled(),
        )
        .expect("component behaves");

        println!(
            "{file}: verdict {}, {} product queries, {} residual graph(s)",
            outcome.verdict, outcome.queries, outcome.residual_graphs
        );
        if let Some(trace) = outcome.trace {
            let rendered: Vec<String> = trace.iter().map(|(i, o)| format!("{i}/{o}")).collect();
            println!("  fair lasso: {}", rendered.join(" "));
        }
    }
}
