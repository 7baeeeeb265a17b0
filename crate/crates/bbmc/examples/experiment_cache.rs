//! The session records every answered experiment in a prefix trie, so a
//! complete input sequence is transmitted to the component at most once
//! per reset history — replays and prefix re-walks are served from cache.
//!
//! This runs the same query twice, with and without the cache, and shows
//! that the verdict is unchanged while the traffic drops.
//!
//! Run with: cargo run --example experiment_cache

use std::collections::BTreeSet;

use bbmc::component::{ComponentHandle, ComponentSession};
use bbmc::ctl::analyze;
use bbmc::formula::parse_ctl;
use bbmc::liveness::BoundMode;
use bbmc::parse::{parse_component, parse_system};
use bbmc::runner::check_ctl;
use bbmc::symbol::StateId;
use bbmc::trace::Tracer;

fn main() {
    let sys = parse_system(include_str!("../fixtures/relay-retry.sys")).expect("system parses");
    let x = parse_component(include_str!("../fixtures/toggler.cmp")).expect("component parses");
    let analysis = analyze(&sys, &parse_ctl("AF s2").expect("formula parses"));

    for cache in [true, false] {
        let mut session =
            ComponentSession::new(ComponentHandle::reference(x.clone()), cache);
        let outcome = check_ctl(
            &analysis,
            &mut session,
            &StateId::new("s0"),
            BoundMode::Exact,
            Tracer::disabled(),
        )
        .expect("component behaves");

        let transmitted = session.log().transmitted_sequences();
        let distinct: BTreeSet<&Vec<_>> = transmitted.iter().collect();
        println!(
            "cache {}: verdict {}, {} sequences transmitted, {} distinct",
            if cache { "on " } else { "off" },
            outcome.verdict,
            transmitted.len(),
            distinct.len()
        );
        if cache {
            assert_eq!(
                transmitted.len(),
                distinct.len(),
                "with the cache on, nothing is ever re-sent"
            );
        }
    }
}
