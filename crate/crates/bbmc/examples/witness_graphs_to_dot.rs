//! Render the graphs a query constructs as Graphviz dot, without running
//! any experiments: one witness graph per temporal operator of a formula,
//! and the communication graph of a recurrence query.
//!
//! Run with: cargo run --example witness_graphs_to_dot

use bbmc::ctl::analyze;
use bbmc::dot::{
    communication_file_name, dot_communication_graph, dot_witness_graph, witness_file_name,
};
use bbmc::formula::parse_ctl;
use bbmc::liveness::{check_io, IoAnswer};
use bbmc::parse::parse_system;
use bbmc::symbol::StateId;

fn main() {
    let sys = parse_system(include_str!("../fixtures/relay-abort.sys")).expect("system parses");

    let formula = parse_ctl("AG ( s2 -> AX A [ ! s2 U s3 ] )").expect("formula parses");
    let analysis = analyze(&sys, &formula);
    for wg in analysis.registry.graphs() {
        println!("// --- {} ---", witness_file_name(wg));
        print!("{}", dot_witness_graph(wg));
    }

    match check_io(&sys, &StateId::new("s0"), &StateId::new("s2")).expect("states exist") {
        IoAnswer::Graph(g) => {
            println!("// --- {} ---", communication_file_name(&g));
            print!("{}", dot_communication_graph(&g));
        }
        IoAnswer::Definite(v) => println!("// closure-decided: {v}, nothing to draw"),
    }
}
