//! Graphviz DOT emitters for communication graphs and witness graphs.
//!
//! Output is deterministic: every collection iterated here is ordered, so
//! the same graph always prints byte-identically. Environment edges are
//! plain arrows; communication edges are bold and labeled `input/output`.
//! Witness-graph nodes carry the child labeling entries consulted at that
//! state, so a rendered graph shows exactly what the residual search has
//! to discharge.

use crate::ctl::{WitnessGraph, WitnessKind};
use crate::liveness::CommunicationGraph;
use crate::symbol::StateId;

fn quoted(name: impl ToString) -> String {
    format!("\"{}\"", name.to_string().replace('\\', "\\\\").replace('"', "\\\""))
}

/// Render a liveness communication graph. The source node is drawn with a
/// thick border, the recurring target as a double circle.
pub fn dot_communication_graph(g: &CommunicationGraph) -> String {
    let mut out = format!("// communication graph: {} -> {}\n", g.source, g.target);
    out += "digraph communication {\n";
    out += "  rankdir=LR;\n";
    out += "  node [shape=circle];\n";
    for n in &g.graph.nodes {
        let mut attrs = String::new();
        if *n == g.target {
            attrs += " shape=doublecircle";
        }
        if *n == g.source {
            attrs += " penwidth=2";
        }
        out += &format!("  {}[{}];\n", quoted(n), attrs.trim_start());
    }
    out += &render_edges(&g.graph.edges);
    out += "}\n";
    out
}

/// Render one witness graph; the header records its id and operator, each
/// node the labeling entries the search consults there.
pub fn dot_witness_graph(wg: &WitnessGraph) -> String {
    let mut out = format!("// witness graph {} ({})\n", wg.id, wg.kind.name());
    out += &format!("digraph wg{} {{\n", wg.id);
    out += "  rankdir=LR;\n";
    out += "  node [shape=box];\n";
    for n in &wg.graph.nodes {
        let mut label = n.to_string();
        for (tag, entry) in labeling_entries(&wg.kind, n) {
            label += &format!("\\n{tag}: {entry}");
        }
        out += &format!("  {} [label={}];\n", quoted(n), quoted(label));
    }
    out += &render_edges(&wg.graph.edges);
    out += "}\n";
    out
}

fn render_edges(
    edges: &std::collections::BTreeSet<(StateId, Option<(crate::symbol::Symbol, crate::symbol::Symbol)>, StateId)>,
) -> String {
    let mut out = String::new();
    for (a, ann, b) in edges {
        match ann {
            None => out += &format!("  {} -> {};\n", quoted(a), quoted(b)),
            Some((i, o)) => {
                out += &format!(
                    "  {} -> {} [label={} style=bold];\n",
                    quoted(a),
                    quoted(b),
                    quoted(format!("{i}/{o}"))
                );
            }
        }
    }
    out
}

fn labeling_entries(kind: &WitnessKind, s: &StateId) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    let mut push = |tag: &'static str, l: &crate::ctl::Labeling| {
        if let Some(e) = l.get(s) {
            out.push((tag, e.to_string()));
        }
    };
    match kind {
        WitnessKind::Ex { child } | WitnessKind::Eg { child } => push("child", child),
        WitnessKind::Eu { left, right } => {
            push("left", left);
            push("right", right);
        }
    }
    out
}

/// File name the exporter uses for a communication graph.
pub fn communication_file_name(g: &CommunicationGraph) -> String {
    format!("comm-{}-{}.dot", g.source, g.target)
}

/// File name the exporter uses for a witness graph.
pub fn witness_file_name(wg: &WitnessGraph) -> String {
    format!("wg-{}-{}.dot", wg.id, wg.kind.name().to_lowercase())
}
