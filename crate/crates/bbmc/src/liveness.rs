//! The static half of liveness checking: can the host reach `s_f` from `s0`
//! infinitely often, for *some* behavior of the black box?
//!
//! Three-step scheme. First, transitive closures over environment-only and
//! full step relations settle the two definite cases — a witness that needs
//! no cooperation from the component, or the absence of any candidate
//! witness — without a single experiment. Only the remaining middle ground
//! produces a communication graph that the test runner must discharge by
//! experimenting. The bounds `n₁`/`n₂` computed here fix the search horizon
//! `m·n` for that testing phase.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::AnnotatedGraph;
use crate::symbol::StateId;
use crate::system::HostSystem;

#[derive(Debug, Error)]
pub enum LivenessError {
    #[error("unknown state `{0}`")]
    UnknownState(StateId),
}

/// Step relations of a host system and their transitive closures.
///
/// A pair `(s, t)` is in a closure iff a *nonempty* chain of steps leads
/// from `s` to `t`; in particular `(s, s)` is present exactly when `s` lies
/// on a cycle.
pub struct ClosureRelations {
    pub env_step: BTreeSet<(StateId, StateId)>,
    pub comm_step: BTreeSet<(StateId, StateId)>,
    pub step: BTreeSet<(StateId, StateId)>,
    pub env_closure: BTreeSet<(StateId, StateId)>,
    pub full_closure: BTreeSet<(StateId, StateId)>,
}

fn transitive_closure(
    base: &BTreeSet<(StateId, StateId)>,
    nodes: &BTreeSet<StateId>,
) -> BTreeSet<(StateId, StateId)> {
    let mut closure = base.clone();
    // Warshall over the (small) state set.
    for k in nodes {
        let into_k: Vec<StateId> = closure
            .iter()
            .filter(|(_, t)| t == k)
            .map(|(s, _)| s.clone())
            .collect();
        let from_k: Vec<StateId> = closure
            .iter()
            .filter(|(s, _)| s == k)
            .map(|(_, t)| t.clone())
            .collect();
        for s in &into_k {
            for t in &from_k {
                closure.insert((s.clone(), t.clone()));
            }
        }
    }
    closure
}

pub fn compute_closures(sys: &HostSystem) -> ClosureRelations {
    let env_step: BTreeSet<_> = sys
        .env
        .iter()
        .map(|(s, _, t)| (s.clone(), t.clone()))
        .collect();
    let comm_step: BTreeSet<_> = sys
        .comm
        .iter()
        .map(|(s, _, _, t)| (s.clone(), t.clone()))
        .collect();
    let step: BTreeSet<_> = env_step.union(&comm_step).cloned().collect();
    let env_closure = transitive_closure(&env_step, &sys.states);
    let full_closure = transitive_closure(&step, &sys.states);
    ClosureRelations {
        env_step,
        comm_step,
        step,
        env_closure,
        full_closure,
    }
}

/// Candidate witnesses for one infinite-often query: the subgraph of the
/// host system on states that lie between `source` and `target`.
#[derive(Clone, Debug)]
pub struct CommunicationGraph {
    pub graph: AnnotatedGraph,
    pub source: StateId,
    pub target: StateId,
}

/// Outcome of the closure analysis.
pub enum IoAnswer {
    Definite(bool),
    Graph(CommunicationGraph),
}

/// Decide the query statically where possible; otherwise build the
/// communication graph for the testing phase.
///
/// When `s0 == sf` only the loop condition applies — "reach `sf` infinitely
/// often from `sf`" is purely a question about cycles.
pub fn check_io(sys: &HostSystem, s0: &StateId, sf: &StateId) -> Result<IoAnswer, LivenessError> {
    for s in [s0, sf] {
        if !sys.states.contains(s) {
            return Err(LivenessError::UnknownState(s.clone()));
        }
    }
    let rel = compute_closures(sys);
    let pair = (s0.clone(), sf.clone());
    let lasso = (sf.clone(), sf.clone());
    let reach_env = s0 == sf || rel.env_closure.contains(&pair);
    let reach_full = s0 == sf || rel.full_closure.contains(&pair);
    if reach_env && rel.env_closure.contains(&lasso) {
        return Ok(IoAnswer::Definite(true));
    }
    if !reach_full || !rel.full_closure.contains(&lasso) {
        return Ok(IoAnswer::Definite(false));
    }
    // Keep exactly the states that can participate in a witness: on a path
    // from s0 to sf, or (equivalently, thanks to the lasso through sf) on a
    // loop through sf.
    let mut nodes: BTreeSet<StateId> = sys
        .states
        .iter()
        .filter(|s| {
            rel.full_closure.contains(&(s0.clone(), (*s).clone()))
                && rel.full_closure.contains(&((*s).clone(), sf.clone()))
        })
        .cloned()
        .collect();
    nodes.insert(s0.clone());
    nodes.insert(sf.clone());
    let graph = AnnotatedGraph::of_system(sys).restricted_to(&nodes);
    Ok(IoAnswer::Graph(CommunicationGraph {
        graph,
        source: s0.clone(),
        target: sf.clone(),
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMode {
    Exact,
    Overapprox,
}

/// Search horizon data: most communications on simple source→target paths
/// (`n1`), on simple loops through the target (`n2`), and their max (`n`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CommBounds {
    pub n1: usize,
    pub n2: usize,
    pub n: usize,
    pub mode: BoundMode,
}

/// Node-count threshold beyond which exact path enumeration gives way to
/// the edge-count overapproximation.
pub const EXACT_BOUND_THRESHOLD: usize = 12;

pub fn comm_bounds(g: &CommunicationGraph, mode: BoundMode) -> CommBounds {
    match mode {
        BoundMode::Exact => {
            let n1 = g
                .graph
                .max_comm_simple_path(&g.source, &g.target)
                .unwrap_or(0);
            let n2 = g.graph.max_comm_simple_loop(&g.target).unwrap_or(0);
            CommBounds {
                n1,
                n2,
                n: n1.max(n2),
                mode,
            }
        }
        BoundMode::Overapprox => {
            // A simple path or loop repeats no edge, so the count of
            // communication edges dominates any exact value.
            let edges = g.graph.comm_edge_count();
            CommBounds {
                n1: edges,
                n2: edges,
                n: edges,
                mode,
            }
        }
    }
}

/// Pick exact bounds for small graphs, the overapproximation otherwise.
pub fn comm_bounds_auto(g: &CommunicationGraph, requested: BoundMode) -> CommBounds {
    match requested {
        BoundMode::Exact if g.graph.nodes.len() <= EXACT_BOUND_THRESHOLD => {
            comm_bounds(g, BoundMode::Exact)
        }
        _ => comm_bounds(g, BoundMode::Overapprox),
    }
}
