//! Decide temporal properties of a finite-state host system that embeds
//! one black-box component: the host's transitions are known, the
//! component is only observable by sending it input sequences (with a
//! reset between experiments) and watching what comes back.
//!
//! A query runs in two phases. A static phase over the host alone builds
//! one witness graph per temporal operator (or one communication graph per
//! recurrence query) and closes everything the component cannot influence;
//! queries settled here cost zero experiments. The residue is discharged
//! dynamically: bounded experiments on the component, planned so that no
//! complete input sequence is ever transmitted twice, decide whether the
//! graphs contain a component-approved witness. All verdicts are relative
//! to a caller-supplied bound on the component's state count.
//!
//! Start with the runnable examples:
//!
//! - `branching_query` — a branching-time formula end to end: witness
//!   graphs, labeling, residual testing.
//! - `liveness_closure` — "can this state recur forever?", decided by the
//!   closures alone or by experiments on a communication graph.
//! - `linear_time_tableau` — an existential linear-time property via the
//!   tableau product and fair-lasso search.
//! - `witness_graphs_to_dot` — render every constructed graph as Graphviz
//!   dot without contacting the component.
//! - `external_process` — the component as a separate process speaking the
//!   line protocol (see [`wire`]).
//! - `experiment_cache` — the prefix trie that keeps traffic down, and
//!   proof the verdict does not depend on it.
//! - `random_cross_check` — the engine against brute-force oracles on
//!   random instances.
//!
//! The same capabilities are exposed as subcommands of the `bbmc` binary;
//! [`driver`] is the layer behind it.

pub mod component;
pub mod ctl;
pub mod dot;
pub mod driver;
pub mod formula;
pub mod graph;
pub mod liveness;
pub mod ltl;
pub mod mealy;
pub mod oracle;
pub mod parse;
pub mod runner;
pub mod symbol;
pub mod system;
pub mod trace;
pub mod wire;
