//! Annotated directed graphs: the shared substrate for communication graphs
//! and witness graphs.
//!
//! Edges carry an optional `(input, output)` pair — `None` for environment
//! transitions, `Some((α, β))` for communications. Everything here is small
//! (subgraphs of a host system), so the algorithms favor clarity and
//! deterministic iteration order over asymptotics: node and edge sets are
//! ordered, and successor lists come out sorted, which is what makes engine
//! runs reproducible.

use std::collections::{BTreeMap, BTreeSet};

use crate::symbol::{StateId, Symbol};
use crate::system::HostSystem;

/// `None` = environment edge; `Some((input, output))` = communication edge.
pub type Annotation = Option<(Symbol, Symbol)>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnotatedGraph {
    pub nodes: BTreeSet<StateId>,
    pub edges: BTreeSet<(StateId, Annotation, StateId)>,
}

impl AnnotatedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// The whole host system as an annotated graph.
    pub fn of_system(sys: &HostSystem) -> Self {
        let mut g = AnnotatedGraph::new();
        for s in &sys.states {
            g.add_node(s.clone());
        }
        for (from, _, to) in &sys.env {
            g.add_edge(from.clone(), None, to.clone());
        }
        for (from, alpha, beta, to) in &sys.comm {
            g.add_edge(from.clone(), Some((alpha.clone(), beta.clone())), to.clone());
        }
        g
    }

    pub fn add_node(&mut self, n: StateId) {
        self.nodes.insert(n);
    }

    pub fn add_edge(&mut self, from: StateId, ann: Annotation, to: StateId) {
        self.nodes.insert(from.clone());
        self.nodes.insert(to.clone());
        self.edges.insert((from, ann, to));
    }

    /// Outgoing edges of `s`, environment edges first, then communications
    /// in `(input, output, target)` order. The search procedures rely on
    /// this ordering.
    pub fn successors(&self, s: &StateId) -> Vec<(&Annotation, &StateId)> {
        self.edges
            .iter()
            .filter(|(from, _, _)| from == s)
            .map(|(_, ann, to)| (ann, to))
            .collect()
    }

    pub fn env_successors(&self, s: &StateId) -> Vec<&StateId> {
        self.edges
            .iter()
            .filter(|(from, ann, _)| from == s && ann.is_none())
            .map(|(_, _, to)| to)
            .collect()
    }

    pub fn comm_successors(&self, s: &StateId) -> Vec<(&Symbol, &Symbol, &StateId)> {
        self.edges
            .iter()
            .filter_map(|(from, ann, to)| match (from == s, ann) {
                (true, Some((a, b))) => Some((a, b, to)),
                _ => None,
            })
            .collect()
    }

    /// The induced subgraph on `keep`.
    pub fn restricted_to(&self, keep: &BTreeSet<StateId>) -> AnnotatedGraph {
        let mut g = AnnotatedGraph::new();
        for n in keep {
            if self.nodes.contains(n) {
                g.add_node(n.clone());
            }
        }
        for (from, ann, to) in &self.edges {
            if keep.contains(from) && keep.contains(to) {
                g.add_edge(from.clone(), ann.clone(), to.clone());
            }
        }
        g
    }

    pub fn has_internal_edge(&self, members: &BTreeSet<StateId>) -> bool {
        self.edges
            .iter()
            .any(|(from, _, to)| members.contains(from) && members.contains(to))
    }

    /// No communication edge stays inside `members`.
    pub fn is_comm_free_within(&self, members: &BTreeSet<StateId>) -> bool {
        !self.edges.iter().any(|(from, ann, to)| {
            ann.is_some() && members.contains(from) && members.contains(to)
        })
    }

    /// Strongly connected components (Tarjan), each as an ordered set.
    pub fn sccs(&self) -> Vec<BTreeSet<StateId>> {
        struct Walk<'g> {
            graph: &'g AnnotatedGraph,
            index: BTreeMap<StateId, usize>,
            low: BTreeMap<StateId, usize>,
            on_stack: BTreeSet<StateId>,
            stack: Vec<StateId>,
            next: usize,
            out: Vec<BTreeSet<StateId>>,
        }

        impl Walk<'_> {
            fn visit(&mut self, v: &StateId) {
                self.index.insert(v.clone(), self.next);
                self.low.insert(v.clone(), self.next);
                self.next += 1;
                self.stack.push(v.clone());
                self.on_stack.insert(v.clone());
                for (_, w) in self.graph.successors(v) {
                    if !self.index.contains_key(w) {
                        let w = w.clone();
                        self.visit(&w);
                        let lw = self.low[&w];
                        let lv = self.low.get_mut(v).expect("visited");
                        *lv = (*lv).min(lw);
                    } else if self.on_stack.contains(w) {
                        let iw = self.index[w];
                        let lv = self.low.get_mut(v).expect("visited");
                        *lv = (*lv).min(iw);
                    }
                }
                if self.low[v] == self.index[v] {
                    let mut component = BTreeSet::new();
                    loop {
                        let w = self.stack.pop().expect("root still on stack");
                        self.on_stack.remove(&w);
                        let done = w == *v;
                        component.insert(w);
                        if done {
                            break;
                        }
                    }
                    self.out.push(component);
                }
            }
        }

        let mut walk = Walk {
            graph: self,
            index: BTreeMap::new(),
            low: BTreeMap::new(),
            on_stack: BTreeSet::new(),
            stack: Vec::new(),
            next: 0,
            out: Vec::new(),
        };
        for v in &self.nodes {
            if !walk.index.contains_key(v) {
                walk.visit(v);
            }
        }
        walk.out
    }

    /// SCCs that contain at least one edge — a self-loop qualifies, an
    /// isolated state does not. Only these can carry an infinite path.
    pub fn nontrivial_sccs(&self) -> Vec<BTreeSet<StateId>> {
        self.sccs()
            .into_iter()
            .filter(|c| self.has_internal_edge(c))
            .collect()
    }

    pub fn comm_edge_count(&self) -> usize {
        self.edges.iter().filter(|(_, ann, _)| ann.is_some()).count()
    }

    /// Most communications on any simple path from `from` to `to`.
    /// `None` when no such path exists. `from == to` counts the empty path.
    pub fn max_comm_simple_path(&self, from: &StateId, to: &StateId) -> Option<usize> {
        if from == to {
            return Some(0);
        }
        let mut best = None;
        let mut visited = vec![from.clone()];
        self.path_walk(from, to, &mut visited, 0, &mut best);
        best
    }

    /// Most communications on any simple loop through `through` (the node
    /// appears only as the loop's start and end). `None` when no loop exists.
    pub fn max_comm_simple_loop(&self, through: &StateId) -> Option<usize> {
        let mut best = None;
        let mut visited = Vec::new();
        self.path_walk(through, through, &mut visited, 0, &mut best);
        best
    }

    fn path_walk(
        &self,
        at: &StateId,
        to: &StateId,
        visited: &mut Vec<StateId>,
        comms: usize,
        best: &mut Option<usize>,
    ) {
        for (ann, next) in self.successors(at) {
            let cost = comms + usize::from(ann.is_some());
            if next == to {
                // A simple path/loop ends on first arrival at the target.
                *best = Some(best.map_or(cost, |b: usize| b.max(cost)));
            } else if !visited.contains(next) {
                visited.push(next.clone());
                self.path_walk(next, to, visited, cost, best);
                visited.pop();
            }
        }
    }

    /// Most communications on any simple path, over all node pairs.
    pub fn max_comm_any_simple_path(&self) -> usize {
        let mut best = 0;
        for from in &self.nodes {
            for to in &self.nodes {
                if from != to {
                    if let Some(c) = self.max_comm_simple_path(from, to) {
                        best = best.max(c);
                    }
                }
            }
        }
        best
    }

    /// Most communications on any simple cycle.
    pub fn max_comm_any_simple_cycle(&self) -> usize {
        let mut best = 0;
        for v in &self.nodes {
            if let Some(c) = self.max_comm_simple_loop(v) {
                best = best.max(c);
            }
        }
        best
    }
}
