//! The testing phase: discharging communication graphs and witness graphs
//! by experimenting on the component.
//!
//! All procedures share the same skeleton — a depth-first search over a
//! graph where environment edges are free and each communication edge costs
//! one experiment step that the component must answer as annotated. Three
//! disciplines keep the search finite and honest:
//!
//! - **level**: communications since the last milestone; exceeding `m·n`
//!   (component state bound times the graph's communication horizon) proves
//!   the branch redundant — a shorter witness would exist.
//! - **count**: arrivals at the lasso target; `m` arrivals after the first
//!   force the component through a state repetition, so the loop really is
//!   a loop.
//! - **visited**: environment-edge cycle protection, cleared whenever level
//!   or π changes (milestones and communication descents) — within one
//!   phase, re-entering a state reproduces an identical call.
//!
//! The input sequence π is re-established from scratch (`experiment(π)`)
//! before every probe, so nested searches can clobber the live session
//! freely; with the cache on, re-establishment costs no physical traffic.

use std::collections::{BTreeMap, BTreeSet};

use crate::component::{ComponentError, ComponentSession};
use crate::ctl::{CtlAnalysis, IdExpr, Labeling, WitnessKind, WitnessRegistry, TRUE_ID};
use crate::graph::AnnotatedGraph;
use crate::liveness::{BoundMode, CommBounds, CommunicationGraph};
use crate::symbol::{StateId, Symbol};
use crate::system::CommunicationTrace;
use crate::trace::Tracer;

/// Group a state's outgoing communication edges by input symbol, in
/// lexicographic input order: one probe per candidate input, then every
/// edge whose annotation matches the observed output is followed.
fn comm_groups<'g>(
    graph: &'g AnnotatedGraph,
    s: &StateId,
) -> BTreeMap<&'g Symbol, Vec<(&'g Symbol, &'g StateId)>> {
    let mut groups: BTreeMap<&Symbol, Vec<(&Symbol, &StateId)>> = BTreeMap::new();
    for (alpha, beta, to) in graph.comm_successors(s) {
        groups.entry(alpha).or_default().push((beta, to));
    }
    groups
}

// ---------------------------------------------------------------------------
// Liveness: find a lasso from source through target, target visited m times.
// ---------------------------------------------------------------------------

struct LassoSearch<'a> {
    session: &'a mut ComponentSession,
    graph: &'a AnnotatedGraph,
    target: &'a StateId,
    m: usize,
    horizon: usize,
    tracer: Tracer,
}

impl LassoSearch<'_> {
    /// Returns the accepted input sequence of a successful search.
    fn run(
        &mut self,
        pi: &[Symbol],
        s: &StateId,
        level: usize,
        count: usize,
        visited: &mut BTreeSet<StateId>,
    ) -> Result<Option<Vec<Symbol>>, ComponentError> {
        if level > self.m * self.horizon {
            return Ok(None);
        }
        if s == self.target {
            if count >= self.m {
                self.tracer
                    .line(format!("lasso accepted at `{s}` after {} inputs", pi.len()));
                return Ok(Some(pi.to_vec()));
            }
            self.tracer
                .line(format!("milestone `{s}` count={} level reset", count + 1));
            // A milestone opens a new phase: fresh cycle protection for its
            // own subtree. The caller's set must survive — pre-milestone
            // frames still rely on it when the search backtracks here.
            let mut fresh = BTreeSet::new();
            return self.explore(pi, s, 0, count + 1, &mut fresh);
        }
        self.explore(pi, s, level, count, visited)
    }

    fn explore(
        &mut self,
        pi: &[Symbol],
        s: &StateId,
        level: usize,
        count: usize,
        visited: &mut BTreeSet<StateId>,
    ) -> Result<Option<Vec<Symbol>>, ComponentError> {
        for t in self.graph.env_successors(s) {
            // The target is exempt from pruning: arriving there always
            // advances count, so the recursion cannot cycle through it.
            if t != self.target {
                if visited.contains(t) {
                    continue;
                }
                visited.insert(t.clone());
            }
            if let Some(hit) = self.run(pi, t, level, count, visited)? {
                return Ok(Some(hit));
            }
        }
        if level + 1 > self.m * self.horizon {
            // No communication descent can succeed; skip the probes whose
            // answers could not be used.
            return Ok(None);
        }
        for (alpha, edges) in comm_groups(self.graph, s) {
            self.session.experiment(pi)?;
            let beta = self.session.step_experiment(alpha)?;
            let mut extended = pi.to_vec();
            extended.push(alpha.clone());
            for (expected, t) in edges {
                if *expected != beta {
                    continue;
                }
                let mut fresh = BTreeSet::from([t.clone()]);
                if let Some(hit) = self.run(&extended, t, level + 1, count, &mut fresh)? {
                    return Ok(Some(hit));
                }
            }
        }
        Ok(None)
    }
}

/// Search the communication graph for a component-approved lasso. Returns
/// the accepting communication trace, or `None` when every branch is
/// exhausted.
pub fn test_liveness(
    session: &mut ComponentSession,
    g: &CommunicationGraph,
    bounds: &CommBounds,
    tracer: Tracer,
) -> Result<Option<CommunicationTrace>, ComponentError> {
    let m = session.state_bound();
    session.set_length_bound(Some(bounds.n * m * (m + 1)));
    let mut search = LassoSearch {
        session,
        graph: &g.graph,
        target: &g.target,
        m,
        horizon: bounds.n,
        tracer,
    };
    let mut visited = BTreeSet::from([g.source.clone()]);
    match search.run(&[], &g.source, 0, 0, &mut visited)? {
        Some(pi) => {
            // Re-serve the accepted sequence (a cache hit) to pair the
            // inputs with their outputs.
            let outs = session.experiment(&pi)?;
            Ok(Some(pi.into_iter().zip(outs).collect()))
        }
        None => Ok(None),
    }
}

// ---------------------------------------------------------------------------
// CTL: evaluate ID expressions by searching witness graphs.
// ---------------------------------------------------------------------------

pub struct TestContext<'a> {
    session: &'a mut ComponentSession,
    registry: &'a WitnessRegistry,
    horizons: BTreeMap<usize, usize>,
    m: usize,
    tracer: Tracer,
}

impl<'a> TestContext<'a> {
    pub fn new(
        session: &'a mut ComponentSession,
        registry: &'a WitnessRegistry,
        mode: BoundMode,
        tracer: Tracer,
    ) -> Self {
        let horizons = registry
            .graphs()
            .map(|g| (g.id, g.comm_horizon(mode)))
            .collect();
        let m = session.state_bound();
        TestContext {
            session,
            registry,
            horizons,
            m,
            tracer,
        }
    }

    fn restore(&mut self, pi: &[Symbol]) -> Result<(), ComponentError> {
        self.session.experiment(pi)?;
        Ok(())
    }

    /// Evaluate an ID expression at `s`, with π currently accepted.
    pub fn test_wg(
        &mut self,
        pi: &[Symbol],
        s: &StateId,
        expr: &IdExpr,
    ) -> Result<bool, ComponentError> {
        match expr {
            IdExpr::Id(TRUE_ID) => Ok(true),
            IdExpr::Id(i) => {
                let graph = self.registry.get(*i);
                self.tracer
                    .line(format!("test {} graph {} at `{s}`", graph.kind.name(), i));
                let verdict = match &graph.kind {
                    WitnessKind::Ex { child } => self.test_ex(pi, s, &graph.graph, child),
                    WitnessKind::Eu { left, right } => {
                        let mut visited = BTreeSet::from([s.clone()]);
                        self.test_eu(pi, s, *i, &graph.graph, left, right, 0, &mut visited)
                    }
                    WitnessKind::Eg { child } => self.test_eg(pi, s, *i, &graph.graph, child),
                }?;
                self.tracer
                    .line(format!("graph {i} at `{s}` -> {verdict}"));
                Ok(verdict)
            }
            IdExpr::Not(x) => Ok(!self.test_wg(pi, s, x)?),
            IdExpr::Or(x, y) => {
                if self.test_wg(pi, s, x)? {
                    return Ok(true);
                }
                self.restore(pi)?;
                self.test_wg(pi, s, y)
            }
        }
    }

    fn test_ex(
        &mut self,
        pi: &[Symbol],
        s: &StateId,
        graph: &AnnotatedGraph,
        child: &Labeling,
    ) -> Result<bool, ComponentError> {
        for t in graph.env_successors(s) {
            if let Some(e) = child.get(t) {
                if self.test_wg(pi, t, e)? {
                    return Ok(true);
                }
            }
        }
        for (alpha, edges) in comm_groups(graph, s) {
            self.restore(pi)?;
            let beta = self.session.step_experiment(alpha)?;
            let mut extended = pi.to_vec();
            extended.push(alpha.clone());
            for (expected, t) in edges {
                if *expected != beta {
                    continue;
                }
                if let Some(e) = child.get(t) {
                    if self.test_wg(&extended, t, e)? {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    #[allow(clippy::too_many_arguments)]
    fn test_eu(
        &mut self,
        pi: &[Symbol],
        s: &StateId,
        id: usize,
        graph: &AnnotatedGraph,
        left: &Labeling,
        right: &Labeling,
        level: usize,
        visited: &mut BTreeSet<StateId>,
    ) -> Result<bool, ComponentError> {
        let budget = self.m * self.horizons[&id];
        if level > budget {
            return Ok(false);
        }
        if let Some(e) = right.get(s) {
            self.restore(pi)?;
            if self.test_wg(pi, s, e)? {
                return Ok(true);
            }
            // The terminal condition failed here; the state may still be a
            // waypoint, provided the left child holds.
        }
        match left.get(s) {
            None => return Ok(false),
            Some(e) => {
                self.restore(pi)?;
                if !self.test_wg(pi, s, e)? {
                    return Ok(false);
                }
            }
        }
        for t in graph.env_successors(s) {
            if visited.contains(t) {
                continue;
            }
            visited.insert(t.clone());
            if self.test_eu(pi, t, id, graph, left, right, level, visited)? {
                return Ok(true);
            }
        }
        if level + 1 > budget {
            return Ok(false);
        }
        for (alpha, edges) in comm_groups(graph, s) {
            self.restore(pi)?;
            let beta = self.session.step_experiment(alpha)?;
            let mut extended = pi.to_vec();
            extended.push(alpha.clone());
            for (expected, t) in edges {
                if *expected != beta {
                    continue;
                }
                let mut fresh = BTreeSet::from([t.clone()]);
                if self.test_eu(&extended, t, id, graph, left, right, level + 1, &mut fresh)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn test_eg(
        &mut self,
        pi: &[Symbol],
        s: &StateId,
        id: usize,
        graph: &AnnotatedGraph,
        child: &Labeling,
    ) -> Result<bool, ComponentError> {
        let mut anchors: BTreeSet<StateId> = BTreeSet::new();
        for scc in graph.nontrivial_sccs() {
            anchors.extend(scc);
        }
        for sf in &anchors {
            self.restore(pi)?;
            let mut visited = BTreeSet::from([s.clone()]);
            if self.sub_test_eg(pi, s, sf, id, graph, child, 0, 0, &mut visited)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    #[allow(clippy::too_many_arguments)]
    fn sub_test_eg(
        &mut self,
        pi: &[Symbol],
        s: &StateId,
        sf: &StateId,
        id: usize,
        graph: &AnnotatedGraph,
        child: &Labeling,
        level: usize,
        count: usize,
        visited: &mut BTreeSet<StateId>,
    ) -> Result<bool, ComponentError> {
        let budget = self.m * self.horizons[&id];
        if level > budget {
            return Ok(false);
        }
        if s == sf {
            if count >= self.m {
                return Ok(true);
            }
            // A milestone opens a new phase with fresh cycle protection;
            // the caller's set must survive backtracking across it.
            let mut fresh = BTreeSet::new();
            return self.sub_test_eg_body(pi, s, sf, id, graph, child, 0, count + 1, &mut fresh);
        }
        self.sub_test_eg_body(pi, s, sf, id, graph, child, level, count, visited)
    }

    #[allow(clippy::too_many_arguments)]
    fn sub_test_eg_body(
        &mut self,
        pi: &[Symbol],
        s: &StateId,
        sf: &StateId,
        id: usize,
        graph: &AnnotatedGraph,
        child: &Labeling,
        level: usize,
        count: usize,
        visited: &mut BTreeSet<StateId>,
    ) -> Result<bool, ComponentError> {
        let budget = self.m * self.horizons[&id];
        // The child must hold at every state on the lasso — the anchor
        // included.
        match child.get(s) {
            None => return Ok(false),
            Some(e) => {
                self.restore(pi)?;
                if !self.test_wg(pi, s, e)? {
                    return Ok(false);
                }
            }
        }
        for t in graph.env_successors(s) {
            if t != sf {
                if visited.contains(t) {
                    continue;
                }
                visited.insert(t.clone());
            }
            if self.sub_test_eg(pi, t, sf, id, graph, child, level, count, visited)? {
                return Ok(true);
            }
        }
        if level + 1 > budget {
            return Ok(false);
        }
        for (alpha, edges) in comm_groups(graph, s) {
            self.restore(pi)?;
            let beta = self.session.step_experiment(alpha)?;
            let mut extended = pi.to_vec();
            extended.push(alpha.clone());
            for (expected, t) in edges {
                if *expected != beta {
                    continue;
                }
                let mut fresh = BTreeSet::from([t.clone()]);
                if self.sub_test_eg(&extended, t, sf, id, graph, child, level + 1, count, &mut fresh)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

pub struct CtlOutcome {
    pub verdict: bool,
    /// Whether experiments were (potentially) involved, as opposed to the
    /// labeling alone settling the query.
    pub tested: bool,
}

/// Full verdict for an analyzed formula at `s0`: immediate when the
/// labeling already says true/absent, otherwise discharge the residual
/// expression by testing.
pub fn check_ctl(
    analysis: &CtlAnalysis,
    session: &mut ComponentSession,
    s0: &StateId,
    mode: BoundMode,
    tracer: Tracer,
) -> Result<CtlOutcome, ComponentError> {
    match analysis.labeling.get(s0) {
        None => Ok(CtlOutcome {
            verdict: false,
            tested: false,
        }),
        Some(e) if e.is_true() => Ok(CtlOutcome {
            verdict: true,
            tested: false,
        }),
        Some(e) => {
            let k = analysis.registry.len();
            let n_max = analysis.registry.max_horizon(mode);
            let m = session.state_bound();
            session.set_length_bound(Some(k * n_max * m * (m + 1)));
            let mut ctx = TestContext::new(session, &analysis.registry, mode, tracer);
            let verdict = ctx.test_wg(&[], s0, e)?;
            Ok(CtlOutcome {
                verdict,
                tested: true,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::ComponentHandle;
    use crate::ctl::analyze;
    use crate::formula::parse_ctl;
    use crate::liveness::{check_io, comm_bounds, IoAnswer};
    use crate::mealy::MealyMachine;
    use crate::system::HostSystem;

    fn s(name: &str) -> StateId {
        StateId::new(name)
    }

    fn sym(name: &str) -> Symbol {
        Symbol::new(name)
    }

    fn comm_cycle() -> HostSystem {
        HostSystem::builder("sys-b")
            .states(&["a", "b"])
            .inputs(&["send", "ack"])
            .outputs(&["yes", "no"])
            .comm("a", "send", "yes", "b")
            .comm("b", "ack", "yes", "a")
            .initial("a")
            .build()
            .unwrap()
    }

    fn constant(output: &str) -> ComponentHandle {
        ComponentHandle::reference_with_bound(
            MealyMachine::constant(
                &format!("const-{output}"),
                &["send", "ack"],
                &["yes", "no"],
                output,
            ),
            2,
        )
    }

    fn graph_for(sys: &HostSystem, from: &str, to: &str) -> CommunicationGraph {
        match check_io(sys, &s(from), &s(to)).unwrap() {
            IoAnswer::Graph(g) => g,
            IoAnswer::Definite(v) => panic!("expected a graph, got Definite({v})"),
        }
    }

    #[test]
    fn lasso_found_with_a_cooperative_component() {
        let sys = comm_cycle();
        let g = graph_for(&sys, "a", "b");
        let bounds = comm_bounds(&g, BoundMode::Exact);
        let mut session = ComponentSession::new(constant("yes"), true);
        let trace = test_liveness(&mut session, &g, &bounds, Tracer::disabled())
            .unwrap()
            .expect("constant-yes accepts the lasso");
        // One reach step, then m = 2 returns through the loop.
        let inputs: Vec<&str> = trace.iter().map(|(i, _)| i.as_str()).collect();
        assert_eq!(inputs, ["send", "ack", "send", "ack", "send"]);
        assert!(trace.iter().all(|(_, o)| o.as_str() == "yes"));
    }

    #[test]
    fn lasso_refused_by_a_stubborn_component() {
        let sys = comm_cycle();
        let g = graph_for(&sys, "a", "b");
        let bounds = comm_bounds(&g, BoundMode::Exact);
        let mut session = ComponentSession::new(constant("no"), true);
        let trace = test_liveness(&mut session, &g, &bounds, Tracer::disabled()).unwrap();
        assert!(trace.is_none());
        // The only candidate probe was `send` at the source.
        assert_eq!(
            session.log().transmitted_sequences(),
            vec![vec![sym("send")]]
        );
    }

    #[test]
    fn env_witness_needs_no_experiments() {
        // Reaching b takes one communication, but the lasso at b is pure
        // environment — only the reach step should touch the component.
        let sys = HostSystem::builder("envy")
            .states(&["a", "b"])
            .events(&["e"])
            .inputs(&["send", "ack"])
            .outputs(&["yes", "no"])
            .comm("a", "send", "yes", "b")
            .env("b", "e", "b")
            .initial("a")
            .build()
            .unwrap();
        let g = graph_for(&sys, "a", "b");
        let bounds = comm_bounds(&g, BoundMode::Exact);
        let mut session = ComponentSession::new(constant("yes"), true);
        let trace = test_liveness(&mut session, &g, &bounds, Tracer::disabled())
            .unwrap()
            .expect("reach once, then loop on env");
        assert_eq!(trace.len(), 1, "only the reach step communicates");
        assert_eq!(session.log().experiment_count(), 1);
    }

    #[test]
    fn env_cycles_do_not_hang_the_search() {
        // Env 2-cycle a⇄b with the only route to the target behind a
        // communication the component refuses.
        let sys = HostSystem::builder("spin")
            .states(&["a", "b", "c"])
            .events(&["e1", "e2"])
            .inputs(&["send", "ack"])
            .outputs(&["yes", "no"])
            .env("a", "e1", "b")
            .env("b", "e2", "a")
            .comm("a", "send", "yes", "c")
            .comm("c", "ack", "yes", "c")
            .initial("a")
            .build()
            .unwrap();
        let g = graph_for(&sys, "a", "c");
        let bounds = comm_bounds(&g, BoundMode::Exact);
        let mut refusing = ComponentSession::new(constant("no"), true);
        assert!(test_liveness(&mut refusing, &g, &bounds, Tracer::disabled())
            .unwrap()
            .is_none());
        let mut agreeing = ComponentSession::new(constant("yes"), true);
        assert!(test_liveness(&mut agreeing, &g, &bounds, Tracer::disabled())
            .unwrap()
            .is_some());
    }

    fn session_for(sys_formula: (&HostSystem, &str), output: &str) -> (CtlAnalysis, ComponentSession) {
        let (sys, text) = sys_formula;
        let analysis = analyze(sys, &parse_ctl(text).unwrap());
        let session = ComponentSession::new(constant(output), true);
        (analysis, session)
    }

    fn verdict(sys: &HostSystem, text: &str, output: &str, at: &str) -> bool {
        let (analysis, mut session) = session_for((sys, text), output);
        check_ctl(&analysis, &mut session, &s(at), BoundMode::Exact, Tracer::disabled())
            .unwrap()
            .verdict
    }

    #[test]
    fn ex_through_communication_depends_on_the_component() {
        let sys = comm_cycle();
        assert!(verdict(&sys, "EX b", "yes", "a"));
        assert!(!verdict(&sys, "EX b", "no", "a"));
    }

    #[test]
    fn ex_probe_set_is_minimal() {
        let sys = comm_cycle();
        let (analysis, mut session) = session_for((&sys, "EX b"), "no");
        let out =
            check_ctl(&analysis, &mut session, &s("a"), BoundMode::Exact, Tracer::disabled())
                .unwrap();
        assert!(!out.verdict);
        assert!(out.tested);
        assert_eq!(
            session.log().transmitted_sequences(),
            vec![vec![sym("send")]]
        );
    }

    #[test]
    fn unlabeled_state_is_false_without_testing() {
        let sys = comm_cycle();
        let (analysis, mut session) = session_for((&sys, "EX a"), "yes");
        // EX a labels b only; query at... a is unlabeled? a's successor is
        // b, not a. So a carries no label for EX a — wait, b —ack/yes→ a
        // makes b labeled, a unlabeled.
        let out =
            check_ctl(&analysis, &mut session, &s("a"), BoundMode::Exact, Tracer::disabled())
                .unwrap();
        assert!(!out.verdict);
        assert!(!out.tested);
        assert_eq!(session.log().experiment_count(), 0);
    }

    #[test]
    fn disjunction_short_circuits_before_any_probe() {
        let sys = comm_cycle();
        let (analysis, mut session) = session_for((&sys, "EX b"), "no");
        let mut ctx = TestContext::new(
            &mut session,
            &analysis.registry,
            BoundMode::Exact,
            Tracer::disabled(),
        );
        let expr = IdExpr::truth().or(IdExpr::Id(2));
        assert!(ctx.test_wg(&[], &s("a"), &expr).unwrap());
        assert_eq!(session.log().experiment_count(), 0);
    }

    #[test]
    fn negation_inverts_the_graph_verdict() {
        let sys = comm_cycle();
        let (analysis, mut session) = session_for((&sys, "EX b"), "no");
        let mut ctx = TestContext::new(
            &mut session,
            &analysis.registry,
            BoundMode::Exact,
            Tracer::disabled(),
        );
        let expr = IdExpr::Id(2).negate();
        assert!(ctx.test_wg(&[], &s("a"), &expr).unwrap());
    }

    /// System where the until's terminal condition can fail at a state that
    /// also fails the waypoint condition — the search must not continue
    /// through it.
    fn fallthrough_system() -> HostSystem {
        HostSystem::builder("fallthrough")
            .states(&["s0", "sm", "st", "su"])
            .events(&["e"])
            .inputs(&["ping"])
            .outputs(&["ok", "bad"])
            .env("s0", "e", "sm")
            .env("sm", "e", "st")
            .comm("sm", "ping", "ok", "su")
            .env("st", "e", "su")
            .label("su", "w")
            .label("s0", "p")
            .initial("s0")
            .build()
            .unwrap()
    }

    #[test]
    fn eu_failed_terminal_cannot_be_bypassed_without_the_waypoint() {
        let sys = fallthrough_system();
        // E[p U EX w]: sm's terminal check (EX w) needs the component to
        // answer `ok`; p does not hold at sm, so a refusing component must
        // make the whole formula false — the env route sm→st→su is not
        // available because p fails at sm.
        let f = "E[p U EX w]";
        let bad = MealyMachine::constant("grump", &["ping"], &["ok", "bad"], "bad");
        let analysis = analyze(&sys, &parse_ctl(f).unwrap());
        let mut session = ComponentSession::new(ComponentHandle::reference(bad), true);
        let out =
            check_ctl(&analysis, &mut session, &s("s0"), BoundMode::Exact, Tracer::disabled())
                .unwrap();
        assert!(!out.verdict);
        // And a cooperative component flips it.
        let good = MealyMachine::constant("sunny", &["ping"], &["ok", "bad"], "ok");
        let mut session = ComponentSession::new(ComponentHandle::reference(good), true);
        let out =
            check_ctl(&analysis, &mut session, &s("s0"), BoundMode::Exact, Tracer::disabled())
                .unwrap();
        assert!(out.verdict);
    }

    #[test]
    fn eu_conditional_seed_still_reaches_terminals_elsewhere() {
        // s0's terminal condition is conditional (a communication with
        // output o1); the only continuation is another communication (o0)
        // to v, where the terminal holds via an env step. A component that
        // answers o0 everywhere fails the terminal at s0 but satisfies the
        // until through v; one that crosses its answers refuses both.
        let sys = HostSystem::builder("continue")
            .states(&["s0", "v", "w1", "w2"])
            .inputs(&["i0", "i1"])
            .outputs(&["o0", "o1"])
            .comm("s0", "i1", "o1", "w1")
            .comm("s0", "i0", "o0", "v")
            .env("v", "e", "w2")
            .events(&["e"])
            .label("w1", "w")
            .label("w2", "w")
            .initial("s0")
            .build()
            .unwrap();
        let analysis = analyze(&sys, &parse_ctl("E[true U EX w]").unwrap());
        let all_o0 = MealyMachine::constant("o0", &["i0", "i1"], &["o0", "o1"], "o0");
        let mut session = ComponentSession::new(ComponentHandle::reference(all_o0), true);
        let out =
            check_ctl(&analysis, &mut session, &s("s0"), BoundMode::Exact, Tracer::disabled())
                .unwrap();
        assert!(out.verdict, "the continuation through v must be found");

        let mut delta = std::collections::BTreeMap::new();
        delta.insert(
            (s("x0"), sym("i0")),
            (sym("o1"), s("x0")),
        );
        delta.insert(
            (s("x0"), sym("i1")),
            (sym("o0"), s("x0")),
        );
        let crosser = MealyMachine {
            name: "crosser".into(),
            inputs: [sym("i0"), sym("i1")].into(),
            outputs: [sym("o0"), sym("o1")].into(),
            states: [s("x0")].into(),
            initial: s("x0"),
            delta,
        };
        let mut session = ComponentSession::new(ComponentHandle::reference(crosser), true);
        let out =
            check_ctl(&analysis, &mut session, &s("s0"), BoundMode::Exact, Tracer::disabled())
                .unwrap();
        assert!(!out.verdict, "both probes are refused");
    }

    #[test]
    fn eg_lasso_needs_m_returns() {
        let mut sys = comm_cycle();
        sys.labels.insert(s("a"), ["p".to_string()].into());
        sys.labels.insert(s("b"), ["p".to_string()].into());
        assert!(verdict(&sys, "EG p", "yes", "a"));
        assert!(!verdict(&sys, "EG p", "no", "a"));
    }

    #[test]
    fn eg_env_lasso_is_accepted_without_probes() {
        let sys = HostSystem::builder("envloop")
            .states(&["a", "b", "c"])
            .events(&["e1", "e2", "e3"])
            .inputs(&["send", "ack"])
            .outputs(&["yes", "no"])
            .env("a", "e1", "b")
            .env("b", "e2", "c")
            .env("c", "e3", "a")
            .comm("a", "send", "yes", "c")
            .label("a", "p")
            .label("b", "q")
            .label("c", "p")
            .initial("a")
            .build()
            .unwrap();
        // p | q holds everywhere, but the comm edge makes the labeling
        // conditional nowhere — the SCC {a,b} is not comm-free, so the
        // label is an identifier and the runner must discharge it; the env
        // cycle does it without probes succeeding being necessary.
        let (analysis, mut session) = session_for((&sys, "EG (p | q)"), "no");
        let out =
            check_ctl(&analysis, &mut session, &s("a"), BoundMode::Exact, Tracer::disabled())
                .unwrap();
        assert!(out.verdict, "env lasso suffices even when probes fail");
    }

    #[test]
    fn eu_bound_refuses_at_entry() {
        let sys = comm_cycle();
        let (analysis, mut session) = session_for((&sys, "E[a U b]"), "yes");
        let graph = analysis.registry.get(2);
        let (left, right) = match &graph.kind {
            WitnessKind::Eu { left, right } => (left, right),
            other => panic!("expected an EU graph, got {}", other.name()),
        };
        let mut ctx = TestContext::new(
            &mut session,
            &analysis.registry,
            BoundMode::Exact,
            Tracer::disabled(),
        );
        let budget = ctx.m * ctx.horizons[&2];
        let mut visited = BTreeSet::new();
        let hit = ctx
            .test_eu(&[], &s("a"), 2, &graph.graph, left, right, budget + 1, &mut visited)
            .unwrap();
        assert!(!hit);
        assert_eq!(session.log().experiment_count(), 0);
    }

    #[test]
    fn verdicts_agree_with_and_without_cache() {
        let sys = comm_cycle();
        for (formula, output) in [
            ("EX b", "yes"),
            ("EX b", "no"),
            ("E[a U b]", "yes"),
            ("EG (a | b)", "yes"),
            ("EG (a | b)", "no"),
            ("!EX b", "no"),
        ] {
            let analysis = analyze(&sys, &parse_ctl(formula).unwrap());
            let mut with = ComponentSession::new(constant(output), true);
            let mut without = ComponentSession::new(constant(output), false);
            let v1 = check_ctl(&analysis, &mut with, &s("a"), BoundMode::Exact, Tracer::disabled())
                .unwrap()
                .verdict;
            let v2 =
                check_ctl(&analysis, &mut without, &s("a"), BoundMode::Exact, Tracer::disabled())
                    .unwrap()
                    .verdict;
            assert_eq!(v1, v2, "cache changed the verdict of {formula}/{output}");
            // Cache efficacy: nothing is ever retransmitted.
            let sent = with.log().transmitted_sequences();
            let unique: BTreeSet<_> = sent.iter().cloned().collect();
            assert_eq!(sent.len(), unique.len(), "{formula}: duplicate transmission");
        }
    }
}
