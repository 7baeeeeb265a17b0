//! Path-formula queries through a tableau product.
//!
//! The engine does not compile path formulas itself; it consumes a
//! pre-built tableau — a finite structure whose paths cover every path
//! satisfying the formula, with propositional guards on its states, a
//! satisfaction set for the formula, and fairness sets that an accepting
//! path must revisit forever. `E f` at a host state then reduces to a fair
//! lasso search on the product of the host system and the tableau. Since
//! the product is itself a host system (communications and all), the
//! liveness machinery applies unchanged: closures answer what they can,
//! and only residual graphs reach the black box.
//!
//! Multiple fairness sets are folded into a single recurring target set by
//! the usual round-robin counter: the counter waits at index `i` until the
//! path visits the `i`-th fairness set, so a full wrap certifies all sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::component::{ComponentError, ComponentSession};
use crate::liveness::{check_io, comm_bounds_auto, BoundMode, IoAnswer, LivenessError};
use crate::runner::test_liveness;
use crate::symbol::StateId;
use crate::system::{CommunicationTrace, HostSystem};
use crate::trace::Tracer;

/// Propositional constraint on a tableau state: a conjunction of required
/// and forbidden atomic propositions. The empty conjunction is `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Guard {
    pub requires: BTreeSet<String>,
    pub forbids: BTreeSet<String>,
}

impl Guard {
    pub fn satisfied_by(&self, sys: &HostSystem, s: &StateId) -> bool {
        self.requires.iter().all(|p| sys.holds(s, p))
            && self.forbids.iter().all(|p| !sys.holds(s, p))
    }

    pub fn propositions(&self) -> impl Iterator<Item = &String> {
        self.requires.iter().chain(self.forbids.iter())
    }

    pub fn is_true(&self) -> bool {
        self.requires.is_empty() && self.forbids.is_empty()
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_true() {
            return write!(f, "true");
        }
        let mut parts: Vec<String> = self.requires.iter().cloned().collect();
        parts.extend(self.forbids.iter().map(|p| format!("!{p}")));
        write!(f, "{}", parts.join(" "))
    }
}

/// A tableau for a path formula. States pair with host states whose labels
/// satisfy their guard; `sat` lists the tableau states from which the
/// formula holds; every fairness set must recur on an accepting path.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tableau {
    pub name: String,
    pub states: BTreeSet<StateId>,
    pub initial: BTreeSet<StateId>,
    /// Guards per state; a missing entry means `true`.
    pub guards: BTreeMap<StateId, Guard>,
    /// Human-readable name of the path formula `sat` refers to.
    pub formula: String,
    /// Tableau states satisfying the path formula.
    pub sat: BTreeSet<StateId>,
    pub fairness: Vec<BTreeSet<StateId>>,
    pub edges: BTreeSet<(StateId, StateId)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableauError {
    #[error("tableau references unknown state `{0}`")]
    UnknownState(StateId),
    #[error("guard proposition `{0}` does not occur in the host system")]
    AlphabetMismatch(String),
}

impl Tableau {
    pub fn validate(&self) -> Result<(), TableauError> {
        let known = |q: &StateId| -> Result<(), TableauError> {
            if self.states.contains(q) {
                Ok(())
            } else {
                Err(TableauError::UnknownState(q.clone()))
            }
        };
        for q in self
            .initial
            .iter()
            .chain(self.sat.iter())
            .chain(self.guards.keys())
            .chain(self.fairness.iter().flatten())
        {
            known(q)?;
        }
        for (a, b) in &self.edges {
            known(a)?;
            known(b)?;
        }
        Ok(())
    }

    fn guard_of(&self, q: &StateId) -> &Guard {
        static TRUE_GUARD: Guard = Guard {
            requires: BTreeSet::new(),
            forbids: BTreeSet::new(),
        };
        self.guards.get(q).unwrap_or(&TRUE_GUARD)
    }
}

/// Product of a host system and a tableau. Product states are written
/// `host~tableau`; a transition exists when both halves move and both
/// endpoint pairs respect the guards.
#[derive(Clone, Debug)]
pub struct TableauProduct {
    pub system: HostSystem,
    /// Product state id → (host half, tableau half).
    pub pairs: BTreeMap<StateId, (StateId, StateId)>,
    /// Fairness sets lifted to product states.
    pub fairness: Vec<BTreeSet<StateId>>,
    /// Product states whose tableau half satisfies the path formula.
    pub sat: BTreeSet<StateId>,
}

fn pair_id(s: &StateId, q: &StateId) -> StateId {
    StateId::new(format!("{}~{}", s.as_str(), q.as_str()))
}

/// Build the guarded product. Every transition projects onto a host
/// transition (keeping its environment/communication annotation) and a
/// tableau edge, so the host's one-transition-per-ordered-pair discipline
/// carries over.
pub fn build_product(sys: &HostSystem, t: &Tableau) -> Result<TableauProduct, TableauError> {
    t.validate()?;
    let props = sys.propositions();
    for g in t.guards.values() {
        for p in g.propositions() {
            if !props.contains(p) {
                return Err(TableauError::AlphabetMismatch(p.clone()));
            }
        }
    }
    let mut pairs = BTreeMap::new();
    for s in &sys.states {
        for q in &t.states {
            if t.guard_of(q).satisfied_by(sys, s) {
                pairs.insert(pair_id(s, q), (s.clone(), q.clone()));
            }
        }
    }
    let mut product = HostSystem {
        name: format!("{}*{}", sys.name, t.name),
        states: pairs.keys().cloned().collect(),
        events: sys.events.clone(),
        inputs: sys.inputs.clone(),
        outputs: sys.outputs.clone(),
        ..HostSystem::default()
    };
    for (id, (s, _)) in &pairs {
        if let Some(ls) = sys.labels.get(s) {
            product.labels.insert(id.clone(), ls.clone());
        }
    }
    for (qa, qb) in &t.edges {
        for (a, e, b) in &sys.env {
            let (pa, pb) = (pair_id(a, qa), pair_id(b, qb));
            if pairs.contains_key(&pa) && pairs.contains_key(&pb) {
                product.env.insert((pa, e.clone(), pb));
            }
        }
        for (a, alpha, beta, b) in &sys.comm {
            let (pa, pb) = (pair_id(a, qa), pair_id(b, qb));
            if pairs.contains_key(&pa) && pairs.contains_key(&pb) {
                product.comm.insert((pa, alpha.clone(), beta.clone(), pb));
            }
        }
    }
    for s in &sys.initial {
        for q in &t.initial {
            let p = pair_id(s, q);
            if pairs.contains_key(&p) {
                product.initial.insert(p);
            }
        }
    }
    let lift = |qs: &BTreeSet<StateId>| -> BTreeSet<StateId> {
        pairs
            .iter()
            .filter(|(_, (_, q))| qs.contains(q))
            .map(|(id, _)| id.clone())
            .collect()
    };
    Ok(TableauProduct {
        fairness: t.fairness.iter().map(&lift).collect(),
        sat: lift(&t.sat),
        system: product,
        pairs,
    })
}

/// A product with its fairness folded into one recurring target set.
#[derive(Clone, Debug)]
pub struct DegeneralizedProduct {
    pub system: HostSystem,
    /// A fair path exists from a start state iff some single member of this
    /// set is visited infinitely often from it.
    pub targets: BTreeSet<StateId>,
    counter_sets: usize,
}

impl DegeneralizedProduct {
    /// Where a product state starts in the degeneralized system.
    pub fn start_of(&self, product_state: &StateId) -> StateId {
        if self.counter_sets >= 2 {
            counter_id(product_state, 0)
        } else {
            product_state.clone()
        }
    }
}

fn counter_id(s: &StateId, i: usize) -> StateId {
    StateId::new(format!("{}~c{}", s.as_str(), i))
}

/// Fold "every fairness set recurs" into "some target state recurs".
///
/// No fairness sets: any infinite path is fair, so every state is a target.
/// One set: the set itself is the target set. Otherwise each state gets a
/// round-robin counter; being at index `i` on a state of the `i`-th
/// fairness set advances the counter, so a visit to a first-set state at
/// index 0 recurs exactly when the counter wraps forever, which certifies
/// every set.
pub fn degeneralize(p: &TableauProduct) -> DegeneralizedProduct {
    let j = p.fairness.len();
    if j == 0 {
        return DegeneralizedProduct {
            system: p.system.clone(),
            targets: p.system.states.clone(),
            counter_sets: j,
        };
    }
    if j == 1 {
        return DegeneralizedProduct {
            system: p.system.clone(),
            targets: p.fairness[0].clone(),
            counter_sets: j,
        };
    }
    let mut sys = HostSystem {
        name: format!("{}+counter", p.system.name),
        events: p.system.events.clone(),
        inputs: p.system.inputs.clone(),
        outputs: p.system.outputs.clone(),
        ..HostSystem::default()
    };
    for s in &p.system.states {
        for i in 0..j {
            let id = counter_id(s, i);
            if let Some(ls) = p.system.labels.get(s) {
                sys.labels.insert(id.clone(), ls.clone());
            }
            sys.states.insert(id);
        }
    }
    // The counter successor depends only on the source state, so each host
    // transition forks into exactly one copy per index.
    let advance = |s: &StateId, i: usize| -> usize {
        if p.fairness[i].contains(s) {
            (i + 1) % j
        } else {
            i
        }
    };
    for (a, e, b) in &p.system.env {
        for i in 0..j {
            sys.env
                .insert((counter_id(a, i), e.clone(), counter_id(b, advance(a, i))));
        }
    }
    for (a, alpha, beta, b) in &p.system.comm {
        for i in 0..j {
            sys.comm.insert((
                counter_id(a, i),
                alpha.clone(),
                beta.clone(),
                counter_id(b, advance(a, i)),
            ));
        }
    }
    for s in &p.system.initial {
        sys.initial.insert(counter_id(s, 0));
    }
    let targets = p.fairness[0].iter().map(|s| counter_id(s, 0)).collect();
    DegeneralizedProduct {
        system: sys,
        targets,
        counter_sets: j,
    }
}

#[derive(Debug, Error)]
pub enum LtlError {
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Component(#[from] ComponentError),
    #[error("unknown state `{0}`")]
    UnknownState(StateId),
}

#[derive(Debug)]
pub struct LtlOutcome {
    pub verdict: bool,
    /// Input/output projection of the fair lasso, when the verdict came
    /// from testing rather than from the closures alone.
    pub trace: Option<CommunicationTrace>,
    /// Number of (start, target) liveness queries examined.
    pub queries: usize,
    /// Communication graphs the closures could not settle (the ones that
    /// were, or would have been, handed to the component).
    pub residual_graphs: usize,
}

/// Decide `E f` at host state `s`, where `f` is described by `tableau`:
/// true iff some product pair `(s, q)` with `q` in the tableau's sat set
/// starts a path that revisits every fairness set forever.
///
/// All (start, target) pairs are first attacked through the closures; only
/// if no pair is settled positively that way do the residual graphs go to
/// the component, so a closure-decidable query performs zero experiments.
pub fn check_ltl(
    sys: &HostSystem,
    tableau: &Tableau,
    s: &StateId,
    session: &mut ComponentSession,
    mode: BoundMode,
    tracer: Tracer,
) -> Result<LtlOutcome, LtlError> {
    if !sys.states.contains(s) {
        return Err(LtlError::UnknownState(s.clone()));
    }
    let product = build_product(sys, tableau)?;
    let degen = degeneralize(&product);
    let starts: Vec<StateId> = product
        .sat
        .iter()
        .filter(|pid| product.pairs[*pid].0 == *s)
        .map(|pid| degen.start_of(pid))
        .collect();
    let mut queries = 0;
    let mut residual = Vec::new();
    for start in &starts {
        for target in &degen.targets {
            queries += 1;
            match check_io(&degen.system, start, target) {
                Ok(IoAnswer::Definite(true)) => {
                    return Ok(LtlOutcome {
                        verdict: true,
                        trace: None,
                        queries,
                        residual_graphs: residual.len(),
                    })
                }
                Ok(IoAnswer::Definite(false)) => {}
                Ok(IoAnswer::Graph(g)) => residual.push(g),
                Err(LivenessError::UnknownState(st)) => {
                    unreachable!("degeneralized product lost its own state `{st}`")
                }
            }
        }
    }
    let residual_graphs = residual.len();
    for g in residual {
        let bounds = comm_bounds_auto(&g, mode);
        if let Some(trace) = test_liveness(session, &g, &bounds, tracer.clone())? {
            return Ok(LtlOutcome {
                verdict: true,
                trace: Some(trace),
                queries,
                residual_graphs,
            });
        }
    }
    Ok(LtlOutcome {
        verdict: false,
        trace: None,
        queries,
        residual_graphs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::ComponentHandle;
    use crate::mealy::MealyMachine;
    use crate::oracle::{
        compose, oracle_eventually_always, oracle_infinitely_often, random_instance,
        InstanceLimits,
    };
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(name: &str) -> StateId {
        StateId::new(name)
    }

    fn requires(props: &[&str]) -> Guard {
        Guard {
            requires: props.iter().map(|p| p.to_string()).collect(),
            ..Guard::default()
        }
    }

    fn forbids(props: &[&str]) -> Guard {
        Guard {
            forbids: props.iter().map(|p| p.to_string()).collect(),
            ..Guard::default()
        }
    }

    fn set(names: &[&str]) -> BTreeSet<StateId> {
        names.iter().map(|n| s(n)).collect()
    }

    /// Single always-compatible state, no fairness: accepts every path.
    fn tableau_true() -> Tableau {
        Tableau {
            name: "true".into(),
            states: set(&["q0"]),
            initial: set(&["q0"]),
            formula: "true".into(),
            sat: set(&["q0"]),
            edges: [(s("q0"), s("q0"))].into(),
            ..Tableau::default()
        }
    }

    /// "Infinitely often p": one state per p-valuation, full edge relation,
    /// the p-states form the single fairness set.
    fn tableau_gf(p: &str) -> Tableau {
        let qs = ["qy", "qn"];
        Tableau {
            name: format!("gf-{p}"),
            states: set(&qs),
            initial: set(&qs),
            guards: [(s("qy"), requires(&[p])), (s("qn"), forbids(&[p]))].into(),
            formula: format!("GF {p}"),
            sat: set(&qs),
            fairness: vec![set(&["qy"])],
            edges: qs
                .iter()
                .flat_map(|a| qs.iter().map(move |b| (s(a), s(b))))
                .collect(),
            ..Tableau::default()
        }
    }

    /// "Eventually always p": a wait state that pairs with anything, and a
    /// hold state (guard p) that cannot be left again.
    fn tableau_fg(p: &str) -> Tableau {
        Tableau {
            name: format!("fg-{p}"),
            states: set(&["qw", "qh"]),
            initial: set(&["qw", "qh"]),
            guards: [(s("qh"), requires(&[p]))].into(),
            formula: format!("FG {p}"),
            sat: set(&["qw", "qh"]),
            fairness: vec![set(&["qh"])],
            edges: [
                (s("qw"), s("qw")),
                (s("qw"), s("qh")),
                (s("qh"), s("qh")),
            ]
            .into(),
            ..Tableau::default()
        }
    }

    /// "Infinitely often p and infinitely often q": one state per joint
    /// valuation, full edge relation, two fairness sets.
    fn tableau_gf_both(p: &str, q: &str) -> Tableau {
        let qs = ["q11", "q10", "q01", "q00"];
        let mut guards = BTreeMap::new();
        guards.insert(s("q11"), requires(&[p, q]));
        let mut g10 = requires(&[p]);
        g10.forbids.insert(q.to_string());
        guards.insert(s("q10"), g10);
        let mut g01 = requires(&[q]);
        g01.forbids.insert(p.to_string());
        guards.insert(s("q01"), g01);
        let mut g00 = forbids(&[p]);
        g00.forbids.insert(q.to_string());
        guards.insert(s("q00"), g00);
        Tableau {
            name: format!("gf-{p}-and-{q}"),
            states: set(&qs),
            initial: set(&qs),
            guards,
            formula: format!("GF {p} & GF {q}"),
            sat: set(&qs),
            fairness: vec![set(&["q11", "q10"]), set(&["q11", "q01"])],
            edges: qs
                .iter()
                .flat_map(|a| qs.iter().map(move |b| (s(a), s(b))))
                .collect(),
            ..Tableau::default()
        }
    }

    /// a —send/yes→ b, b —ack/yes→ a; p holds at a.
    fn ping_pong() -> HostSystem {
        HostSystem::builder("ping-pong")
            .states(&["a", "b"])
            .inputs(&["send", "ack"])
            .outputs(&["yes", "no"])
            .comm("a", "send", "yes", "b")
            .comm("b", "ack", "yes", "a")
            .initial("a")
            .label("a", "p")
            .build()
            .unwrap()
    }

    fn const_machine(output: &str) -> MealyMachine {
        MealyMachine::constant("const", &["send", "ack"], &["yes", "no"], output)
    }

    fn session_for(x: MealyMachine) -> ComponentSession {
        ComponentSession::new(ComponentHandle::reference(x), true)
    }

    #[test]
    fn always_compatible_tableau_mirrors_the_host() {
        let sys = ping_pong();
        let product = build_product(&sys, &tableau_true()).unwrap();
        assert_eq!(product.system.states.len(), sys.states.len());
        assert_eq!(product.system.comm.len(), sys.comm.len());
        assert_eq!(product.system.env.len(), sys.env.len());
        assert!(product.system.states.contains(&s("a~q0")));
        assert!(product.fairness.is_empty());
        // No fairness: every product state is already a target.
        let degen = degeneralize(&product);
        assert_eq!(degen.targets, product.system.states);
        assert_eq!(degen.start_of(&s("a~q0")), s("a~q0"));
    }

    #[test]
    fn guards_prune_incompatible_pairs() {
        let sys = ping_pong();
        let product = build_product(&sys, &tableau_gf("p")).unwrap();
        // a carries p so it pairs only with qy; b pairs only with qn.
        assert_eq!(
            product.system.states,
            set(&["a~qy", "b~qn"]),
        );
        assert_eq!(product.system.comm.len(), 2);
        assert_eq!(product.fairness, vec![set(&["a~qy"])]);
    }

    #[test]
    fn guard_over_foreign_proposition_is_rejected() {
        let sys = ping_pong();
        let mut t = tableau_gf("p");
        t.guards.insert(s("qn"), requires(&["zebra"]));
        assert_eq!(
            build_product(&sys, &t).unwrap_err(),
            TableauError::AlphabetMismatch("zebra".into())
        );
    }

    #[test]
    fn edge_to_undeclared_state_is_rejected() {
        let mut t = tableau_true();
        t.edges.insert((s("q0"), s("q9")));
        assert_eq!(t.validate(), Err(TableauError::UnknownState(s("q9"))));
    }

    #[test]
    fn empty_sat_set_is_false_without_experiments() {
        let sys = ping_pong();
        let mut t = tableau_gf("p");
        t.sat.clear();
        let mut session = session_for(const_machine("yes"));
        let out = check_ltl(
            &sys,
            &t,
            &s("a"),
            &mut session,
            BoundMode::Exact,
            Tracer::disabled(),
        )
        .unwrap();
        assert!(!out.verdict);
        assert_eq!(out.queries, 0);
        assert_eq!(session.log().experiment_count(), 0);
    }

    #[test]
    fn environment_loop_settles_fairness_without_experiments() {
        // a →go→ b →back→ a, p at a: the fair loop is component-free.
        let sys = HostSystem::builder("env-loop")
            .states(&["a", "b"])
            .events(&["go", "back"])
            .inputs(&["send"])
            .outputs(&["yes", "no"])
            .env("a", "go", "b")
            .env("b", "back", "a")
            .initial("a")
            .label("a", "p")
            .build()
            .unwrap();
        let mut session = session_for(MealyMachine::constant(
            "mute",
            &["send"],
            &["yes", "no"],
            "no",
        ));
        let out = check_ltl(
            &sys,
            &tableau_gf("p"),
            &s("a"),
            &mut session,
            BoundMode::Exact,
            Tracer::disabled(),
        )
        .unwrap();
        assert!(out.verdict);
        assert!(out.trace.is_none());
        assert_eq!(session.log().experiment_count(), 0);
    }

    #[test]
    fn component_gates_the_fair_loop() {
        let sys = ping_pong();
        let t = tableau_gf("p");
        let mut yes = session_for(const_machine("yes"));
        let out = check_ltl(
            &sys,
            &t,
            &s("a"),
            &mut yes,
            BoundMode::Exact,
            Tracer::disabled(),
        )
        .unwrap();
        assert!(out.verdict);
        let trace = out.trace.expect("verdict came from testing");
        assert!(trace.iter().all(|(_, beta)| beta.as_str() == "yes"));

        let mut no = session_for(const_machine("no"));
        let out = check_ltl(
            &sys,
            &t,
            &s("a"),
            &mut no,
            BoundMode::Exact,
            Tracer::disabled(),
        )
        .unwrap();
        assert!(!out.verdict);
    }

    #[test]
    fn unknown_start_state_is_reported() {
        let sys = ping_pong();
        let mut session = session_for(const_machine("yes"));
        let err = check_ltl(
            &sys,
            &tableau_true(),
            &s("zz"),
            &mut session,
            BoundMode::Exact,
            Tracer::disabled(),
        )
        .unwrap_err();
        assert!(matches!(err, LtlError::UnknownState(st) if st == s("zz")));
    }

    #[test]
    fn counter_weaves_round_robin_indices() {
        // Two-state host, both states plain (no labels), tableau with two
        // fairness sets over the same valuation states.
        let sys = HostSystem::builder("pair")
            .states(&["a", "b"])
            .events(&["go", "back"])
            .env("a", "go", "b")
            .env("b", "back", "a")
            .initial("a")
            .label("a", "p")
            .label("a", "q")
            .build()
            .unwrap();
        let product = build_product(&sys, &tableau_gf_both("p", "q")).unwrap();
        // Legal pairs: a~q11 and b~q00.
        assert_eq!(product.system.states, set(&["a~q11", "b~q00"]));
        let degen = degeneralize(&product);
        // Two counter indices per product state.
        assert_eq!(degen.system.states.len(), 4);
        assert_eq!(degen.start_of(&s("a~q11")), s("a~q11~c0"));
        // Leaving a~q11 at index 0 advances (a~q11 is in the first set);
        // leaving b~q00 never advances.
        assert!(degen
            .system
            .env
            .contains(&(s("a~q11~c0"), crate::symbol::Symbol::new("go"), s("b~q00~c1"))));
        assert!(degen
            .system
            .env
            .contains(&(s("b~q00~c1"), crate::symbol::Symbol::new("back"), s("a~q11~c1"))));
        // a~q11 is in the second set too, so index 1 wraps to 0.
        assert!(degen
            .system
            .env
            .contains(&(s("a~q11~c1"), crate::symbol::Symbol::new("go"), s("b~q00~c0"))));
        assert_eq!(degen.targets, set(&["a~q11~c0"]));
    }

    /// Reference verdict for "from s0 there is a path visiting `ap`-states
    /// infinitely often and `aq`-states infinitely often", by inspecting
    /// the strongly connected components of the composition.
    fn oracle_both_recur(
        sys: &HostSystem,
        x: &MealyMachine,
        s0: &StateId,
        ap: &str,
        aq: &str,
    ) -> bool {
        let composed = compose(sys, x);
        let start = (s0.clone(), x.initial.clone());
        let reach = composed.reachable(&start);
        if !reach.contains(&start) {
            return false;
        }
        composed.nontrivial_sccs_within(&reach).iter().any(|scc| {
            scc.iter().any(|(s, _)| sys.holds(s, ap)) && scc.iter().any(|(s, _)| sys.holds(s, aq))
        })
    }

    /// Pick a proposition that actually occurs in the system: the label if
    /// any state carries it, else a state name (state names are always
    /// propositions).
    fn occurring_prop(sys: &HostSystem, label: &str, fallback_last: bool) -> String {
        if sys.propositions().contains(label) {
            return label.to_string();
        }
        let pick = if fallback_last {
            sys.states.iter().next_back()
        } else {
            sys.states.iter().next()
        };
        pick.unwrap().as_str().to_string()
    }

    #[test]
    fn randomized_agreement_with_component_oracles() {
        let limits = InstanceLimits::default();
        for seed in 300..360 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (sys, x) = random_instance(&mut rng, &limits);
            let s0 = sys.initial.iter().next().unwrap().clone();
            let ap = occurring_prop(&sys, "p", false);
            let aq = occurring_prop(&sys, "q", true);

            let mut session = session_for(x.clone());
            let gf = check_ltl(
                &sys,
                &tableau_gf(&ap),
                &s0,
                &mut session,
                BoundMode::Exact,
                Tracer::disabled(),
            )
            .unwrap();
            let want = oracle_infinitely_often(&sys, &x, &s0, |st| sys.holds(st, &ap));
            assert_eq!(gf.verdict, want, "GF {ap} mismatch on seed {seed}\n{sys:?}");

            let mut session = session_for(x.clone());
            let fg = check_ltl(
                &sys,
                &tableau_fg(&ap),
                &s0,
                &mut session,
                BoundMode::Exact,
                Tracer::disabled(),
            )
            .unwrap();
            let want = oracle_eventually_always(&sys, &x, &s0, |st| sys.holds(st, &ap));
            assert_eq!(fg.verdict, want, "FG {ap} mismatch on seed {seed}\n{sys:?}");

            let mut session = session_for(x.clone());
            let both = check_ltl(
                &sys,
                &tableau_gf_both(&ap, &aq),
                &s0,
                &mut session,
                BoundMode::Exact,
                Tracer::disabled(),
            )
            .unwrap();
            let want = oracle_both_recur(&sys, &x, &s0, &ap, &aq);
            assert_eq!(
                both.verdict, want,
                "GF {ap} & GF {aq} mismatch on seed {seed}\n{sys:?}"
            );
        }
    }

    #[test]
    fn overapproximate_bounds_do_not_change_verdicts() {
        let limits = InstanceLimits::default();
        for seed in 500..520 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (sys, x) = random_instance(&mut rng, &limits);
            let s0 = sys.initial.iter().next().unwrap().clone();
            let mut exact = session_for(x.clone());
            let mut over = session_for(x.clone());
            let t = tableau_gf(&occurring_prop(&sys, "p", false));
            let a = check_ltl(&sys, &t, &s0, &mut exact, BoundMode::Exact, Tracer::disabled())
                .unwrap();
            let b = check_ltl(
                &sys,
                &t,
                &s0,
                &mut over,
                BoundMode::Overapprox,
                Tracer::disabled(),
            )
            .unwrap();
            assert_eq!(a.verdict, b.verdict, "bound-mode mismatch on seed {seed}");
        }
    }
}
