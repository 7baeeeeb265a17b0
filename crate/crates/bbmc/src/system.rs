//! The known part of the model: a finite transition system whose moves are
//! either *environment* transitions (labeled with an event the outside world
//! triggers) or *communication* transitions (labeled with an input/output
//! pair exchanged with the black-box component).
//!
//! Invariants enforced here and by the file parser:
//! - every transition endpoint and every symbol is declared,
//! - at most one transition (of either kind) between any ordered state pair,
//! - the three alphabets (events, inputs, outputs) are pairwise disjoint,
//! - the initial-state set is a nonempty subset of the states,
//! - no atomic proposition used as a label collides with a state name
//!   (state names double as propositions meaning "control is here").

use std::collections::{BTreeMap, BTreeSet};

use crate::symbol::{StateId, Symbol};

/// A communication trace: the projection of a path onto the symbols
/// exchanged with the component, as (input, output) pairs.
pub type CommunicationTrace = Vec<(Symbol, Symbol)>;

/// One step of the host system, as seen from a source state.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Step {
    /// Environment transition; carries the triggering event.
    Env(Symbol),
    /// Communication transition; carries the (input, output) pair.
    Comm(Symbol, Symbol),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HostSystem {
    pub name: String,
    pub states: BTreeSet<StateId>,
    /// Environment events.
    pub events: BTreeSet<Symbol>,
    /// Component inputs the system may send.
    pub inputs: BTreeSet<Symbol>,
    /// Component outputs the system may react to.
    pub outputs: BTreeSet<Symbol>,
    /// Environment transitions (source, event, target).
    pub env: BTreeSet<(StateId, Symbol, StateId)>,
    /// Communication transitions (source, input, output, target).
    pub comm: BTreeSet<(StateId, Symbol, Symbol, StateId)>,
    pub initial: BTreeSet<StateId>,
    /// Atomic propositions attached to states.
    pub labels: BTreeMap<StateId, BTreeSet<String>>,
}

impl HostSystem {
    /// Whether atomic proposition `prop` holds at `s`. A state's own name is
    /// a proposition meaning "the system is in this state".
    pub fn holds(&self, s: &StateId, prop: &str) -> bool {
        if s.as_str() == prop {
            return true;
        }
        self.labels.get(s).is_some_and(|ps| ps.contains(prop))
    }

    /// All proposition names that may appear in formulas over this system:
    /// declared labels plus state names.
    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self
            .labels
            .values()
            .flat_map(|ps| ps.iter().cloned())
            .collect();
        out.extend(self.states.iter().map(|s| s.as_str().to_string()));
        out
    }

    pub fn env_successors<'a>(
        &'a self,
        s: &'a StateId,
    ) -> impl Iterator<Item = (&'a Symbol, &'a StateId)> + 'a {
        self.env
            .iter()
            .filter(move |(src, _, _)| src == s)
            .map(|(_, ev, dst)| (ev, dst))
    }

    pub fn comm_successors<'a>(
        &'a self,
        s: &'a StateId,
    ) -> impl Iterator<Item = (&'a Symbol, &'a Symbol, &'a StateId)> + 'a {
        self.comm
            .iter()
            .filter(move |(src, _, _, _)| src == s)
            .map(|(_, i, o, dst)| (i, o, dst))
    }

    /// All transitions out of `s`, as (step, target).
    pub fn successors(&self, s: &StateId) -> Vec<(Step, StateId)> {
        let mut out: Vec<(Step, StateId)> = self
            .env_successors(s)
            .map(|(ev, dst)| (Step::Env(ev.clone()), dst.clone()))
            .collect();
        out.extend(
            self.comm_successors(s)
                .map(|(i, o, dst)| (Step::Comm(i.clone(), o.clone()), dst.clone())),
        );
        out
    }

    /// All transitions, flattened as (source, step, target).
    pub fn transitions(&self) -> Vec<(StateId, Step, StateId)> {
        let mut out: Vec<(StateId, Step, StateId)> = self
            .env
            .iter()
            .map(|(a, ev, b)| (a.clone(), Step::Env(ev.clone()), b.clone()))
            .collect();
        out.extend(
            self.comm
                .iter()
                .map(|(a, i, o, b)| (a.clone(), Step::Comm(i.clone(), o.clone()), b.clone())),
        );
        out
    }

    /// Whether any transition (of either kind) connects `a` to `b`.
    pub fn has_edge(&self, a: &StateId, b: &StateId) -> bool {
        self.env.iter().any(|(x, _, y)| x == a && y == b)
            || self.comm.iter().any(|(x, _, _, y)| x == a && y == b)
    }

    /// Full structural validation. The file parser reports the same
    /// conditions with line numbers; this is the programmatic entry point
    /// used by the builder and by product constructions in tests.
    pub fn validate(&self) -> Result<(), String> {
        for (a, ev, b) in &self.env {
            if !self.states.contains(a) || !self.states.contains(b) {
                return Err(format!("transition {a} -> {b} uses an undeclared state"));
            }
            if !self.events.contains(ev) {
                return Err(format!("environment transition {a} -> {b} uses undeclared event `{ev}`"));
            }
        }
        for (a, i, o, b) in &self.comm {
            if !self.states.contains(a) || !self.states.contains(b) {
                return Err(format!("transition {a} -> {b} uses an undeclared state"));
            }
            if !self.inputs.contains(i) {
                return Err(format!("communication transition {a} -> {b} uses undeclared input `{i}`"));
            }
            if !self.outputs.contains(o) {
                return Err(format!("communication transition {a} -> {b} uses undeclared output `{o}`"));
            }
        }
        // One transition per ordered state pair, across both kinds.
        let mut seen: BTreeSet<(&StateId, &StateId)> = BTreeSet::new();
        let mut pairs: Vec<(&StateId, &StateId)> = self.env.iter().map(|(a, _, b)| (a, b)).collect();
        pairs.extend(self.comm.iter().map(|(a, _, _, b)| (a, b)));
        for (a, b) in pairs {
            if !seen.insert((a, b)) {
                return Err(format!(
                    "more than one transition between {a} and {b} (only one transition is allowed between any ordered state pair)"
                ));
            }
        }
        if self.initial.is_empty() {
            return Err("no initial state declared".into());
        }
        for s in &self.initial {
            if !self.states.contains(s) {
                return Err(format!("initial state `{s}` is not a declared state"));
            }
        }
        for (kind_a, set_a, kind_b, set_b) in [
            ("event", &self.events, "input", &self.inputs),
            ("event", &self.events, "output", &self.outputs),
            ("input", &self.inputs, "output", &self.outputs),
        ] {
            if let Some(sym) = set_a.intersection(set_b).next() {
                return Err(format!(
                    "symbol `{sym}` is declared both as an {kind_a} and as an {kind_b}; the alphabets must be disjoint"
                ));
            }
        }
        for (s, props) in &self.labels {
            if !self.states.contains(s) {
                return Err(format!("label on undeclared state `{s}`"));
            }
            for p in props {
                if self.states.contains(&StateId::new(p)) {
                    return Err(format!(
                        "proposition `{p}` collides with a state name; state names already act as propositions"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn builder(name: impl Into<String>) -> SystemBuilder {
        SystemBuilder {
            sys: HostSystem {
                name: name.into(),
                ..HostSystem::default()
            },
        }
    }
}

/// Convenience builder used by tests, examples and generated instances.
pub struct SystemBuilder {
    sys: HostSystem,
}

impl SystemBuilder {
    pub fn states(mut self, names: &[&str]) -> Self {
        self.sys.states.extend(names.iter().map(|s| StateId::new(s)));
        self
    }

    pub fn events(mut self, names: &[&str]) -> Self {
        self.sys.events.extend(names.iter().map(|s| Symbol::new(s)));
        self
    }

    pub fn inputs(mut self, names: &[&str]) -> Self {
        self.sys.inputs.extend(names.iter().map(|s| Symbol::new(s)));
        self
    }

    pub fn outputs(mut self, names: &[&str]) -> Self {
        self.sys.outputs.extend(names.iter().map(|s| Symbol::new(s)));
        self
    }

    pub fn env(mut self, from: &str, event: &str, to: &str) -> Self {
        self.sys
            .env
            .insert((StateId::new(from), Symbol::new(event), StateId::new(to)));
        self
    }

    pub fn comm(mut self, from: &str, input: &str, output: &str, to: &str) -> Self {
        self.sys.comm.insert((
            StateId::new(from),
            Symbol::new(input),
            Symbol::new(output),
            StateId::new(to),
        ));
        self
    }

    pub fn initial(mut self, name: &str) -> Self {
        self.sys.initial.insert(StateId::new(name));
        self
    }

    pub fn label(mut self, state: &str, prop: &str) -> Self {
        self.sys
            .labels
            .entry(StateId::new(state))
            .or_default()
            .insert(prop.to_string());
        self
    }

    pub fn build(self) -> Result<HostSystem, String> {
        self.sys.validate()?;
        Ok(self.sys)
    }
}
