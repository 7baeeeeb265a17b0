//! Reference component model: a deterministic, complete Mealy machine.
//!
//! This is what a component *specification* file describes. The engine never
//! looks inside it while checking (it only drives it through the experiment
//! interface), but the oracle composes it with the host system to compute
//! ground truth, and the in-process backend simulates it.

use std::collections::{BTreeMap, BTreeSet};

use crate::symbol::{StateId, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MealyMachine {
    pub name: String,
    pub inputs: BTreeSet<Symbol>,
    pub outputs: BTreeSet<Symbol>,
    pub states: BTreeSet<StateId>,
    pub initial: StateId,
    /// Transition function: (state, input) -> (output, next state).
    pub delta: BTreeMap<(StateId, Symbol), (Symbol, StateId)>,
}

impl MealyMachine {
    /// Deterministic by construction (the map admits one entry per key);
    /// this checks completeness and referential integrity.
    pub fn validate(&self) -> Result<(), String> {
        if !self.states.contains(&self.initial) {
            return Err(format!("initial state `{}` is not declared", self.initial));
        }
        if let Some(sym) = self.inputs.intersection(&self.outputs).next() {
            return Err(format!(
                "symbol `{sym}` is declared both as an input and as an output; the alphabets must be disjoint"
            ));
        }
        for ((s, i), (o, t)) in &self.delta {
            if !self.states.contains(s) || !self.states.contains(t) {
                return Err(format!("transition from `{s}` to `{t}` uses an undeclared state"));
            }
            if !self.inputs.contains(i) {
                return Err(format!("transition from `{s}` uses undeclared input `{i}`"));
            }
            if !self.outputs.contains(o) {
                return Err(format!("transition from `{s}` uses undeclared output `{o}`"));
            }
        }
        for s in &self.states {
            for i in &self.inputs {
                if !self.delta.contains_key(&(s.clone(), i.clone())) {
                    return Err(format!(
                        "incomplete machine: no transition for state `{s}` on input `{i}`"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Run the machine from its initial state over `inputs`, returning the
    /// output sequence. `None` if some input is outside the alphabet.
    pub fn run(&self, inputs: &[Symbol]) -> Option<Vec<Symbol>> {
        let mut state = self.initial.clone();
        let mut out = Vec::with_capacity(inputs.len());
        for i in inputs {
            let (o, next) = self.delta.get(&(state, i.clone()))?;
            out.push(o.clone());
            state = next.clone();
        }
        Some(out)
    }

    /// Single step from an explicit state.
    pub fn step(&self, state: &StateId, input: &Symbol) -> Option<(Symbol, StateId)> {
        self.delta.get(&(state.clone(), input.clone())).cloned()
    }

    /// A machine that answers `output` to every input, never changing state.
    pub fn constant(name: &str, inputs: &[&str], outputs: &[&str], output: &str) -> MealyMachine {
        let x0 = StateId::new("x0");
        let mut delta = BTreeMap::new();
        for i in inputs {
            delta.insert(
                (x0.clone(), Symbol::new(i)),
                (Symbol::new(output), x0.clone()),
            );
        }
        MealyMachine {
            name: name.into(),
            inputs: inputs.iter().map(|s| Symbol::new(s)).collect(),
            outputs: outputs.iter().map(|s| Symbol::new(s)).collect(),
            states: [x0.clone()].into_iter().collect(),
            initial: x0,
            delta,
        }
    }
}
