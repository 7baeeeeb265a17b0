//! The experiment interface to the black-box component.
//!
//! Everything the engine learns about the component flows through
//! [`ComponentSession::experiment`] and [`ComponentSession::step_experiment`]:
//! reset the component, feed it an input sequence, record what comes back.
//! A prefix-closed cache (a trie over input symbols) makes replays free and
//! doubles as the determinism guard — if the component ever answers a cached
//! prefix differently, checking aborts rather than reporting a verdict that
//! rests on contradictory observations.
//!
//! The session keeps two prefixes:
//! - the *virtual* prefix: the input sequence the engine believes the
//!   component has consumed since the last reset (its search position), and
//! - the *live* prefix: what the physical backend has actually consumed.
//!
//! They diverge whenever an answer came out of the cache. The physical
//! backend is only touched when the cache cannot answer, and then the live
//! session is re-established lazily (reset + replay). A consequence the test
//! suite relies on: with the cache enabled, no complete input sequence is
//! ever transmitted to the backend twice.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use thiserror::Error;

use crate::mealy::MealyMachine;
use crate::symbol::{StateId, Symbol};
use crate::trace::Tracer;

#[derive(Debug, Error)]
pub enum ComponentError {
    /// The component answered a replayed prefix differently than before.
    #[error("determinism violation after inputs [{prefix}]: observed `{observed}` where `{expected}` was recorded earlier")]
    DeterminismViolation {
        prefix: String,
        expected: Symbol,
        observed: Symbol,
    },
    /// The backend broke the protocol, timed out, or died.
    #[error("adapter failure: {0}")]
    AdapterFailure(String),
    /// The engine tried to send a symbol outside the input alphabet.
    #[error("input `{0}` is outside the component's input alphabet")]
    AlphabetViolation(Symbol),
    /// An experiment grew past the derived length bound. This is an engine
    /// invariant, not a user error; seeing it means a search bound is wrong.
    #[error("experiment of length {len} exceeds the derived bound {bound}")]
    LengthBoundExceeded { len: usize, bound: usize },
}

/// How the black box is reached.
pub trait Backend {
    fn reset(&mut self) -> Result<(), ComponentError>;
    fn step(&mut self, input: &Symbol) -> Result<Symbol, ComponentError>;
}

/// In-process backend simulating a component specification.
pub struct MealyBackend {
    machine: MealyMachine,
    current: StateId,
}

impl MealyBackend {
    pub fn new(machine: MealyMachine) -> Self {
        let current = machine.initial.clone();
        MealyBackend { machine, current }
    }
}

impl Backend for MealyBackend {
    fn reset(&mut self) -> Result<(), ComponentError> {
        self.current = self.machine.initial.clone();
        Ok(())
    }

    fn step(&mut self, input: &Symbol) -> Result<Symbol, ComponentError> {
        match self.machine.step(&self.current, input) {
            Some((out, next)) => {
                self.current = next;
                Ok(out)
            }
            None => Err(ComponentError::AdapterFailure(format!(
                "reference machine has no transition for input `{input}`"
            ))),
        }
    }
}

/// A black-box component: its interface alphabets, the bound `m` on how many
/// states it may have, and the way to reach it.
pub struct ComponentHandle {
    pub inputs: BTreeSet<Symbol>,
    pub outputs: BTreeSet<Symbol>,
    /// Upper bound on the number of component states. Everything the engine
    /// concludes is conditional on this bound being honest.
    pub state_bound: usize,
    pub backend: Box<dyn Backend>,
}

impl ComponentHandle {
    /// Wrap a component specification; the bound defaults to its true size.
    pub fn reference(machine: MealyMachine) -> ComponentHandle {
        let bound = machine.states.len();
        Self::reference_with_bound(machine, bound)
    }

    pub fn reference_with_bound(machine: MealyMachine, state_bound: usize) -> ComponentHandle {
        ComponentHandle {
            inputs: machine.inputs.clone(),
            outputs: machine.outputs.clone(),
            state_bound,
            backend: Box::new(MealyBackend::new(machine)),
        }
    }

    pub fn with_backend(
        inputs: BTreeSet<Symbol>,
        outputs: BTreeSet<Symbol>,
        state_bound: usize,
        backend: Box<dyn Backend>,
    ) -> ComponentHandle {
        ComponentHandle {
            inputs,
            outputs,
            state_bound,
            backend,
        }
    }
}

/// One per-reset segment of backend interaction: the complete input sequence
/// transmitted since a reset, with the outputs observed for it.
#[derive(Clone, Debug)]
pub struct LogEntry {
    pub inputs: Vec<Symbol>,
    pub outputs: Vec<Symbol>,
    /// Which reset opened this segment (1-based).
    pub reset_index: usize,
    pub elapsed_ms: u128,
}

/// Append-only audit trail of everything that physically reached the backend.
pub struct ExperimentLog {
    finished: Vec<LogEntry>,
    open: Option<LogEntry>,
    reset_count: usize,
    started: Instant,
}

impl ExperimentLog {
    fn new() -> Self {
        ExperimentLog {
            finished: Vec::new(),
            open: None,
            reset_count: 0,
            started: Instant::now(),
        }
    }

    fn on_reset(&mut self) {
        if let Some(e) = self.open.take() {
            self.finished.push(e);
        }
        self.reset_count += 1;
        self.open = Some(LogEntry {
            inputs: Vec::new(),
            outputs: Vec::new(),
            reset_index: self.reset_count,
            elapsed_ms: self.started.elapsed().as_millis(),
        });
    }

    fn on_io(&mut self, input: &Symbol, output: &Symbol) {
        let e = self
            .open
            .as_mut()
            .expect("physical step without a preceding reset");
        e.inputs.push(input.clone());
        e.outputs.push(output.clone());
    }

    pub fn reset_count(&self) -> usize {
        self.reset_count
    }

    /// Number of physical experiments: per-reset interaction segments.
    pub fn experiment_count(&self) -> usize {
        self.finished.len() + usize::from(self.open.is_some())
    }

    /// All segments, including the one still open.
    pub fn entries(&self) -> Vec<LogEntry> {
        let mut out = self.finished.clone();
        out.extend(self.open.clone());
        out
    }

    pub fn max_experiment_length(&self) -> usize {
        self.entries().iter().map(|e| e.inputs.len()).max().unwrap_or(0)
    }

    /// The complete per-reset input sequences, for the cache-efficacy check.
    pub fn transmitted_sequences(&self) -> Vec<Vec<Symbol>> {
        self.entries().into_iter().map(|e| e.inputs).collect()
    }

    /// Dump as line-delimited records: `{"seq": [...], "out": [...], "resets": k}`.
    pub fn write_records(&self, w: &mut dyn std::io::Write) -> std::io::Result<()> {
        #[derive(serde::Serialize)]
        struct Record<'a> {
            seq: Vec<&'a str>,
            out: Vec<&'a str>,
            resets: usize,
        }
        for e in self.entries() {
            let rec = Record {
                seq: e.inputs.iter().map(|s| s.as_str()).collect(),
                out: e.outputs.iter().map(|s| s.as_str()).collect(),
                resets: e.reset_index,
            };
            writeln!(w, "{}", serde_json::to_string(&rec).expect("log record serializes"))?;
        }
        Ok(())
    }
}

/// Trie over input symbols; each edge carries the output observed for the
/// input that labels it. Prefix consistency holds by construction.
#[derive(Default)]
struct CacheNode {
    children: BTreeMap<Symbol, (Symbol, CacheNode)>,
}

impl CacheNode {
    fn lookup(&self, inputs: &[Symbol]) -> Option<Vec<Symbol>> {
        let mut node = self;
        let mut out = Vec::with_capacity(inputs.len());
        for i in inputs {
            let (o, next) = node.children.get(i)?;
            out.push(o.clone());
            node = next;
        }
        Some(out)
    }
}

/// A live checking session against one component.
pub struct ComponentSession {
    pub handle: ComponentHandle,
    cache_enabled: bool,
    cache: CacheNode,
    log: ExperimentLog,
    virtual_prefix: Vec<Symbol>,
    /// What the backend has consumed since its last reset; `None` before the
    /// first reset.
    live: Option<Vec<Symbol>>,
    length_bound: Option<usize>,
    tracer: Tracer,
}

impl ComponentSession {
    pub fn new(handle: ComponentHandle, cache_enabled: bool) -> Self {
        ComponentSession {
            handle,
            cache_enabled,
            cache: CacheNode::default(),
            log: ExperimentLog::new(),
            virtual_prefix: Vec::new(),
            live: None,
            length_bound: None,
            tracer: Tracer::disabled(),
        }
    }

    pub fn set_tracer(&mut self, tracer: Tracer) {
        self.tracer = tracer;
    }

    /// Cap on the length of any input sequence sent to the backend. The
    /// drivers derive this from the search bounds before testing starts.
    pub fn set_length_bound(&mut self, bound: Option<usize>) {
        self.length_bound = bound;
    }

    pub fn state_bound(&self) -> usize {
        self.handle.state_bound
    }

    pub fn log(&self) -> &ExperimentLog {
        self.log_ref()
    }

    fn log_ref(&self) -> &ExperimentLog {
        &self.log
    }

    /// The input sequence the current (virtual) session has consumed.
    pub fn current_prefix(&self) -> &[Symbol] {
        &self.virtual_prefix
    }

    fn check_alphabet(&self, inputs: &[Symbol]) -> Result<(), ComponentError> {
        for i in inputs {
            if !self.handle.inputs.contains(i) {
                return Err(ComponentError::AlphabetViolation(i.clone()));
            }
        }
        Ok(())
    }

    /// Reset the component and feed it `inputs`, returning the outputs.
    /// Served from the cache when possible; afterwards the session behaves
    /// as if the component had consumed exactly `reset · inputs`.
    pub fn experiment(&mut self, inputs: &[Symbol]) -> Result<Vec<Symbol>, ComponentError> {
        self.check_alphabet(inputs)?;
        if self.cache_enabled {
            if let Some(outs) = self.cache.lookup(inputs) {
                self.virtual_prefix = inputs.to_vec();
                return Ok(outs);
            }
        }
        let outs = self.ensure_physical(inputs)?;
        self.virtual_prefix = inputs.to_vec();
        Ok(outs)
    }

    /// Extend the current session by one input and return the output.
    pub fn step_experiment(&mut self, input: &Symbol) -> Result<Symbol, ComponentError> {
        self.check_alphabet(std::slice::from_ref(input))?;
        let mut target = self.virtual_prefix.clone();
        target.push(input.clone());
        if self.cache_enabled {
            if let Some(outs) = self.cache.lookup(&target) {
                self.virtual_prefix = target;
                return Ok(outs.last().expect("nonempty sequence").clone());
            }
        }
        let outs = self.ensure_physical(&target)?;
        self.virtual_prefix = target;
        Ok(outs.last().expect("nonempty sequence").clone())
    }

    /// Whether `trace` is a run of the component: replay its inputs and
    /// compare outputs, stopping at the first mismatch.
    pub fn is_run(&mut self, trace: &[(Symbol, Symbol)]) -> Result<bool, ComponentError> {
        self.experiment(&[])?;
        for (input, expected) in trace {
            let observed = self.step_experiment(input)?;
            if &observed != expected {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Make the physical backend's state equal `reset · target`, feeding as
    /// little as possible, and return the outputs for all of `target`.
    fn ensure_physical(&mut self, target: &[Symbol]) -> Result<Vec<Symbol>, ComponentError> {
        if let Some(bound) = self.length_bound {
            if target.len() > bound {
                return Err(ComponentError::LengthBoundExceeded {
                    len: target.len(),
                    bound,
                });
            }
        }
        // With the cache we may extend the live session in place; without it
        // there is no record of earlier outputs, so replay from scratch.
        let extendable = self.cache_enabled
            && self
                .live
                .as_ref()
                .is_some_and(|l| l.len() <= target.len() && target[..l.len()] == l[..]);
        let mut outs: Vec<Symbol>;
        let start;
        if extendable {
            let consumed = self.live.as_ref().expect("live session").len();
            outs = self
                .cache
                .lookup(&target[..consumed])
                .expect("physically fed inputs are always cached");
            start = consumed;
        } else {
            self.handle.backend.reset()?;
            self.log.on_reset();
            self.live = Some(Vec::new());
            outs = Vec::new();
            start = 0;
        }
        for input in &target[start..] {
            let output = self.handle.backend.step(input)?;
            if !self.handle.outputs.contains(&output) {
                return Err(ComponentError::AdapterFailure(format!(
                    "component produced `{output}`, which is outside the declared output alphabet"
                )));
            }
            self.log.on_io(input, &output);
            let live = self.live.as_mut().expect("live session");
            live.push(input.clone());
            if self.cache_enabled {
                // Walk to the node for the consumed prefix and record or
                // compare the output observed for this input.
                let mut node = &mut self.cache;
                for sym in &live[..live.len() - 1] {
                    node = &mut node.children.get_mut(sym).expect("cached prefix").1;
                }
                match node.children.get(input) {
                    Some((expected, _)) if expected != &output => {
                        return Err(ComponentError::DeterminismViolation {
                            prefix: join(&live[..live.len() - 1]),
                            expected: expected.clone(),
                            observed: output.clone(),
                        });
                    }
                    Some(_) => {}
                    None => {
                        node.children
                            .insert(input.clone(), (output.clone(), CacheNode::default()));
                    }
                }
            }
            outs.push(output);
        }
        if self.tracer.is_enabled() {
            let live = self.live.as_ref().expect("live session");
            self.tracer.line(format!(
                "experiment {{\"seq\":[{}],\"out\":[{}],\"resets\":{}}}",
                quote_join(live),
                quote_join(&outs),
                self.log.reset_count(),
            ));
        }
        Ok(outs)
    }
}

fn join(symbols: &[Symbol]) -> String {
    symbols
        .iter()
        .map(|s| s.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

fn quote_join(symbols: &[Symbol]) -> String {
    symbols
        .iter()
        .map(|s| format!("\"{s}\""))
        .collect::<Vec<_>>()
        .join(",")
}
