//! Line-oriented file formats for host systems, reference components, and
//! tableaux, plus matching printers. This module owns the grammars.
//!
//! All three formats share the same conventions: one directive per line,
//! whitespace-separated tokens, `#` starts a comment that runs to the end
//! of the line, blank lines are ignored, and an unknown directive is a hard
//! error (a typo in a fixture should fail loudly, not parse as an empty
//! model). Names must be declared before they are used, so declaration
//! directives come first.
//!
//! Host system:
//!
//! ```text
//! system <name>
//! states s0 s1 ...
//! events msg ...            # environment events, if any
//! inputs send ack ...       # symbols sent to the component
//! outputs yes no ...        # symbols the component may answer
//! init s0 ...
//! label s0 p q ...          # atomic propositions at a state
//! env  <from> <event> <to>
//! comm <from> <input> <output> <to>
//! ```
//!
//! Reference component (a complete deterministic Mealy machine):
//!
//! ```text
//! component <name>
//! inputs send ack ...
//! outputs yes no ...
//! states x0 x1 ...
//! init x0
//! delta <state> <input> <output> <state>
//! ```
//!
//! Tableau for a path formula:
//!
//! ```text
//! tableau <name>
//! tstates q0 q1 ...
//! tinit q0 ...
//! guard q0 p !q             # conjunction of literals; `true` for no constraint
//! sat <formula>: q0 q1      # tableau states satisfying the formula
//! fair: q0 q2               # repeatable; each set must recur
//! tedge q0 q1
//! ```
//!
//! The `sat` tag (everything up to the colon) is a free-form name for the
//! path formula and is carried through for reports. Guards that amount to
//! `true` are not stored, so printing normalizes them away.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ltl::{Guard, Tableau};
use crate::mealy::MealyMachine;
use crate::symbol::{StateId, Symbol};
use crate::system::HostSystem;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LoadError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    /// A whole-file condition with no single offending line (for example a
    /// missing directive, or a completeness hole in a component).
    #[error("{0}")]
    Model(String),
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, LoadError> {
    Err(LoadError::Line {
        line,
        message: message.into(),
    })
}

/// Strip comments and blanks; yield `(1-based line number, tokens)`.
fn directive_lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(idx, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if tokens.is_empty() {
                None
            } else {
                Some((idx + 1, tokens))
            }
        })
        .collect()
}

fn expect_header<'a>(
    lines: &'a [(usize, Vec<&'a str>)],
    keyword: &str,
) -> Result<(usize, &'a str), LoadError> {
    match lines.first() {
        Some((no, toks)) if toks[0] == keyword && toks.len() == 2 => Ok((*no, toks[1])),
        Some((no, toks)) => fail(
            *no,
            format!("expected `{keyword} <name>` as the first directive, found `{}`", toks[0]),
        ),
        None => Err(LoadError::Model(format!(
            "empty file: expected a `{keyword} <name>` header"
        ))),
    }
}

pub fn parse_system(text: &str) -> Result<HostSystem, LoadError> {
    let lines = directive_lines(text);
    let (_, name) = expect_header(&lines, "system")?;
    let mut sys = HostSystem {
        name: name.to_string(),
        ..HostSystem::default()
    };
    let mut taken_pairs: BTreeSet<(StateId, StateId)> = BTreeSet::new();
    for (no, toks) in lines.iter().skip(1) {
        let no = *no;
        let args = &toks[1..];
        match toks[0] {
            "system" => return fail(no, "duplicate `system` header"),
            "states" => sys.states.extend(args.iter().map(StateId::new)),
            kw @ ("events" | "inputs" | "outputs") => {
                for a in args {
                    let sym = Symbol::new(a);
                    let clash = [
                        ("event", sys.events.contains(&sym)),
                        ("input", sys.inputs.contains(&sym)),
                        ("output", sys.outputs.contains(&sym)),
                    ]
                    .into_iter()
                    .find(|(kind, hit)| *hit && !kw.starts_with(kind));
                    if let Some((kind, _)) = clash {
                        return fail(
                            no,
                            format!("symbol `{a}` is already declared as an {kind}; the alphabets must be disjoint"),
                        );
                    }
                    match kw {
                        "events" => sys.events.insert(sym),
                        "inputs" => sys.inputs.insert(sym),
                        _ => sys.outputs.insert(sym),
                    };
                }
            }
            "init" => {
                for a in args {
                    let st = declared_state(&sys.states, a, no)?;
                    sys.initial.insert(st);
                }
            }
            "label" => {
                let [state, props @ ..] = args else {
                    return fail(no, "label needs `label <state> <prop> ...`");
                };
                if props.is_empty() {
                    return fail(no, "label needs `label <state> <prop> ...`");
                }
                let st = declared_state(&sys.states, state, no)?;
                for p in props {
                    if sys.states.contains(&StateId::new(p)) {
                        return fail(
                            no,
                            format!("proposition `{p}` collides with a state name; state names already act as propositions"),
                        );
                    }
                    sys.labels.entry(st.clone()).or_default().insert(p.to_string());
                }
            }
            "env" => {
                let [a, ev, b] = args else {
                    return fail(no, "env needs `env <from> <event> <to>`");
                };
                let from = declared_state(&sys.states, a, no)?;
                let to = declared_state(&sys.states, b, no)?;
                if !sys.events.contains(&Symbol::new(ev)) {
                    return fail(no, format!("`{ev}` is not a declared event"));
                }
                claim_pair(&mut taken_pairs, &from, &to, no)?;
                sys.env.insert((from, Symbol::new(ev), to));
            }
            "comm" => {
                let [a, i, o, b] = args else {
                    return fail(no, "comm needs `comm <from> <input> <output> <to>`");
                };
                let from = declared_state(&sys.states, a, no)?;
                let to = declared_state(&sys.states, b, no)?;
                if !sys.inputs.contains(&Symbol::new(i)) {
                    return fail(no, format!("`{i}` is not a declared input"));
                }
                if !sys.outputs.contains(&Symbol::new(o)) {
                    return fail(no, format!("`{o}` is not a declared output"));
                }
                claim_pair(&mut taken_pairs, &from, &to, no)?;
                sys.comm.insert((from, Symbol::new(i), Symbol::new(o), to));
            }
            other => return fail(no, format!("unknown directive `{other}`")),
        }
    }
    sys.validate().map_err(LoadError::Model)?;
    Ok(sys)
}

fn declared_state(states: &BTreeSet<StateId>, name: &str, line: usize) -> Result<StateId, LoadError> {
    let st = StateId::new(name);
    if states.contains(&st) {
        Ok(st)
    } else {
        fail(line, format!("`{name}` is not a declared state"))
    }
}

fn claim_pair(
    taken: &mut BTreeSet<(StateId, StateId)>,
    from: &StateId,
    to: &StateId,
    line: usize,
) -> Result<(), LoadError> {
    if taken.insert((from.clone(), to.clone())) {
        Ok(())
    } else {
        fail(
            line,
            format!("more than one transition between {from} and {to} (only one transition is allowed between any ordered state pair)"),
        )
    }
}

pub fn parse_component(text: &str) -> Result<MealyMachine, LoadError> {
    let lines = directive_lines(text);
    let (_, name) = expect_header(&lines, "component")?;
    let mut x = MealyMachine {
        name: name.to_string(),
        inputs: BTreeSet::new(),
        outputs: BTreeSet::new(),
        states: BTreeSet::new(),
        initial: StateId::new(""),
        delta: Default::default(),
    };
    let mut init: Option<StateId> = None;
    for (no, toks) in lines.iter().skip(1) {
        let no = *no;
        let args = &toks[1..];
        match toks[0] {
            "component" => return fail(no, "duplicate `component` header"),
            "inputs" => {
                for a in args {
                    let sym = Symbol::new(a);
                    if x.outputs.contains(&sym) {
                        return fail(no, format!("symbol `{a}` is already declared as an output; the alphabets must be disjoint"));
                    }
                    x.inputs.insert(sym);
                }
            }
            "outputs" => {
                for a in args {
                    let sym = Symbol::new(a);
                    if x.inputs.contains(&sym) {
                        return fail(no, format!("symbol `{a}` is already declared as an input; the alphabets must be disjoint"));
                    }
                    x.outputs.insert(sym);
                }
            }
            "states" => x.states.extend(args.iter().map(StateId::new)),
            "init" => {
                let [a] = args else {
                    return fail(no, "init needs exactly one state");
                };
                if init.is_some() {
                    return fail(no, "duplicate `init` line");
                }
                init = Some(declared_state(&x.states, a, no)?);
            }
            "delta" => {
                let [s, i, o, t] = args else {
                    return fail(no, "delta needs `delta <state> <input> <output> <state>`");
                };
                let from = declared_state(&x.states, s, no)?;
                let to = declared_state(&x.states, t, no)?;
                if !x.inputs.contains(&Symbol::new(i)) {
                    return fail(no, format!("`{i}` is not a declared input"));
                }
                if !x.outputs.contains(&Symbol::new(o)) {
                    return fail(no, format!("`{o}` is not a declared output"));
                }
                let key = (from, Symbol::new(i));
                if x.delta.contains_key(&key) {
                    return fail(
                        no,
                        format!("a transition for state `{s}` on input `{i}` was already given; the machine must be deterministic"),
                    );
                }
                x.delta.insert(key, (Symbol::new(o), to));
            }
            other => return fail(no, format!("unknown directive `{other}`")),
        }
    }
    x.initial = init.ok_or_else(|| LoadError::Model("component file is missing an `init` line".into()))?;
    x.validate().map_err(LoadError::Model)?;
    Ok(x)
}

pub fn parse_tableau(text: &str) -> Result<Tableau, LoadError> {
    let lines = directive_lines(text);
    let (_, name) = expect_header(&lines, "tableau")?;
    let mut t = Tableau {
        name: name.to_string(),
        ..Tableau::default()
    };
    let mut guarded: BTreeSet<StateId> = BTreeSet::new();
    let mut sat_seen = false;
    for (no, toks) in lines.iter().skip(1) {
        let no = *no;
        let args = &toks[1..];
        match toks[0] {
            "tableau" => return fail(no, "duplicate `tableau` header"),
            "tstates" => t.states.extend(args.iter().map(StateId::new)),
            "tinit" => {
                for a in args {
                    let st = declared_state(&t.states, a, no)?;
                    t.initial.insert(st);
                }
            }
            "guard" => {
                let [state, lits @ ..] = args else {
                    return fail(no, "guard needs `guard <state> <literal> ...`");
                };
                if lits.is_empty() {
                    return fail(no, "guard needs at least one literal; use `true` for the empty guard");
                }
                let st = declared_state(&t.states, state, no)?;
                if !guarded.insert(st.clone()) {
                    return fail(no, format!("duplicate guard for `{state}`"));
                }
                let mut g = Guard::default();
                if lits != ["true"] {
                    for lit in lits {
                        match lit.strip_prefix('!') {
                            Some("") | None if *lit == "true" || *lit == "!" => {
                                return fail(no, format!("bad literal `{lit}`: `true` must stand alone"));
                            }
                            Some(p) => {
                                g.forbids.insert(p.to_string());
                            }
                            None => {
                                g.requires.insert(lit.to_string());
                            }
                        }
                    }
                }
                if !g.is_true() {
                    t.guards.insert(st, g);
                }
            }
            "sat" => {
                if sat_seen {
                    return fail(no, "duplicate `sat` line");
                }
                sat_seen = true;
                let Some(colon) = args.iter().position(|a| a.ends_with(':')) else {
                    return fail(no, "sat needs `sat <formula>: <states>`");
                };
                let mut tag = args[..=colon].join(" ");
                tag.pop();
                t.formula = tag;
                for a in &args[colon + 1..] {
                    let st = declared_state(&t.states, a, no)?;
                    t.sat.insert(st);
                }
            }
            "fair:" => {
                let mut set = BTreeSet::new();
                for a in args {
                    set.insert(declared_state(&t.states, a, no)?);
                }
                t.fairness.push(set);
            }
            "tedge" => {
                let [a, b] = args else {
                    return fail(no, "tedge needs `tedge <from> <to>`");
                };
                let from = declared_state(&t.states, a, no)?;
                let to = declared_state(&t.states, b, no)?;
                t.edges.insert((from, to));
            }
            other => return fail(no, format!("unknown directive `{other}`")),
        }
    }
    if !sat_seen {
        return Err(LoadError::Model("tableau file is missing a `sat` line".into()));
    }
    t.validate().map_err(|e| LoadError::Model(e.to_string()))?;
    Ok(t)
}

fn names<I: IntoIterator<Item = T>, T: ToString>(items: I) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Print a system in the file format; `parse_system` reads it back exactly.
pub fn print_system(sys: &HostSystem) -> String {
    let mut out = format!("system {}\n", sys.name);
    out += &format!("states {}\n", names(&sys.states));
    for (kw, set) in [
        ("events", &sys.events),
        ("inputs", &sys.inputs),
        ("outputs", &sys.outputs),
    ] {
        if !set.is_empty() {
            out += &format!("{kw} {}\n", names(set));
        }
    }
    out += &format!("init {}\n", names(&sys.initial));
    for (s, props) in &sys.labels {
        out += &format!("label {s} {}\n", names(props.iter().cloned()));
    }
    for (a, ev, b) in &sys.env {
        out += &format!("env {a} {ev} {b}\n");
    }
    for (a, i, o, b) in &sys.comm {
        out += &format!("comm {a} {i} {o} {b}\n");
    }
    out
}

/// Print a component in the file format; `parse_component` reads it back
/// exactly.
pub fn print_component(x: &MealyMachine) -> String {
    let mut out = format!("component {}\n", x.name);
    out += &format!("inputs {}\n", names(&x.inputs));
    out += &format!("outputs {}\n", names(&x.outputs));
    out += &format!("states {}\n", names(&x.states));
    out += &format!("init {}\n", x.initial);
    for ((s, i), (o, t)) in &x.delta {
        out += &format!("delta {s} {i} {o} {t}\n");
    }
    out
}

/// Print a tableau in the file format. Empty (`true`) guards are omitted,
/// matching the parser's normalization, so the round trip is exact.
pub fn print_tableau(t: &Tableau) -> String {
    let mut out = format!("tableau {}\n", t.name);
    out += &format!("tstates {}\n", names(&t.states));
    if !t.initial.is_empty() {
        out += &format!("tinit {}\n", names(&t.initial));
    }
    for (q, g) in &t.guards {
        if !g.is_true() {
            out += &format!("guard {q} {g}\n");
        }
    }
    out += &format!("sat {}: {}\n", t.formula, names(&t.sat));
    for set in &t.fairness {
        out += &format!("fair: {}\n", names(set));
    }
    for (a, b) in &t.edges {
        out += &format!("tedge {a} {b}\n");
    }
    out
}
