//! Command layer behind the CLI binary: load model files, assemble a
//! component session (reference machine or external process), run the
//! requested check, and render a stable line-oriented report.
//!
//! Every command returns `DriverError` on failure; `exit_code` maps the
//! two classes onto the process exit contract:
//!
//! * exit 0 — the check ran to a verdict (true *and* false both exit 0;
//!   the verdict is data, not a failure),
//! * exit 2 — the caller's fault: unparsable files or formulas, unknown
//!   states, alphabet mismatches, inconsistent flags,
//! * exit 3 — the machinery's fault: the external component misbehaved,
//!   an adapter or output file failed, the engine could not finish.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::component::{ComponentError, ComponentHandle, ComponentSession};
use crate::ctl::{analyze, CtlAnalysis};
use crate::dot::{
    communication_file_name, dot_communication_graph, dot_witness_graph, witness_file_name,
};
use crate::formula::{parse_ctl, ParseError};
use crate::liveness::{check_io, comm_bounds_auto, BoundMode, IoAnswer, LivenessError};
use crate::ltl::{check_ltl, LtlError, TableauError};
use crate::mealy::MealyMachine;
use crate::oracle::{
    instance_for_seed, run_differential, Classification, DifferentialOptions,
};
use crate::parse::{parse_component, parse_system, parse_tableau, print_component, print_system, LoadError};
use crate::runner::{check_ctl, test_liveness};
use crate::symbol::StateId;
use crate::system::{CommunicationTrace, HostSystem};
use crate::trace::Tracer;
use crate::wire::{serve, ExternalBackend, DEFAULT_TIMEOUT_MS};

// ---------------------------------------------------------------------------
// Errors and exit codes.
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum DriverError {
    /// The invocation or its input files are wrong. Exit 2.
    #[error("{0}")]
    Usage(String),
    /// The component, an adapter, or an output channel failed. Exit 3.
    #[error("{0}")]
    Engine(String),
}

impl DriverError {
    pub fn exit_code(&self) -> i32 {
        match self {
            DriverError::Usage(_) => 2,
            DriverError::Engine(_) => 3,
        }
    }
}

impl From<LoadError> for DriverError {
    fn from(e: LoadError) -> Self {
        DriverError::Usage(e.to_string())
    }
}

impl From<ParseError> for DriverError {
    fn from(e: ParseError) -> Self {
        DriverError::Usage(format!("formula: {e}"))
    }
}

impl From<TableauError> for DriverError {
    fn from(e: TableauError) -> Self {
        DriverError::Usage(e.to_string())
    }
}

impl From<LivenessError> for DriverError {
    fn from(e: LivenessError) -> Self {
        DriverError::Usage(e.to_string())
    }
}

impl From<ComponentError> for DriverError {
    fn from(e: ComponentError) -> Self {
        DriverError::Engine(e.to_string())
    }
}

impl From<LtlError> for DriverError {
    fn from(e: LtlError) -> Self {
        match e {
            LtlError::Tableau(t) => t.into(),
            LtlError::UnknownState(s) => DriverError::Usage(format!("unknown state `{s}`")),
            LtlError::Component(c) => c.into(),
        }
    }
}

// ---------------------------------------------------------------------------
// Invocation options.
// ---------------------------------------------------------------------------

/// Where the black box lives: a transition table we can simulate, or an
/// external process speaking the line protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentSpec {
    File(PathBuf),
    Exec(String),
}

impl ComponentSpec {
    /// `exec:CMD` selects an external process; anything else is a file
    /// path to a component description.
    pub fn parse(raw: &str) -> ComponentSpec {
        match raw.strip_prefix("exec:") {
            Some(cmd) => ComponentSpec::Exec(cmd.to_string()),
            None => ComponentSpec::File(PathBuf::from(raw)),
        }
    }
}

/// Flags shared by the checking commands.
#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Host state to check; defaults to the single initial state.
    pub state: Option<String>,
    /// Component state bound. Optional for file components (defaults to
    /// the declared state count), mandatory for `exec:` components.
    pub m: Option<usize>,
    pub bound_mode: BoundMode,
    /// Directory that receives Graphviz files of the constructed graphs.
    pub dot_dir: Option<PathBuf>,
    /// File that receives the step-by-step experiment trace.
    pub trace_path: Option<PathBuf>,
    /// File that receives the experiment log as JSON records.
    pub log_path: Option<PathBuf>,
    /// Prefix cache toggle (`--no-cache` turns it off).
    pub cache: bool,
    /// Reply deadline for external components, in milliseconds.
    pub timeout_ms: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            state: None,
            m: None,
            bound_mode: BoundMode::Exact,
            dot_dir: None,
            trace_path: None,
            log_path: None,
            cache: true,
            timeout_ms: DEFAULT_TIMEOUT_MS,
        }
    }
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictSource {
    /// The graph closures settled the query; the component was never run.
    Closure,
    /// Experiments on the component were (potentially) involved.
    Testing,
}

impl fmt::Display for VerdictSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictSource::Closure => write!(f, "closure"),
            VerdictSource::Testing => write!(f, "testing"),
        }
    }
}

/// Outcome of one checking command, rendered as `KEY value` lines with a
/// fixed order: `RESULT` first, `ELAPSED_MS` last, so scripts can rely on
/// the frame while ignoring keys they don't know.
#[derive(Debug)]
pub struct RunReport {
    pub verdict: bool,
    pub source: VerdictSource,
    pub experiments: usize,
    pub resets: usize,
    /// Longest input sequence sent in one session; the session itself
    /// enforces the documented cap, so this can only report values that
    /// already passed it.
    pub max_experiment_len: usize,
    /// Accepted communication trace, when testing produced the verdict.
    pub trace: Option<CommunicationTrace>,
    /// Communication/witness graphs the check constructed.
    pub graphs: usize,
    /// Graphviz files written (empty without a `--dot` directory).
    pub graph_files: Vec<PathBuf>,
    pub elapsed_ms: u128,
}

fn render_trace(trace: &CommunicationTrace) -> String {
    trace
        .iter()
        .map(|(i, o)| format!("{i}/{o}"))
        .collect::<Vec<_>>()
        .join(" ")
}

impl RunReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("RESULT {}\n", self.verdict));
        out.push_str(&format!("SOURCE {}\n", self.source));
        out.push_str(&format!("EXPERIMENTS {}\n", self.experiments));
        out.push_str(&format!("RESETS {}\n", self.resets));
        out.push_str(&format!("MAX_EXPERIMENT_LEN {}\n", self.max_experiment_len));
        if let Some(trace) = &self.trace {
            out.push_str(&format!("TRACE {}\n", render_trace(trace)));
        }
        out.push_str(&format!("GRAPHS {}\n", self.graphs));
        if !self.graph_files.is_empty() {
            let names: Vec<String> = self
                .graph_files
                .iter()
                .map(|p| p.display().to_string())
                .collect();
            out.push_str(&format!("GRAPH_FILES {}\n", names.join(" ")));
        }
        out.push_str(&format!("ELAPSED_MS {}\n", self.elapsed_ms));
        out
    }
}

/// Outcome of `export-dot`: no verdict, just the files written.
#[derive(Debug)]
pub struct ExportReport {
    pub files: Vec<PathBuf>,
    /// Explanation when a query needs no graph at all.
    pub note: Option<String>,
}

impl ExportReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("GRAPHS {}\n", self.files.len()));
        for f in &self.files {
            out.push_str(&format!("WROTE {}\n", f.display()));
        }
        if let Some(note) = &self.note {
            out.push_str(&format!("NOTE {note}\n"));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Loading helpers.
// ---------------------------------------------------------------------------

fn read_input(path: &Path) -> Result<String, DriverError> {
    fs::read_to_string(path)
        .map_err(|e| DriverError::Usage(format!("cannot read `{}`: {e}", path.display())))
}

pub fn load_system(path: &Path) -> Result<HostSystem, DriverError> {
    Ok(parse_system(&read_input(path)?)?)
}

fn load_component(path: &Path) -> Result<MealyMachine, DriverError> {
    Ok(parse_component(&read_input(path)?)?)
}

/// Literal formula text, or the contents of a file when the argument
/// starts with `@`.
fn formula_text(arg: &str) -> Result<String, DriverError> {
    match arg.strip_prefix('@') {
        Some(path) => read_input(Path::new(path)),
        None => Ok(arg.to_string()),
    }
}

/// Pick the state under scrutiny: the `--state` flag when given (and
/// declared), otherwise the system's single initial state. Several initial
/// states without a flag is an error — guessing would silently check the
/// wrong query.
fn resolve_state(sys: &HostSystem, flag: &Option<String>) -> Result<StateId, DriverError> {
    match flag {
        Some(name) => {
            let st = StateId::new(name);
            if sys.states.contains(&st) {
                Ok(st)
            } else {
                Err(DriverError::Usage(format!(
                    "`{name}` is not a state of system `{}`",
                    sys.name
                )))
            }
        }
        None => {
            if sys.initial.len() == 1 {
                Ok(sys.initial.iter().next().expect("one initial").clone())
            } else {
                Err(DriverError::Usage(format!(
                    "system `{}` has {} initial states; pick one with --state",
                    sys.name,
                    sys.initial.len()
                )))
            }
        }
    }
}

fn named(set: &std::collections::BTreeSet<crate::symbol::Symbol>) -> String {
    set.iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Assemble the session around the chosen component. File components are
/// simulated in-process and must share the system's communication
/// alphabet; `exec:` components are spawned and trusted to speak it, but
/// need an explicit `--m` because nothing else reveals their size.
fn build_session(
    sys: &HostSystem,
    spec: &ComponentSpec,
    opts: &RunOptions,
) -> Result<(ComponentSession, Tracer), DriverError> {
    if let Some(m) = opts.m {
        if m == 0 {
            return Err(DriverError::Usage("--m must be at least 1".into()));
        }
    }
    let handle = match spec {
        ComponentSpec::File(path) => {
            let machine = load_component(path)?;
            if machine.inputs != sys.inputs || machine.outputs != sys.outputs {
                return Err(DriverError::Usage(format!(
                    "component alphabet differs from the system's: \
                     component reads [{}] / writes [{}], system sends [{}] / expects [{}]",
                    named(&machine.inputs),
                    named(&machine.outputs),
                    named(&sys.inputs),
                    named(&sys.outputs),
                )));
            }
            match opts.m {
                Some(m) => ComponentHandle::reference_with_bound(machine, m),
                None => ComponentHandle::reference(machine),
            }
        }
        ComponentSpec::Exec(cmd) => {
            let m = opts.m.ok_or_else(|| {
                DriverError::Usage(
                    "external components need an explicit state bound: pass --m <N>".into(),
                )
            })?;
            let argv: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
            if argv.is_empty() {
                return Err(DriverError::Usage("empty exec: command".into()));
            }
            let backend = ExternalBackend::spawn(&argv, Duration::from_millis(opts.timeout_ms))?;
            ComponentHandle::with_backend(
                sys.inputs.clone(),
                sys.outputs.clone(),
                m,
                Box::new(backend),
            )
        }
    };
    let mut session = ComponentSession::new(handle, opts.cache);
    let tracer = match &opts.trace_path {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| {
                DriverError::Engine(format!("cannot create `{}`: {e}", path.display()))
            })?;
            Tracer::to_writer(Box::new(io::BufWriter::new(file)))
        }
        None => Tracer::disabled(),
    };
    session.set_tracer(tracer.clone());
    Ok((session, tracer))
}

fn write_dot_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf, DriverError> {
    fs::create_dir_all(dir)
        .map_err(|e| DriverError::Engine(format!("cannot create `{}`: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, body)
        .map_err(|e| DriverError::Engine(format!("cannot write `{}`: {e}", path.display())))?;
    Ok(path)
}

fn write_witness_dots(analysis: &CtlAnalysis, dir: &Path) -> Result<Vec<PathBuf>, DriverError> {
    let mut files = Vec::new();
    for wg in analysis.registry.graphs() {
        files.push(write_dot_file(
            dir,
            &witness_file_name(wg),
            &dot_witness_graph(wg),
        )?);
    }
    Ok(files)
}

fn write_experiment_log(
    session: &ComponentSession,
    path: &Option<PathBuf>,
) -> Result<(), DriverError> {
    if let Some(path) = path {
        let file = fs::File::create(path)
            .map_err(|e| DriverError::Engine(format!("cannot create `{}`: {e}", path.display())))?;
        let mut w = io::BufWriter::new(file);
        session
            .log()
            .write_records(&mut w)
            .and_then(|()| w.flush())
            .map_err(|e| DriverError::Engine(format!("cannot write `{}`: {e}", path.display())))?;
    }
    Ok(())
}

fn report_from_session(
    verdict: bool,
    tested: bool,
    session: &ComponentSession,
    trace: Option<CommunicationTrace>,
    graphs: usize,
    graph_files: Vec<PathBuf>,
    started: Instant,
) -> RunReport {
    let log = session.log();
    RunReport {
        verdict,
        source: if tested {
            VerdictSource::Testing
        } else {
            VerdictSource::Closure
        },
        experiments: log.experiment_count(),
        resets: log.reset_count(),
        max_experiment_len: log.max_experiment_length(),
        trace,
        graphs,
        graph_files,
        elapsed_ms: started.elapsed().as_millis(),
    }
}

// ---------------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------------

/// `check-ctl`: decide a branching-time formula at one host state.
pub fn cmd_check_ctl(
    system: &Path,
    formula_arg: &str,
    component: &ComponentSpec,
    opts: &RunOptions,
) -> Result<RunReport, DriverError> {
    let started = Instant::now();
    let sys = load_system(system)?;
    let f = parse_ctl(&formula_text(formula_arg)?)?;
    let s0 = resolve_state(&sys, &opts.state)?;
    let (mut session, tracer) = build_session(&sys, component, opts)?;

    let analysis = analyze(&sys, &f);
    let graph_files = match &opts.dot_dir {
        Some(dir) => write_witness_dots(&analysis, dir)?,
        None => Vec::new(),
    };
    let outcome = check_ctl(&analysis, &mut session, &s0, opts.bound_mode, tracer.clone())?;
    tracer.flush();
    write_experiment_log(&session, &opts.log_path)?;
    Ok(report_from_session(
        outcome.verdict,
        outcome.tested,
        &session,
        None,
        analysis.registry.len(),
        graph_files,
        started,
    ))
}

/// `check-liveness`: can the system, from `from`, visit `target`
/// infinitely often on some run?
pub fn cmd_check_liveness(
    system: &Path,
    from: &str,
    target: &str,
    component: &ComponentSpec,
    opts: &RunOptions,
) -> Result<RunReport, DriverError> {
    let started = Instant::now();
    let sys = load_system(system)?;
    let s0 = StateId::new(from);
    let sf = StateId::new(target);
    let answer = check_io(&sys, &s0, &sf)?;
    let (mut session, tracer) = build_session(&sys, component, opts)?;

    let report = match answer {
        IoAnswer::Definite(verdict) => {
            report_from_session(verdict, false, &session, None, 0, Vec::new(), started)
        }
        IoAnswer::Graph(g) => {
            let graph_files = match &opts.dot_dir {
                Some(dir) => vec![write_dot_file(
                    dir,
                    &communication_file_name(&g),
                    &dot_communication_graph(&g),
                )?],
                None => Vec::new(),
            };
            let bounds = comm_bounds_auto(&g, opts.bound_mode);
            let hit = test_liveness(&mut session, &g, &bounds, tracer.clone())?;
            report_from_session(hit.is_some(), true, &session, hit, 1, graph_files, started)
        }
    };
    tracer.flush();
    write_experiment_log(&session, &opts.log_path)?;
    Ok(report)
}

/// `check-ltl`: decide an existential linear-time property at one host
/// state, given its tableau.
pub fn cmd_check_ltl(
    system: &Path,
    tableau: &Path,
    component: &ComponentSpec,
    opts: &RunOptions,
) -> Result<RunReport, DriverError> {
    let started = Instant::now();
    let sys = load_system(system)?;
    let tab = parse_tableau(&read_input(tableau)?)?;
    let s0 = resolve_state(&sys, &opts.state)?;
    let (mut session, tracer) = build_session(&sys, component, opts)?;

    let outcome = check_ltl(&sys, &tab, &s0, &mut session, opts.bound_mode, tracer.clone())?;
    tracer.flush();
    write_experiment_log(&session, &opts.log_path)?;
    let tested = outcome.trace.is_some() || session.log().experiment_count() > 0;
    Ok(report_from_session(
        outcome.verdict,
        tested,
        &session,
        outcome.trace,
        outcome.residual_graphs,
        Vec::new(),
        started,
    ))
}

/// `export-dot`: write the graphs a query *would* construct, without
/// running any experiments. Exactly one of `formula` and `from`/`target`
/// selects the query kind.
pub fn cmd_export_dot(
    system: &Path,
    formula_arg: Option<&str>,
    from: Option<&str>,
    target: Option<&str>,
    out_dir: &Path,
) -> Result<ExportReport, DriverError> {
    let sys = load_system(system)?;
    match (formula_arg, from, target) {
        (Some(arg), None, None) => {
            let f = parse_ctl(&formula_text(arg)?)?;
            let analysis = analyze(&sys, &f);
            let files = write_witness_dots(&analysis, out_dir)?;
            Ok(ExportReport { files, note: None })
        }
        (None, Some(from), Some(target)) => {
            let s0 = StateId::new(from);
            let sf = StateId::new(target);
            match check_io(&sys, &s0, &sf)? {
                IoAnswer::Definite(v) => Ok(ExportReport {
                    files: Vec::new(),
                    note: Some(format!(
                        "the closures settle this query without a graph (answer: {v})"
                    )),
                }),
                IoAnswer::Graph(g) => {
                    let path = write_dot_file(
                        out_dir,
                        &communication_file_name(&g),
                        &dot_communication_graph(&g),
                    )?;
                    Ok(ExportReport {
                        files: vec![path],
                        note: None,
                    })
                }
            }
        }
        _ => Err(DriverError::Usage(
            "pass either --formula, or both --from and --target".into(),
        )),
    }
}

/// Flags of the `oracle-compare` command.
#[derive(Clone, Debug)]
pub struct CompareOptions {
    pub seed_start: u64,
    pub seed_end: u64,
    /// Understate the component bound to provoke (classified) mismatches.
    pub understate_m: bool,
    /// Mutate the engine's copy of the component to prove the harness
    /// notices behavioral drift.
    pub mutate: bool,
}

fn classification_tag(c: Classification) -> &'static str {
    match c {
        Classification::Genuine => "GENUINE",
        Classification::BoundViolation => "BOUND-VIOLATION",
        Classification::Mutation => "MUTATION",
    }
}

/// `oracle-compare`: run the engine against the composed-system oracles
/// over a seed range, print one summary line per seed, and dump the first
/// disagreeing instance in full. Returns the intended process exit code:
/// zero unless some disagreement is *not* explained by a deliberately
/// understated bound.
pub fn cmd_oracle_compare(
    opts: &CompareOptions,
    w: &mut dyn Write,
) -> Result<i32, DriverError> {
    let emit = |w: &mut dyn Write, line: String| -> Result<(), DriverError> {
        writeln!(w, "{line}").map_err(|e| DriverError::Engine(format!("cannot write report: {e}")))
    };
    if opts.seed_end <= opts.seed_start {
        return Err(DriverError::Usage(format!(
            "empty seed range {}..{}",
            opts.seed_start, opts.seed_end
        )));
    }

    let mut checks = 0;
    let mut liveness_checks = 0;
    let mut definite_with_experiments = 0;
    let mut max_ctl_ratio = 0.0_f64;
    let mut max_liveness_ratio = 0.0_f64;
    let mut genuine = 0;
    let mut bound_violations = 0;
    let mut mutations = 0;
    let mut dumped = false;

    for seed in opts.seed_start..opts.seed_end {
        let diff_opts = DifferentialOptions {
            seed_start: seed,
            seed_end: seed + 1,
            understate_m: opts.understate_m,
            mutate: opts.mutate,
            ..DifferentialOptions::default()
        };
        let report = run_differential(&diff_opts)?;
        checks += report.checks;
        liveness_checks += report.liveness_checks;
        definite_with_experiments += report.definite_with_experiments;
        max_ctl_ratio = max_ctl_ratio.max(report.max_ctl_ratio);
        max_liveness_ratio = max_liveness_ratio.max(report.max_liveness_ratio);

        emit(
            w,
            format!(
                "seed {seed}: {} ctl + {} liveness checks, {} disagreement(s)",
                report.checks,
                report.liveness_checks,
                report.disagreements.len()
            ),
        )?;

        for d in &report.disagreements {
            match d.classification {
                Classification::Genuine => genuine += 1,
                Classification::BoundViolation => bound_violations += 1,
                Classification::Mutation => mutations += 1,
            }
            emit(
                w,
                format!(
                    "DISAGREEMENT seed {} [{}] `{}` at {}: engine={} oracle={}",
                    d.seed,
                    classification_tag(d.classification),
                    d.formula,
                    d.state,
                    d.engine,
                    d.oracle
                ),
            )?;
            if !dumped {
                dumped = true;
                let (sys, x, engine_x) = instance_for_seed(&diff_opts, d.seed);
                emit(w, "--- disagreeing instance: system ---".into())?;
                emit(w, print_system(&sys).trim_end().to_string())?;
                emit(w, "--- disagreeing instance: component ---".into())?;
                emit(w, print_component(&x).trim_end().to_string())?;
                if engine_x != x {
                    emit(w, "--- component as the engine saw it (mutated) ---".into())?;
                    emit(w, print_component(&engine_x).trim_end().to_string())?;
                }
            }
        }
    }

    let disagreements = genuine + bound_violations + mutations;
    emit(
        w,
        format!(
            "TOTAL seeds {} ctl {} liveness {} disagreements {} \
             (genuine {}, bound-violation {}, mutation {})",
            opts.seed_end - opts.seed_start,
            checks,
            liveness_checks,
            disagreements,
            genuine,
            bound_violations,
            mutations
        ),
    )?;
    emit(
        w,
        format!(
            "LENGTH_RATIOS ctl {:.3} liveness {:.3} (of the documented caps)",
            max_ctl_ratio, max_liveness_ratio
        ),
    )?;
    if definite_with_experiments > 0 {
        emit(
            w,
            format!(
                "WARNING {definite_with_experiments} closure-decided check(s) touched the component"
            ),
        )?;
    }
    Ok(if genuine + mutations > 0 { 1 } else { 0 })
}

/// `serve-component`: speak the line protocol on stdin/stdout on behalf of
/// a component file — the reference adapter for `exec:` components.
pub fn cmd_serve_component(component: &Path) -> Result<(), DriverError> {
    let machine = load_component(component)?;
    let stdin = io::stdin();
    let stdout = io::stdout();
    serve(&machine, stdin.lock(), stdout.lock())
        .map_err(|e| DriverError::Engine(format!("protocol session failed: {e}")))
}
