//! Thin CLI over the library's driver layer. All real work lives in
//! `bbmc::driver`; this file only declares flags and forwards them.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bbmc::driver::{
    cmd_check_ctl, cmd_check_liveness, cmd_check_ltl, cmd_export_dot, cmd_oracle_compare,
    cmd_serve_component, CompareOptions, ComponentSpec, DriverError, RunOptions,
};
use bbmc::liveness::BoundMode;
use bbmc::wire::DEFAULT_TIMEOUT_MS;

#[derive(Parser)]
#[command(
    name = "bbmc",
    version,
    about = "Check temporal properties of a finite-state system with one black-box component"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the checking commands.
#[derive(Args)]
struct RunFlags {
    /// Host state to check (defaults to the single initial state)
    #[arg(long)]
    state: Option<String>,

    /// Component state bound (optional for component files, required for exec:)
    #[arg(long)]
    m: Option<usize>,

    /// Search-horizon derivation: exact simple-path bounds, or a cheaper
    /// overapproximation for large graphs
    #[arg(long, value_parser = parse_bound_mode, default_value = "exact")]
    bound_mode: BoundMode,

    /// Directory that receives Graphviz files of all constructed graphs
    #[arg(long, value_name = "DIR")]
    dot: Option<PathBuf>,

    /// File that receives a step-by-step experiment trace
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,

    /// File that receives the experiment log as JSON records
    #[arg(long, value_name = "FILE")]
    log: Option<PathBuf>,

    /// Disable the prefix cache: every experiment replays from reset
    #[arg(long)]
    no_cache: bool,

    /// Reply deadline for external components, in milliseconds
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_MS)]
    timeout_ms: u64,
}

impl RunFlags {
    fn to_options(&self) -> RunOptions {
        RunOptions {
            state: self.state.clone(),
            m: self.m,
            bound_mode: self.bound_mode,
            dot_dir: self.dot.clone(),
            trace_path: self.trace.clone(),
            log_path: self.log.clone(),
            cache: !self.no_cache,
            timeout_ms: self.timeout_ms,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide a branching-time (CTL) formula at a host state
    CheckCtl {
        /// System description file
        #[arg(long, value_name = "FILE")]
        system: PathBuf,
        /// Formula text, or @FILE to read it from a file
        #[arg(long, value_name = "TEXT|@FILE")]
        formula: String,
        /// Component file, or exec:CMD for an external process
        #[arg(long, value_name = "FILE|exec:CMD")]
        component: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Decide whether a state can be revisited forever from a start state
    CheckLiveness {
        #[arg(long, value_name = "FILE")]
        system: PathBuf,
        /// Start state
        #[arg(long)]
        from: String,
        /// State that must recur
        #[arg(long)]
        target: String,
        #[arg(long, value_name = "FILE|exec:CMD")]
        component: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Decide an existential linear-time property given its tableau
    CheckLtl {
        #[arg(long, value_name = "FILE")]
        system: PathBuf,
        /// Tableau description file for the path formula
        #[arg(long, value_name = "FILE")]
        tableau: PathBuf,
        #[arg(long, value_name = "FILE|exec:CMD")]
        component: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Write the graphs a query would construct, without any experiments
    ExportDot {
        #[arg(long, value_name = "FILE")]
        system: PathBuf,
        /// CTL formula (one witness-graph file per temporal operator)
        #[arg(long, value_name = "TEXT|@FILE")]
        formula: Option<String>,
        /// Liveness start state (with --target)
        #[arg(long)]
        from: Option<String>,
        /// Liveness target state (with --from)
        #[arg(long)]
        target: Option<String>,
        /// Output directory
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Cross-check the engine against whole-system oracles on random instances
    OracleCompare {
        /// Seed range, e.g. 0..500
        #[arg(long, value_parser = parse_seed_range, value_name = "A..B")]
        seeds: (u64, u64),
        /// Understate the component bound to provoke classified mismatches
        #[arg(long)]
        understate_m: bool,
        /// Mutate the engine's copy of each component (harness self-test)
        #[arg(long, hide = true)]
        mutate: bool,
    },
    /// Answer the component line protocol on stdin/stdout for a component file
    ServeComponent {
        #[arg(long, value_name = "FILE")]
        component: PathBuf,
    },
}

fn parse_bound_mode(s: &str) -> Result<BoundMode, String> {
    match s {
        "exact" => Ok(BoundMode::Exact),
        "over" => Ok(BoundMode::Overapprox),
        other => Err(format!("expected `exact` or `over`, got `{other}`")),
    }
}

fn parse_seed_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a range like 0..500, got `{s}`"))?;
    let start: u64 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad range start `{a}`: {e}"))?;
    let end: u64 = b
        .trim()
        .parse()
        .map_err(|e| format!("bad range end `{b}`: {e}"))?;
    Ok((start, end))
}

fn run(command: Command) -> Result<u8, DriverError> {
    match command {
        Command::CheckCtl {
            system,
            formula,
            component,
            flags,
        } => {
            let report = cmd_check_ctl(
                &system,
                &formula,
                &ComponentSpec::parse(&component),
                &flags.to_options(),
            )?;
            print!("{}", report.render());
            Ok(0)
        }
        Command::CheckLiveness {
            system,
            from,
            target,
            component,
            flags,
        } => {
            let report = cmd_check_liveness(
                &system,
                &from,
                &target,
                &ComponentSpec::parse(&component),
                &flags.to_options(),
            )?;
            print!("{}", report.render());
            Ok(0)
        }
        Command::CheckLtl {
            system,
            tableau,
            component,
            flags,
        } => {
            let report = cmd_check_ltl(
                &system,
                &tableau,
                &ComponentSpec::parse(&component),
                &flags.to_options(),
            )?;
            print!("{}", report.render());
            Ok(0)
        }
        Command::ExportDot {
            system,
            formula,
            from,
            target,
            out,
        } => {
            let report =
                cmd_export_dot(&system, formula.as_deref(), from.as_deref(), target.as_deref(), &out)?;
            print!("{}", report.render());
            Ok(0)
        }
        Command::OracleCompare {
            seeds,
            understate_m,
            mutate,
        } => {
            let opts = CompareOptions {
                seed_start: seeds.0,
                seed_end: seeds.1,
                understate_m,
                mutate,
            };
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let code = cmd_oracle_compare(&opts, &mut lock)?;
            lock.flush()
                .map_err(|e| DriverError::Engine(format!("cannot flush report: {e}")))?;
            Ok(code as u8)
        }
        Command::ServeComponent { component } => {
            cmd_serve_component(&component)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
