//! Line protocol for driving an external component over stdin/stdout.
//!
//! The engine writes `RESET` or `IN <symbol>`, one per line; the component
//! answers every line with exactly one of `OK` (for a reset) or
//! `OUT <symbol>` (for an input). Anything else — a malformed line, a closed
//! pipe, silence past the timeout — is an adapter failure: the engine stops
//! without a verdict rather than guess what a broken peer meant.
//!
//! [`serve`] is the other side of the same protocol, used by the
//! `serve-component` subcommand to expose a component specification as a
//! process.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver};
use std::thread;
use std::time::Duration;

use crate::component::{Backend, ComponentError};
use crate::mealy::MealyMachine;
use crate::symbol::Symbol;

pub const DEFAULT_TIMEOUT_MS: u64 = 5000;

/// A component reached by spawning a process and speaking the line protocol.
pub struct ExternalBackend {
    child: Child,
    stdin: std::process::ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl ExternalBackend {
    /// Spawn `argv[0]` with arguments `argv[1..]`. No shell is involved.
    pub fn spawn(argv: &[String], timeout: Duration) -> Result<ExternalBackend, ComponentError> {
        let (program, args) = argv
            .split_first()
            .ok_or_else(|| ComponentError::AdapterFailure("empty command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| ComponentError::AdapterFailure(format!("cannot spawn `{program}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        // Reads block with no portable deadline, so a thread pumps lines into
        // a channel and the engine waits on the channel with a timeout.
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let reader = BufReader::new(stdout);
            for line in reader.lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(ExternalBackend {
            child,
            stdin,
            lines: rx,
            timeout,
        })
    }

    fn send(&mut self, line: &str) -> Result<(), ComponentError> {
        self.stdin
            .write_all(line.as_bytes())
            .and_then(|_| self.stdin.write_all(b"\n"))
            .and_then(|_| self.stdin.flush())
            .map_err(|e| ComponentError::AdapterFailure(format!("write failed: {e}")))
    }

    fn recv(&mut self) -> Result<String, ComponentError> {
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => {
                if !line.is_ascii() {
                    return Err(ComponentError::AdapterFailure(format!(
                        "non-ASCII response: {line:?}"
                    )));
                }
                Ok(line)
            }
            Ok(Err(e)) => Err(ComponentError::AdapterFailure(format!("read failed: {e}"))),
            Err(mpsc::RecvTimeoutError::Timeout) => Err(ComponentError::AdapterFailure(format!(
                "no response within {} ms",
                self.timeout.as_millis()
            ))),
            Err(mpsc::RecvTimeoutError::Disconnected) => Err(ComponentError::AdapterFailure(
                "component closed its output".into(),
            )),
        }
    }
}

impl Backend for ExternalBackend {
    fn reset(&mut self) -> Result<(), ComponentError> {
        self.send("RESET")?;
        let line = self.recv()?;
        if line.trim_end() == "OK" {
            Ok(())
        } else {
            Err(ComponentError::AdapterFailure(format!(
                "expected `OK` after RESET, got {line:?}"
            )))
        }
    }

    fn step(&mut self, input: &Symbol) -> Result<Symbol, ComponentError> {
        self.send(&format!("IN {input}"))?;
        let line = self.recv()?;
        match line.trim_end().strip_prefix("OUT ") {
            Some(sym) if !sym.is_empty() && !sym.contains(char::is_whitespace) => {
                Ok(Symbol::new(sym))
            }
            _ => Err(ComponentError::AdapterFailure(format!(
                "expected `OUT <symbol>`, got {line:?}"
            ))),
        }
    }
}

impl Drop for ExternalBackend {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Answer the line protocol on behalf of a component specification. Returns
/// when the peer closes the input stream.
pub fn serve(
    machine: &MealyMachine,
    input: impl BufRead,
    mut output: impl Write,
) -> std::io::Result<()> {
    use std::io::{Error, ErrorKind};
    let bad = |msg: String| Error::new(ErrorKind::InvalidData, msg);
    let mut current = machine.initial.clone();
    for line in input.lines() {
        let line = line?;
        let line = line.trim_end();
        if line == "RESET" {
            current = machine.initial.clone();
            writeln!(output, "OK")?;
        } else if let Some(sym) = line.strip_prefix("IN ") {
            let (out, next) = machine
                .step(&current, &Symbol::new(sym))
                .ok_or_else(|| bad(format!("no transition from `{current}` on `{sym}`")))?;
            current = next;
            writeln!(output, "OUT {out}")?;
        } else {
            return Err(bad(format!("unrecognized request {line:?}")));
        }
        output.flush()?;
    }
    Ok(())
}
