//! Best-effort search-trace sink.
//!
//! The runner and the experiment layer both write here when a trace file is
//! requested: one line per experiment, branch decision, and verdict. Tracing
//! must never change engine behavior, so write errors are swallowed.

use std::cell::RefCell;
use std::io::Write;
use std::rc::Rc;

#[derive(Clone, Default)]
pub struct Tracer(Option<Rc<RefCell<Box<dyn Write>>>>);

impl Tracer {
    pub fn disabled() -> Tracer {
        Tracer(None)
    }

    pub fn to_writer(w: Box<dyn Write>) -> Tracer {
        Tracer(Some(Rc::new(RefCell::new(w))))
    }

    pub fn is_enabled(&self) -> bool {
        self.0.is_some()
    }

    pub fn line(&self, text: impl AsRef<str>) {
        if let Some(w) = &self.0 {
            let _ = writeln!(w.borrow_mut(), "{}", text.as_ref());
        }
    }

    pub fn flush(&self) {
        if let Some(w) = &self.0 {
            let _ = w.borrow_mut().flush();
        }
    }
}
