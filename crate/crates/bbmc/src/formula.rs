//! Temporal formulas: parsing, printing, and reduction to the existential
//! normal form the checking engine works on.
//!
//! The surface grammar covers the usual CTL operators. The engine itself
//! only ever sees [`Enf`] trees — `{atomic, true, ¬, ∨, EX, EU, EG}` — so
//! [`normalize`] rewrites everything else away through the standard
//! dualities. Double negations are eliminated as the rewrite goes; nothing
//! else is simplified, so the shape of the normal form is predictable from
//! the shape of the input.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A CTL formula as written by the user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CtlFormula {
    True,
    False,
    Prop(String),
    Not(Box<CtlFormula>),
    And(Box<CtlFormula>, Box<CtlFormula>),
    Or(Box<CtlFormula>, Box<CtlFormula>),
    Implies(Box<CtlFormula>, Box<CtlFormula>),
    Ex(Box<CtlFormula>),
    Ax(Box<CtlFormula>),
    Ef(Box<CtlFormula>),
    Af(Box<CtlFormula>),
    Eg(Box<CtlFormula>),
    Ag(Box<CtlFormula>),
    Eu(Box<CtlFormula>, Box<CtlFormula>),
    Au(Box<CtlFormula>, Box<CtlFormula>),
}

impl CtlFormula {
    pub fn prop(name: impl Into<String>) -> Self {
        CtlFormula::Prop(name.into())
    }

    /// Every atomic proposition mentioned anywhere in the formula.
    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            use CtlFormula::*;
            match f {
                True | False => {}
                Prop(p) => {
                    out.insert(p.as_str());
                }
                Not(a) | Ex(a) | Ax(a) | Ef(a) | Af(a) | Eg(a) | Ag(a) => stack.push(a),
                And(a, b) | Or(a, b) | Implies(a, b) | Eu(a, b) | Au(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out
    }
}

/// A path formula (LTL syntax). Parsed for completeness of the surface
/// language; the liveness machinery consumes tableaux, not raw path
/// formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathFormula {
    True,
    False,
    Prop(String),
    Not(Box<PathFormula>),
    And(Box<PathFormula>, Box<PathFormula>),
    Or(Box<PathFormula>, Box<PathFormula>),
    Next(Box<PathFormula>),
    Eventually(Box<PathFormula>),
    Always(Box<PathFormula>),
    Until(Box<PathFormula>, Box<PathFormula>),
}

/// Existential normal form: what the engine checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enf {
    True,
    Prop(String),
    Not(Box<Enf>),
    Or(Box<Enf>, Box<Enf>),
    Ex(Box<Enf>),
    Eu(Box<Enf>, Box<Enf>),
    Eg(Box<Enf>),
}

/// A formula in existential normal form, together with the number of
/// temporal operators it contains — one witness graph is built per operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedCtl {
    pub root: Enf,
    pub operator_count: usize,
}

/// ¬f, but ¬¬g collapses to g so the dualities don't pile up negations.
fn smart_not(f: Enf) -> Enf {
    match f {
        Enf::Not(inner) => *inner,
        other => Enf::Not(Box::new(other)),
    }
}

fn to_enf(f: &CtlFormula) -> Enf {
    use CtlFormula as C;
    match f {
        C::True => Enf::True,
        C::False => smart_not(Enf::True),
        C::Prop(p) => Enf::Prop(p.clone()),
        C::Not(a) => smart_not(to_enf(a)),
        C::Or(a, b) => Enf::Or(Box::new(to_enf(a)), Box::new(to_enf(b))),
        // f ∧ g ≡ ¬(¬f ∨ ¬g)
        C::And(a, b) => smart_not(Enf::Or(
            Box::new(smart_not(to_enf(a))),
            Box::new(smart_not(to_enf(b))),
        )),
        // f → g ≡ ¬f ∨ g
        C::Implies(a, b) => Enf::Or(Box::new(smart_not(to_enf(a))), Box::new(to_enf(b))),
        C::Ex(a) => Enf::Ex(Box::new(to_enf(a))),
        // AX f ≡ ¬EX ¬f
        C::Ax(a) => smart_not(Enf::Ex(Box::new(smart_not(to_enf(a))))),
        // EF f ≡ E[true U f]
        C::Ef(a) => Enf::Eu(Box::new(Enf::True), Box::new(to_enf(a))),
        // AF f ≡ ¬EG ¬f
        C::Af(a) => smart_not(Enf::Eg(Box::new(smart_not(to_enf(a))))),
        C::Eg(a) => Enf::Eg(Box::new(to_enf(a))),
        // AG f ≡ ¬E[true U ¬f]
        C::Ag(a) => smart_not(Enf::Eu(Box::new(Enf::True), Box::new(smart_not(to_enf(a))))),
        C::Eu(a, b) => Enf::Eu(Box::new(to_enf(a)), Box::new(to_enf(b))),
        // A[f U g] ≡ ¬(E[¬g U (¬f ∧ ¬g)] ∨ EG ¬g), with ¬f ∧ ¬g as ¬(f ∨ g)
        C::Au(a, b) => {
            let fa = to_enf(a);
            let gb = to_enf(b);
            let neither = smart_not(Enf::Or(Box::new(fa), Box::new(gb.clone())));
            smart_not(Enf::Or(
                Box::new(Enf::Eu(Box::new(smart_not(gb.clone())), Box::new(neither))),
                Box::new(Enf::Eg(Box::new(smart_not(gb)))),
            ))
        }
    }
}

impl Enf {
    fn count_operators(&self) -> usize {
        match self {
            Enf::True | Enf::Prop(_) => 0,
            Enf::Not(a) => a.count_operators(),
            Enf::Or(a, b) => a.count_operators() + b.count_operators(),
            Enf::Ex(a) => 1 + a.count_operators(),
            Enf::Eu(a, b) => 1 + a.count_operators() + b.count_operators(),
            Enf::Eg(a) => 1 + a.count_operators(),
        }
    }
}

/// Rewrite into `{atomic, true, ¬, ∨, EX, EU, EG}`.
pub fn normalize(f: &CtlFormula) -> NormalizedCtl {
    let root = to_enf(f);
    let operator_count = root.count_operators();
    NormalizedCtl { root, operator_count }
}

// ---------------------------------------------------------------------------
// Printing. The CTL printer is the inverse of the parser: it inserts exactly
// the parentheses the precedence rules require, so parse(print(f)) == f.
// ---------------------------------------------------------------------------

// Precedence levels, loosest first: -> (1), | (2), & (3), unary (4).
fn fmt_ctl(f: &CtlFormula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    use CtlFormula as C;
    let paren = |needed: u8| min > needed;
    match f {
        C::True => write!(out, "true"),
        C::False => write!(out, "false"),
        C::Prop(p) => write!(out, "{p}"),
        C::Not(a) => {
            write!(out, "!")?;
            fmt_ctl(a, 4, out)
        }
        C::Ex(a) | C::Ax(a) | C::Ef(a) | C::Af(a) | C::Eg(a) | C::Ag(a) => {
            let op = match f {
                C::Ex(_) => "EX",
                C::Ax(_) => "AX",
                C::Ef(_) => "EF",
                C::Af(_) => "AF",
                C::Eg(_) => "EG",
                _ => "AG",
            };
            write!(out, "{op} ")?;
            fmt_ctl(a, 4, out)
        }
        C::Eu(a, b) | C::Au(a, b) => {
            let q = if matches!(f, C::Eu(..)) { "E" } else { "A" };
            write!(out, "{q}[")?;
            fmt_ctl(a, 0, out)?;
            write!(out, " U ")?;
            fmt_ctl(b, 0, out)?;
            write!(out, "]")
        }
        C::And(a, b) => {
            if paren(3) {
                write!(out, "(")?;
            }
            fmt_ctl(a, 3, out)?;
            write!(out, " & ")?;
            fmt_ctl(b, 4, out)?;
            if paren(3) {
                write!(out, ")")?;
            }
            Ok(())
        }
        C::Or(a, b) => {
            if paren(2) {
                write!(out, "(")?;
            }
            fmt_ctl(a, 2, out)?;
            write!(out, " | ")?;
            fmt_ctl(b, 3, out)?;
            if paren(2) {
                write!(out, ")")?;
            }
            Ok(())
        }
        C::Implies(a, b) => {
            if paren(1) {
                write!(out, "(")?;
            }
            fmt_ctl(a, 2, out)?; // -> is right-associative
            write!(out, " -> ")?;
            fmt_ctl(b, 1, out)?;
            if paren(1) {
                write!(out, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for CtlFormula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_ctl(self, 0, out)
    }
}

fn fmt_enf(f: &Enf, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Enf::True => write!(out, "true"),
        Enf::Prop(p) => write!(out, "{p}"),
        Enf::Not(a) => {
            write!(out, "!")?;
            fmt_enf(a, 2, out)
        }
        Enf::Ex(a) | Enf::Eg(a) => {
            write!(out, "{} ", if matches!(f, Enf::Ex(_)) { "EX" } else { "EG" })?;
            fmt_enf(a, 2, out)
        }
        Enf::Eu(a, b) => {
            write!(out, "E[")?;
            fmt_enf(a, 0, out)?;
            write!(out, " U ")?;
            fmt_enf(b, 0, out)?;
            write!(out, "]")
        }
        Enf::Or(a, b) => {
            if min > 1 {
                write!(out, "(")?;
            }
            fmt_enf(a, 1, out)?;
            write!(out, " | ")?;
            fmt_enf(b, 2, out)?;
            if min > 1 {
                write!(out, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Enf {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_enf(self, 0, out)
    }
}

fn fmt_path(f: &PathFormula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    use PathFormula as P;
    match f {
        P::True => write!(out, "true"),
        P::False => write!(out, "false"),
        P::Prop(p) => write!(out, "{p}"),
        P::Not(a) => {
            write!(out, "!")?;
            fmt_path(a, 3, out)
        }
        P::Next(a) | P::Eventually(a) | P::Always(a) => {
            let op = match f {
                P::Next(_) => "X",
                P::Eventually(_) => "F",
                _ => "G",
            };
            write!(out, "{op} ")?;
            fmt_path(a, 3, out)
        }
        P::Until(a, b) => {
            write!(out, "[")?;
            fmt_path(a, 0, out)?;
            write!(out, " U ")?;
            fmt_path(b, 0, out)?;
            write!(out, "]")
        }
        P::And(a, b) => {
            if min > 2 {
                write!(out, "(")?;
            }
            fmt_path(a, 2, out)?;
            write!(out, " & ")?;
            fmt_path(b, 3, out)?;
            if min > 2 {
                write!(out, ")")?;
            }
            Ok(())
        }
        P::Or(a, b) => {
            if min > 1 {
                write!(out, "(")?;
            }
            fmt_path(a, 1, out)?;
            write!(out, " | ")?;
            fmt_path(b, 2, out)?;
            if min > 1 {
                write!(out, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for PathFormula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_path(self, 0, out)
    }
}

// ---------------------------------------------------------------------------
// Lexing and parsing.
// ---------------------------------------------------------------------------

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    E,
    A,
    U,
    Ex,
    Ax,
    Ef,
    Af,
    Eg,
    Ag,
    X,
    F,
    G,
}

impl fmt::Display for Tok {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(out, "`{s}`"),
            Tok::True => write!(out, "`true`"),
            Tok::False => write!(out, "`false`"),
            Tok::Bang => write!(out, "`!`"),
            Tok::Amp => write!(out, "`&`"),
            Tok::Pipe => write!(out, "`|`"),
            Tok::Arrow => write!(out, "`->`"),
            Tok::LParen => write!(out, "`(`"),
            Tok::RParen => write!(out, "`)`"),
            Tok::LBracket => write!(out, "`[`"),
            Tok::RBracket => write!(out, "`]`"),
            Tok::E => write!(out, "`E`"),
            Tok::A => write!(out, "`A`"),
            Tok::U => write!(out, "`U`"),
            Tok::Ex => write!(out, "`EX`"),
            Tok::Ax => write!(out, "`AX`"),
            Tok::Ef => write!(out, "`EF`"),
            Tok::Af => write!(out, "`AF`"),
            Tok::Eg => write!(out, "`EG`"),
            Tok::Ag => write!(out, "`AG`"),
            Tok::X => write!(out, "`X`"),
            Tok::F => write!(out, "`F`"),
            Tok::G => write!(out, "`G`"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().expect("peeked");
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match c {
            '!' => {
                bump(&mut chars);
                Tok::Bang
            }
            '&' => {
                bump(&mut chars);
                Tok::Amp
            }
            '|' => {
                bump(&mut chars);
                Tok::Pipe
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            '[' => {
                bump(&mut chars);
                Tok::LBracket
            }
            ']' => {
                bump(&mut chars);
                Tok::RBracket
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    Tok::Arrow
                } else {
                    return Err(ParseError {
                        line: l,
                        column: col,
                        message: "expected `->`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "E" => Tok::E,
                    "A" => Tok::A,
                    "U" => Tok::U,
                    "EX" => Tok::Ex,
                    "AX" => Tok::Ax,
                    "EF" => Tok::Ef,
                    "AF" => Tok::Af,
                    "EG" => Tok::Eg,
                    "AG" => Tok::Ag,
                    "X" => Tok::X,
                    "F" => Tok::F,
                    "G" => Tok::G,
                    _ => Tok::Ident(word),
                }
            }
            other => {
                return Err(ParseError {
                    line: l,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                });
            }
        };
        toks.push((tok, l, col));
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        let toks = lex(text)?;
        let end = toks
            .last()
            .map(|&(_, l, c)| (l, c + 1))
            .unwrap_or((1, 1));
        Ok(Parser { toks, pos: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|&(_, l, c)| (l, c))
            .unwrap_or(self.end)
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.here();
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.advance();
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected {want}, found {t}"))),
            None => Err(self.error(format!("expected {want}, found end of input"))),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error(format!("unexpected {t} after formula"))),
        }
    }

    // formula := or ('->' formula)?         (right-associative)
    fn ctl(&mut self) -> Result<CtlFormula, ParseError> {
        let left = self.ctl_or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.advance();
            let right = self.ctl()?;
            Ok(CtlFormula::Implies(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn ctl_or(&mut self) -> Result<CtlFormula, ParseError> {
        let mut left = self.ctl_and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.advance();
            let right = self.ctl_and()?;
            left = CtlFormula::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn ctl_and(&mut self) -> Result<CtlFormula, ParseError> {
        let mut left = self.ctl_unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.advance();
            let right = self.ctl_unary()?;
            left = CtlFormula::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn ctl_unary(&mut self) -> Result<CtlFormula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.advance();
                Ok(CtlFormula::Not(Box::new(self.ctl_unary()?)))
            }
            Some(Tok::Ex) => {
                self.advance();
                Ok(CtlFormula::Ex(Box::new(self.ctl_unary()?)))
            }
            Some(Tok::Ax) => {
                self.advance();
                Ok(CtlFormula::Ax(Box::new(self.ctl_unary()?)))
            }
            Some(Tok::Ef) => {
                self.advance();
                Ok(CtlFormula::Ef(Box::new(self.ctl_unary()?)))
            }
            Some(Tok::Af) => {
                self.advance();
                Ok(CtlFormula::Af(Box::new(self.ctl_unary()?)))
            }
            Some(Tok::Eg) => {
                self.advance();
                Ok(CtlFormula::Eg(Box::new(self.ctl_unary()?)))
            }
            Some(Tok::Ag) => {
                self.advance();
                Ok(CtlFormula::Ag(Box::new(self.ctl_unary()?)))
            }
            Some(Tok::E) => {
                self.advance();
                let (f, g) = self.until_body(|p| p.ctl())?;
                Ok(CtlFormula::Eu(Box::new(f), Box::new(g)))
            }
            Some(Tok::A) => {
                self.advance();
                let (f, g) = self.until_body(|p| p.ctl())?;
                Ok(CtlFormula::Au(Box::new(f), Box::new(g)))
            }
            _ => self.ctl_atom(),
        }
    }

    fn until_body<T>(
        &mut self,
        sub: impl Fn(&mut Parser) -> Result<T, ParseError>,
    ) -> Result<(T, T), ParseError> {
        self.expect(Tok::LBracket)?;
        let f = sub(self)?;
        self.expect(Tok::U)?;
        let g = sub(self)?;
        self.expect(Tok::RBracket)?;
        Ok((f, g))
    }

    fn ctl_atom(&mut self) -> Result<CtlFormula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.advance();
                Ok(CtlFormula::True)
            }
            Some(Tok::False) => {
                self.advance();
                Ok(CtlFormula::False)
            }
            Some(Tok::Ident(name)) => {
                self.advance();
                Ok(CtlFormula::Prop(name))
            }
            Some(Tok::LParen) => {
                self.advance();
                let f = self.ctl()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(t) => Err(self.error(format!("expected a formula, found {t}"))),
            None => Err(self.error("expected a formula, found end of input")),
        }
    }

    fn path(&mut self) -> Result<PathFormula, ParseError> {
        let mut left = self.path_and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.advance();
            let right = self.path_and()?;
            left = PathFormula::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn path_and(&mut self) -> Result<PathFormula, ParseError> {
        let mut left = self.path_unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.advance();
            let right = self.path_unary()?;
            left = PathFormula::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn path_unary(&mut self) -> Result<PathFormula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.advance();
                Ok(PathFormula::Not(Box::new(self.path_unary()?)))
            }
            Some(Tok::X) => {
                self.advance();
                Ok(PathFormula::Next(Box::new(self.path_unary()?)))
            }
            Some(Tok::F) => {
                self.advance();
                Ok(PathFormula::Eventually(Box::new(self.path_unary()?)))
            }
            Some(Tok::G) => {
                self.advance();
                Ok(PathFormula::Always(Box::new(self.path_unary()?)))
            }
            Some(Tok::LBracket) => {
                let (f, g) = self.until_body(|p| p.path())?;
                Ok(PathFormula::Until(Box::new(f), Box::new(g)))
            }
            _ => self.path_atom(),
        }
    }

    fn path_atom(&mut self) -> Result<PathFormula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.advance();
                Ok(PathFormula::True)
            }
            Some(Tok::False) => {
                self.advance();
                Ok(PathFormula::False)
            }
            Some(Tok::Ident(name)) => {
                self.advance();
                Ok(PathFormula::Prop(name))
            }
            Some(Tok::LParen) => {
                self.advance();
                let f = self.path()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(t) => Err(self.error(format!("expected a path formula, found {t}"))),
            None => Err(self.error("expected a path formula, found end of input")),
        }
    }
}

pub fn parse_ctl(text: &str) -> Result<CtlFormula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.ctl()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_path(text: &str) -> Result<PathFormula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.path()?;
    p.finish()?;
    Ok(f)
}
