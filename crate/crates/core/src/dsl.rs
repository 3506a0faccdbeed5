//! A small text format for optical-table circuits (`.qwc` files).
//!
//! ```text
//! circuit  := step+
//! step     := "step" INT "{" stmt* "}"
//! stmt     := coin | retarder | shift | exchange
//! coin     := "coin" line ("I" | "HWP" DEGREES)
//! retarder := "pr" line INT RADIANS
//! shift    := "shift"
//! exchange := "exchange" "pos" "=" INT
//! line     := "line2" | "line3"
//! ```
//!
//! `#` starts a comment that runs to the end of the line. Whitespace,
//! including newlines, only separates tokens. Steps are numbered from 1
//! without gaps. A line without a `coin` statement gets the identity.
//! A pair of beam displacers is exactly one `shift`; mirrors are part of the
//! `exchange`.
//!
//! Whatever order statements appear in, a step always runs retarders, then
//! coins, then the shift, then the exchange; out-of-order sources compile
//! with a warning.

use std::fmt::{self, Write as _};

use crate::error::Error;
use crate::hilbert::Line;
use crate::walk::{Circuit, CoinKind, CoinOperator, ExchangeRule, PhaseRetarder, StepDescriptor};

const BUILTIN: &str = include_str!("protocol.qwc");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileDiagnostic {
    pub severity: Severity,
    pub message: String,
    pub location: Location,
}

impl CompileDiagnostic {
    fn error(location: Location, message: impl Into<String>) -> Self {
        CompileDiagnostic { severity: Severity::Error, message: message.into(), location }
    }

    fn warning(location: Location, message: impl Into<String>) -> Self {
        CompileDiagnostic { severity: Severity::Warning, message: message.into(), location }
    }
}

impl fmt::Display for CompileDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{level} at {}: {}", self.location, self.message)
    }
}

/// Circuit text plus an optional name used in diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitSource {
    pub name: String,
    pub text: String,
}

impl CircuitSource {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        CircuitSource { name: name.into(), text: text.into() }
    }

    pub fn parse(&self) -> Result<Compiled, Vec<CompileDiagnostic>> {
        parse(&self.text)
    }
}

/// The three-step swapping circuit as `.qwc` text.
pub fn builtin_protocol_source() -> CircuitSource {
    CircuitSource::new("builtin:protocol.qwc", BUILTIN)
}

/// A successfully compiled circuit and any warnings raised on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Compiled {
    pub circuit: Circuit,
    pub warnings: Vec<CompileDiagnostic>,
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Word(String),
    Number { text: String, value: f64 },
    LBrace,
    RBrace,
    Equals,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Word(w) => write!(f, "`{w}`"),
            TokenKind::Number { text, .. } => write!(f, "number `{text}`"),
            TokenKind::LBrace => f.write_str("`{`"),
            TokenKind::RBrace => f.write_str("`}`"),
            TokenKind::Equals => f.write_str("`=`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    at: Location,
}

fn lex(text: &str) -> Result<(Vec<Token>, Location), CompileDiagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let at = Location { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let kind = match c {
            '{' => {
                i += 1;
                TokenKind::LBrace
            }
            '}' => {
                i += 1;
                TokenKind::RBrace
            }
            '=' => {
                i += 1;
                TokenKind::Equals
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                TokenKind::Word(chars[start..i].iter().collect())
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                if c == '-' || c == '+' {
                    i += 1;
                }
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    i += 1;
                    if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                        i += 1;
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                match text.parse::<f64>() {
                    Ok(value) if value.is_finite() => TokenKind::Number { text, value },
                    _ => return Err(CompileDiagnostic::error(at, format!("malformed number `{text}`"))),
                }
            }
            other => {
                return Err(CompileDiagnostic::error(at, format!("unexpected character `{other}`")));
            }
        };
        col += i - start;
        tokens.push(Token { kind, at });
    }
    Ok((tokens, Location { line, column: col }))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: Location,
    diagnostics: Vec<CompileDiagnostic>,
}

type Fallible<T> = Result<T, CompileDiagnostic>;

const STATEMENT_KEYWORDS: [&str; 4] = ["coin", "pr", "shift", "exchange"];

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> Location {
        self.peek().map(|t| t.at).unwrap_or(self.eof)
    }

    fn next(&mut self, expected: &str) -> Fallible<Token> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(CompileDiagnostic::error(self.eof, format!("expected {expected}, found end of input"))),
        }
    }

    fn expect_word(&mut self, word: &str) -> Fallible<Location> {
        let t = self.next(&format!("`{word}`"))?;
        match &t.kind {
            TokenKind::Word(w) if w == word => Ok(t.at),
            other => Err(CompileDiagnostic::error(t.at, format!("expected `{word}`, found {other}"))),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Fallible<Location> {
        let t = self.next(&kind.to_string())?;
        if t.kind == kind {
            Ok(t.at)
        } else {
            Err(CompileDiagnostic::error(t.at, format!("expected {kind}, found {}", t.kind)))
        }
    }

    fn number(&mut self, what: &str) -> Fallible<(f64, String, Location)> {
        let t = self.next(what)?;
        match t.kind {
            TokenKind::Number { value, text } => Ok((value, text, t.at)),
            other => Err(CompileDiagnostic::error(t.at, format!("expected {what}, found {other}"))),
        }
    }

    fn integer(&mut self, what: &str) -> Fallible<i32> {
        let (_, text, at) = self.number(what)?;
        text.parse::<i32>()
            .map_err(|_| CompileDiagnostic::error(at, format!("expected {what}, found `{text}`")))
    }

    fn line(&mut self) -> Fallible<Line> {
        let t = self.next("`line2` or `line3`")?;
        match &t.kind {
            TokenKind::Word(w) if w == "line2" => Ok(Line::Line2),
            TokenKind::Word(w) if w == "line3" => Ok(Line::Line3),
            other => Err(CompileDiagnostic::error(t.at, format!("expected `line2` or `line3`, found {other}"))),
        }
    }

    fn at_keyword(&self, words: &[&str]) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Word(w), .. }) if words.contains(&w.as_str()))
    }

    /// Skips to the next statement keyword, `}`, `step`, or the first token
    /// after source line `line`.
    fn recover(&mut self, line: usize) {
        while let Some(t) = self.peek() {
            if t.at.line > line
                || t.kind == TokenKind::RBrace
                || self.at_keyword(&STATEMENT_KEYWORDS)
                || self.at_keyword(&["step"])
            {
                return;
            }
            self.pos += 1;
        }
    }

    fn circuit(&mut self) -> Vec<StepDescriptor> {
        let mut steps = Vec::new();
        if self.peek().is_none() {
            self.diagnostics.push(CompileDiagnostic::error(self.eof, "expected at least one step"));
            return steps;
        }
        while self.peek().is_some() {
            match self.step(steps.len() + 1) {
                Ok(step) => steps.push(step),
                Err(d) => {
                    self.diagnostics.push(d);
                    // resynchronize on the next `step`
                    while self.peek().is_some() && !self.at_keyword(&["step"]) {
                        self.pos += 1;
                    }
                }
            }
        }
        steps
    }

    fn step(&mut self, expected_number: usize) -> Fallible<StepDescriptor> {
        self.expect_word("step")?;
        let number_at = self.here();
        let number = self.integer("a step number")?;
        if number != expected_number as i32 {
            self.diagnostics.push(CompileDiagnostic::error(
                number_at,
                format!("steps must be numbered consecutively from 1: expected {expected_number}, found {number}"),
            ));
        }
        let open = self.expect(TokenKind::LBrace)?;

        let mut step = StepDescriptor::identity();
        let mut coin_seen = [false, false];
        let mut exchange_seen = false;
        let mut highest_rank = 0;
        let mut reordered = false;
        loop {
            match self.peek() {
                None => {
                    return Err(CompileDiagnostic::error(self.eof, format!("unclosed `{{` opened at {open}")));
                }
                Some(Token { kind: TokenKind::RBrace, .. }) => {
                    self.pos += 1;
                    break;
                }
                Some(_) => {}
            }
            let at = self.here();
            match self.statement(&mut step, &mut coin_seen, &mut exchange_seen) {
                Ok(rank) => {
                    if rank < highest_rank {
                        reordered = true;
                    }
                    highest_rank = highest_rank.max(rank);
                }
                Err(d) => {
                    let line = d.location.line;
                    self.diagnostics.push(d);
                    if self.here() == at {
                        self.pos += 1;
                    }
                    self.recover(line);
                    if self.at_keyword(&["step"]) {
                        return Err(CompileDiagnostic::error(self.here(), format!("unclosed `{{` opened at {open}")));
                    }
                }
            }
        }
        if reordered {
            self.diagnostics.push(CompileDiagnostic::warning(
                open,
                format!("step {number}: statements reordered to retarders, coins, shift, exchange"),
            ));
        }
        Ok(step)
    }

    /// Parses one statement into `step`; returns its execution rank.
    fn statement(
        &mut self,
        step: &mut StepDescriptor,
        coin_seen: &mut [bool; 2],
        exchange_seen: &mut bool,
    ) -> Fallible<u8> {
        let t = self.next("a statement")?;
        let TokenKind::Word(keyword) = &t.kind else {
            return Err(CompileDiagnostic::error(t.at, format!("expected a statement, found {}", t.kind)));
        };
        match keyword.as_str() {
            "pr" => {
                let line = self.line()?;
                let position = self.integer("an integer lattice position")?;
                let (phase, _, _) = self.number("a phase in radians")?;
                step.retarders.push(PhaseRetarder { line, position, phase });
                Ok(0)
            }
            "coin" => {
                let line = self.line()?;
                let kind = self.next("`I` or `HWP`")?;
                let coin = match &kind.kind {
                    TokenKind::Word(w) if w == "I" => CoinOperator::identity(),
                    TokenKind::Word(w) if w == "HWP" => {
                        let (degrees, _, _) = self.number("a wave-plate angle in degrees")?;
                        CoinOperator::half_wave_plate(degrees)
                    }
                    other => {
                        return Err(CompileDiagnostic::error(kind.at, format!("expected `I` or `HWP`, found {other}")));
                    }
                };
                let slot = match line {
                    Line::Line2 => 0,
                    Line::Line3 => 1,
                };
                if coin_seen[slot] {
                    return Err(CompileDiagnostic::error(t.at, format!("duplicate coin for {line} in one step")));
                }
                coin_seen[slot] = true;
                *step.coin_mut(line) = coin;
                Ok(1)
            }
            "shift" => {
                if step.shift {
                    return Err(CompileDiagnostic::error(t.at, "duplicate `shift` in one step"));
                }
                step.shift = true;
                Ok(2)
            }
            "exchange" => {
                self.expect_word("pos")?;
                self.expect(TokenKind::Equals)?;
                let position = self.integer("an integer lattice position")?;
                if *exchange_seen {
                    return Err(CompileDiagnostic::error(t.at, "duplicate `exchange` in one step"));
                }
                *exchange_seen = true;
                step.exchange = Some(ExchangeRule { position });
                Ok(3)
            }
            other => Err(CompileDiagnostic::error(t.at, format!("unknown keyword `{other}`"))),
        }
    }
}

/// Compiles circuit text. Fails with every error found (each located);
/// succeeds with the circuit and any warnings.
pub fn parse(text: &str) -> Result<Compiled, Vec<CompileDiagnostic>> {
    let (tokens, eof) = lex(text).map_err(|d| vec![d])?;
    let mut parser = Parser { tokens, pos: 0, eof, diagnostics: Vec::new() };
    let steps = parser.circuit();
    let (errors, warnings): (Vec<_>, Vec<_>) =
        parser.diagnostics.into_iter().partition(|d| d.severity == Severity::Error);
    if errors.is_empty() {
        Ok(Compiled { circuit: Circuit::new(steps), warnings })
    } else {
        Err(errors)
    }
}

/// Renders a circuit in canonical statement order.
///
/// Coins must be identities or wave plates.
pub fn print(circuit: &Circuit) -> Result<String, Error> {
    let mut out = String::new();
    for (i, step) in circuit.steps.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        writeln!(out, "step {} {{", i + 1).expect("write to String");
        for r in &step.retarders {
            writeln!(out, "    pr {} {} {}", r.line, r.position, r.phase).expect("write to String");
        }
        for line in Line::ALL {
            let coin = match step.coin(line).kind() {
                CoinKind::Identity => "I".to_string(),
                CoinKind::HalfWavePlate { degrees } => format!("HWP {degrees}"),
                CoinKind::Custom => return Err(Error::UnprintableCoin),
            };
            writeln!(out, "    coin {line} {coin}").expect("write to String");
        }
        if step.shift {
            out.push_str("    shift\n");
        }
        if let Some(ExchangeRule { position }) = step.exchange {
            writeln!(out, "    exchange pos = {position}").expect("write to String");
        }
        out.push_str("}\n");
    }
    Ok(out)
}
