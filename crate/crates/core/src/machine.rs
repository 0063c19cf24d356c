//! Machine definitions: tape symbols, transition rules, validation and the
//! single-step transition semantics shared by every other module.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::file::MachineFile;

/// Token for the empty cell.
pub const BLANK: &str = "_";
/// Token for tape 0's left-end marker.
pub const LEFT_END: &str = "@";

/// A tape symbol. Any non-empty token without whitespace.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(token: &str) -> Self {
        Symbol(Arc::from(token))
    }

    pub fn blank() -> Self {
        Symbol::new(BLANK)
    }

    pub fn left_end() -> Self {
        Symbol::new(LEFT_END)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_blank(&self) -> bool {
        &*self.0 == BLANK
    }

    pub fn is_left_end(&self) -> bool {
        &*self.0 == LEFT_END
    }

    pub fn is_reserved(&self) -> bool {
        self.is_blank() || self.is_left_end()
    }

    /// Non-empty and whitespace free.
    pub fn is_well_formed(&self) -> bool {
        !self.0.is_empty() && !self.0.chars().any(char::is_whitespace)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Splits a whitespace separated word such as `"@ _ a b"` into symbols.
pub fn parse_word(word: &str) -> Vec<Symbol> {
    word.split_whitespace().map(Symbol::new).collect()
}

/// What one head does during a step.
///
/// The serialized tokens `L` and `R` always denote moves, so a symbol spelled
/// `L` or `R` can be read but never written.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Action {
    Left,
    Right,
    Write(Symbol),
}

impl Action {
    pub fn parse(token: &str) -> Action {
        match token {
            "L" => Action::Left,
            "R" => Action::Right,
            other => Action::Write(Symbol::new(other)),
        }
    }

    pub fn token(&self) -> &str {
        match self {
            Action::Left => "L",
            Action::Right => "R",
            Action::Write(s) => s.as_str(),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.token())
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let token = String::deserialize(deserializer)?;
        Ok(Action::parse(&token))
    }
}

/// One element of the transition relation: `((from (reads…)) (to (actions…)))`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rule {
    pub from: String,
    #[serde(rename = "read")]
    pub reads: Vec<Symbol>,
    pub to: String,
    pub actions: Vec<Action>,
}

impl Rule {
    pub fn new(from: &str, reads: &[&str], to: &str, actions: &[&str]) -> Self {
        Rule {
            from: from.to_string(),
            reads: reads.iter().map(|s| Symbol::new(s)).collect(),
            to: to.to_string(),
            actions: actions.iter().map(|a| Action::parse(a)).collect(),
        }
    }

    /// `(a b _ a)`
    pub fn reads_text(&self) -> String {
        list(self.reads.iter())
    }

    /// `(R a L _)`
    pub fn actions_text(&self) -> String {
        list(self.actions.iter())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(({} {}) ({} {}))",
            self.from,
            self.reads_text(),
            self.to,
            self.actions_text()
        )
    }
}

pub(crate) fn list<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
    let inner: Vec<String> = items.map(|i| i.to_string()).collect();
    format!("({})", inner.join(" "))
}

/// A validated multitape Turing machine. Only [`validate_machine`] builds one.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Machine {
    name: String,
    states: Vec<String>,
    alphabet: Vec<Symbol>,
    start: String,
    finals: Vec<String>,
    accept: String,
    rules: Vec<Rule>,
    tapes: usize,
}

impl Machine {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn finals(&self) -> &[String] {
        &self.finals
    }

    pub fn accept(&self) -> &str {
        &self.accept
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn num_tapes(&self) -> usize {
        self.tapes
    }

    pub fn has_state(&self, state: &str) -> bool {
        self.states.iter().any(|s| s == state)
    }

    pub fn is_final(&self, state: &str) -> bool {
        self.finals.iter().any(|s| s == state)
    }

    /// Σ ∪ {`_`, `@`}.
    pub fn is_tape_symbol(&self, symbol: &Symbol) -> bool {
        symbol.is_reserved() || self.alphabet.contains(symbol)
    }

    /// The serializable machine-file form.
    pub fn to_file(&self) -> MachineFile {
        MachineFile {
            name: self.name.clone(),
            tapes: self.tapes as i64,
            states: self.states.clone(),
            alphabet: self
                .alphabet
                .iter()
                .map(|s| s.as_str().to_string())
                .collect(),
            start: self.start.clone(),
            finals: self.finals.clone(),
            accept: self.accept.clone(),
            rules: self.rules.clone(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum DiagnosticCode {
    BadStart,
    BadFinals,
    BadAccept,
    BadArity,
    UnknownState,
    UnknownSymbol,
    BadTapeCount,
    WriteLeftEnd,
    DuplicateState,
    /// Empty, whitespace-bearing, reserved or repeated alphabet token.
    BadSymbol,
    DuplicateRule,
}

/// A single validation problem.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
    /// Field name or `rules[i]`.
    pub locus: String,
}

impl Diagnostic {
    fn new(code: DiagnosticCode, locus: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            message: message.into(),
            locus: locus.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} [{}]: {}", self.code, self.locus, self.message)
    }
}

/// Checks a raw machine description, collecting every problem in one pass.
pub fn validate_machine(raw: &MachineFile) -> Result<Machine, Vec<Diagnostic>> {
    use DiagnosticCode::*;
    let mut diags = Vec::new();

    let tapes = if raw.tapes >= 1 {
        raw.tapes as usize
    } else {
        diags.push(Diagnostic::new(
            BadTapeCount,
            "tapes",
            format!("a machine needs at least one tape, got {}", raw.tapes),
        ));
        0
    };

    let mut seen = HashSet::new();
    for state in &raw.states {
        if !seen.insert(state.as_str()) {
            diags.push(Diagnostic::new(
                DuplicateState,
                "states",
                format!("state {state} is listed more than once"),
            ));
        }
    }
    let is_state = |s: &str| seen.contains(s);

    let mut alphabet: Vec<Symbol> = Vec::with_capacity(raw.alphabet.len());
    for token in &raw.alphabet {
        let sym = Symbol::new(token);
        if !sym.is_well_formed() {
            diags.push(Diagnostic::new(
                BadSymbol,
                "alphabet",
                format!("{token:?} is not a valid symbol (empty or contains whitespace)"),
            ));
        } else if sym.is_reserved() {
            diags.push(Diagnostic::new(
                BadSymbol,
                "alphabet",
                format!("{token} is reserved and may not be declared in the input alphabet"),
            ));
        } else if alphabet.contains(&sym) {
            diags.push(Diagnostic::new(
                BadSymbol,
                "alphabet",
                format!("symbol {token} is listed more than once"),
            ));
        } else {
            alphabet.push(sym);
        }
    }
    let known_symbol = |s: &Symbol| s.is_reserved() || alphabet.contains(s);

    if !is_state(&raw.start) {
        diags.push(Diagnostic::new(
            BadStart,
            "start",
            format!("start state {} is not among the states", raw.start),
        ));
    }

    let mut finals: Vec<String> = Vec::with_capacity(raw.finals.len());
    for f in &raw.finals {
        if !is_state(f) {
            diags.push(Diagnostic::new(
                BadFinals,
                "finals",
                format!("final state {f} is not among the states"),
            ));
        } else if finals.contains(f) {
            diags.push(Diagnostic::new(
                BadFinals,
                "finals",
                format!("final state {f} is listed more than once"),
            ));
        } else {
            finals.push(f.clone());
        }
    }

    if !raw.finals.iter().any(|f| f == &raw.accept) {
        diags.push(Diagnostic::new(
            BadAccept,
            "accept",
            format!("accept state {} is not a final state", raw.accept),
        ));
    }

    let mut seen_rules: HashSet<&Rule> = HashSet::new();
    for (i, rule) in raw.rules.iter().enumerate() {
        let locus = format!("rules[{i}]");
        for endpoint in [&rule.from, &rule.to] {
            if !is_state(endpoint) {
                diags.push(Diagnostic::new(
                    UnknownState,
                    &locus,
                    format!("{endpoint} in {rule} is not among the states"),
                ));
            }
        }
        if tapes > 0 && (rule.reads.len() != tapes || rule.actions.len() != tapes) {
            diags.push(Diagnostic::new(
                BadArity,
                &locus,
                format!(
                    "{rule} has {} read symbols and {} actions; the machine has {tapes} tapes",
                    rule.reads.len(),
                    rule.actions.len()
                ),
            ));
        }
        for sym in &rule.reads {
            if !known_symbol(sym) {
                diags.push(Diagnostic::new(
                    UnknownSymbol,
                    &locus,
                    format!("{rule} reads {sym}, which is not a tape symbol"),
                ));
            }
        }
        for action in &rule.actions {
            if let Action::Write(sym) = action {
                if sym.is_left_end() {
                    diags.push(Diagnostic::new(
                        WriteLeftEnd,
                        &locus,
                        format!("{rule} writes the left-end marker @"),
                    ));
                } else if !known_symbol(sym) {
                    diags.push(Diagnostic::new(
                        UnknownSymbol,
                        &locus,
                        format!("{rule} writes {sym}, which is not a tape symbol"),
                    ));
                }
            }
        }
        if !seen_rules.insert(rule) {
            diags.push(Diagnostic::new(
                DuplicateRule,
                &locus,
                format!("{rule} appears more than once"),
            ));
        }
    }

    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(Machine {
        name: raw.name.clone(),
        states: raw.states.clone(),
        alphabet,
        start: raw.start.clone(),
        finals,
        accept: raw.accept.clone(),
        rules: raw.rules.clone(),
        tapes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TapeError {
    #[error("a tape needs at least one cell")]
    Empty,
    #[error("head position {head} is outside a tape of length {len}")]
    HeadOutOfRange { head: usize, len: usize },
}

/// One tape: its cells from position 0 and the head position.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Tape {
    cells: Vec<Symbol>,
    head: usize,
}

impl Tape {
    pub fn new(cells: Vec<Symbol>, head: usize) -> Result<Tape, TapeError> {
        if cells.is_empty() {
            return Err(TapeError::Empty);
        }
        if head >= cells.len() {
            return Err(TapeError::HeadOutOfRange {
                head,
                len: cells.len(),
            });
        }
        Ok(Tape { cells, head })
    }

    /// `(_)` with the head on position 0.
    pub fn blank() -> Tape {
        Tape {
            cells: vec![Symbol::blank()],
            head: 0,
        }
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn read(&self) -> &Symbol {
        &self.cells[self.head]
    }
}

/// A machine snapshot: state, head positions and tape contents.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Configuration {
    pub state: String,
    pub tapes: Vec<Tape>,
}

impl Configuration {
    /// Tape 0 holds `word` with its head at `head`; the others are blank.
    pub fn initial(machine: &Machine, word: Vec<Symbol>, head: usize) -> Result<Self, TapeError> {
        let mut tapes = Vec::with_capacity(machine.num_tapes());
        tapes.push(Tape::new(word, head)?);
        tapes.resize(machine.num_tapes(), Tape::blank());
        Ok(Configuration {
            state: machine.start().to_string(),
            tapes,
        })
    }

    pub fn heads(&self) -> Vec<usize> {
        self.tapes.iter().map(Tape::head).collect()
    }
}

/// `(C (2 1 1 1) ((@ _ a b) (_ _) (_ _) (_ _)))`
impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tapes: Vec<String> = self.tapes.iter().map(|t| list(t.cells.iter())).collect();
        write!(
            f,
            "({} {} ({}))",
            self.state,
            list(self.tapes.iter().map(Tape::head)),
            tapes.join(" ")
        )
    }
}

/// The symbol under each head, tape 0 first.
pub fn read_symbols(cfg: &Configuration) -> Vec<Symbol> {
    cfg.tapes.iter().map(|t| t.read().clone()).collect()
}

fn matches(rule: &Rule, cfg: &Configuration) -> bool {
    rule.from == cfg.state
        && rule.reads.len() == cfg.tapes.len()
        && rule.reads.iter().zip(&cfg.tapes).all(|(r, t)| r == t.read())
        // left-edge guard
        && rule
            .actions
            .iter()
            .zip(&cfg.tapes)
            .all(|(a, t)| !(matches!(a, Action::Left) && t.head == 0))
}

/// Indices into δ of the rules usable from `cfg`, in δ order.
pub fn applicable_rule_indices(machine: &Machine, cfg: &Configuration) -> Vec<usize> {
    if machine.is_final(&cfg.state) {
        return Vec::new();
    }
    machine
        .rules
        .iter()
        .enumerate()
        .filter(|(_, r)| matches(r, cfg))
        .map(|(i, _)| i)
        .collect()
}

/// Rules usable from `cfg`. Empty in a final state, and a rule that would move a
/// head left off position 0 never applies.
pub fn applicable_rules<'m>(machine: &'m Machine, cfg: &Configuration) -> Vec<&'m Rule> {
    applicable_rule_indices(machine, cfg)
        .into_iter()
        .map(|i| &machine.rules[i])
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("rule acts on {rule} tapes but the configuration has {cfg}")]
    Arity { rule: usize, cfg: usize },
    #[error("head on tape {tape} cannot move left of position 0")]
    LeftEdgeViolation { tape: usize },
}

/// Applies `rule` to `cfg`, producing the successor configuration.
///
/// Reads and the source state are not re-checked; callers pick rules from
/// [`applicable_rules`].
pub fn apply_rule(cfg: &Configuration, rule: &Rule) -> Result<Configuration, StepError> {
    if rule.actions.len() != cfg.tapes.len() {
        return Err(StepError::Arity {
            rule: rule.actions.len(),
            cfg: cfg.tapes.len(),
        });
    }
    let mut tapes = cfg.tapes.clone();
    for (i, (tape, action)) in tapes.iter_mut().zip(&rule.actions).enumerate() {
        match action {
            Action::Left => {
                if tape.head == 0 {
                    return Err(StepError::LeftEdgeViolation { tape: i });
                }
                tape.head -= 1;
            }
            Action::Right => {
                tape.head += 1;
                if tape.head == tape.cells.len() {
                    tape.cells.push(Symbol::blank());
                }
            }
            Action::Write(sym) => tape.cells[tape.head] = sym.clone(),
        }
    }
    Ok(Configuration {
        state: rule.to.clone(),
        tapes,
    })
}
