#![allow(dead_code)]

//! Test-only helpers: an independent naive computation-tree enumerator, a
//! random small-machine generator and a DOT grammar checker.

use std::collections::{BTreeMap, BTreeSet};

use fsmlab_core::compgraph::{build_cmpgraph, render_cmpgraph, CmpGraph};
use fsmlab_core::diagram::render_transition_diagram;
use fsmlab_core::engine::{apply, explore, OutcomeKind};
use fsmlab_core::{apply_rule, Action, Machine, MachineFile, Rule, Symbol};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

// ---------------------------------------------------------------------------
// Naive recursive enumerator. Shares only the machine's data with the crate;
// step semantics are re-implemented here on plain vectors.

#[derive(Clone, Debug)]
struct NaiveTape {
    cells: Vec<String>,
    head: usize,
}

#[derive(Clone, Debug)]
struct NaiveCfg {
    state: String,
    tapes: Vec<NaiveTape>,
}

#[derive(Default, Clone, Copy, Debug, PartialEq, Eq)]
pub struct NaiveUse {
    pub last: bool,
    pub mid: bool,
    pub cutoff: bool,
}

#[derive(Default, Debug, PartialEq, Eq)]
pub struct NaiveSummary {
    pub terminal: BTreeSet<String>,
    pub cutoff: BTreeSet<String>,
    pub edges: BTreeMap<usize, NaiveUse>,
    pub cutoff_count: usize,
    /// Length of the shortest accepting computation.
    pub shortest_accept: Option<usize>,
}

fn naive_successors(m: &Machine, cfg: &NaiveCfg) -> Vec<(usize, NaiveCfg)> {
    if m.finals().contains(&cfg.state) {
        return vec![];
    }
    let mut out = vec![];
    'rules: for (i, rule) in m.rules().iter().enumerate() {
        if rule.from != cfg.state {
            continue;
        }
        for (t, sym) in rule.reads.iter().enumerate() {
            if cfg.tapes[t].cells[cfg.tapes[t].head] != sym.as_str() {
                continue 'rules;
            }
        }
        let mut next = cfg.clone();
        next.state = rule.to.clone();
        for (t, action) in rule.actions.iter().enumerate() {
            let tape = &mut next.tapes[t];
            match action {
                Action::Left if tape.head == 0 => continue 'rules,
                Action::Left => tape.head -= 1,
                Action::Right => {
                    tape.head += 1;
                    if tape.head >= tape.cells.len() {
                        tape.cells.push("_".to_string());
                    }
                }
                Action::Write(s) => tape.cells[tape.head] = s.as_str().to_string(),
            }
        }
        out.push((i, next));
    }
    out
}

fn naive_walk(
    m: &Machine,
    cfg: NaiveCfg,
    depth: usize,
    threshold: usize,
    incoming: Option<usize>,
    out: &mut NaiveSummary,
) {
    let succ = naive_successors(m, &cfg);
    if succ.is_empty() {
        if let Some(r) = incoming {
            out.edges.entry(r).or_default().last = true;
        }
        if cfg.state == m.accept() {
            out.shortest_accept = Some(out.shortest_accept.map_or(depth, |d| d.min(depth)));
        }
        out.terminal.insert(cfg.state);
        return;
    }
    if depth == threshold {
        out.edges.entry(incoming.unwrap()).or_default().cutoff = true;
        out.cutoff.insert(cfg.state);
        out.cutoff_count += 1;
        return;
    }
    if let Some(r) = incoming {
        out.edges.entry(r).or_default().mid = true;
    }
    for (r, next) in succ {
        naive_walk(m, next, depth + 1, threshold, Some(r), out);
    }
}

pub fn naive_enumerate(m: &Machine, word: &[&str], head: usize, threshold: usize) -> NaiveSummary {
    let mut tapes = vec![NaiveTape {
        cells: word.iter().map(|s| s.to_string()).collect(),
        head,
    }];
    for _ in 1..m.num_tapes() {
        tapes.push(NaiveTape {
            cells: vec!["_".into()],
            head: 0,
        });
    }
    let mut out = NaiveSummary::default();
    naive_walk(
        m,
        NaiveCfg {
            state: m.start().to_string(),
            tapes,
        },
        0,
        threshold,
        None,
        &mut out,
    );
    out
}

// ---------------------------------------------------------------------------
// Random small machines.

#[derive(Clone, Debug)]
pub struct Case {
    pub machine: Machine,
    pub word: Vec<String>,
    pub head: usize,
    pub threshold: usize,
}

impl Case {
    pub fn word_symbols(&self) -> Vec<Symbol> {
        self.word.iter().map(|s| Symbol::new(s)).collect()
    }

    pub fn word_refs(&self) -> Vec<&str> {
        self.word.iter().map(String::as_str).collect()
    }
}

/// Machines with at most `max_states` states, at most two tapes, an alphabet
/// drawn from {a, b}, a word of up to five cells and a threshold up to
/// `max_threshold`.
pub fn arb_case(max_states: usize, max_threshold: usize) -> impl Strategy<Value = Case> {
    (1usize..=max_states, 1usize..=2, 1usize..=2)
        .prop_flat_map(move |(nstates, tapes, nsigma)| {
            let symbols = nsigma + 1; // plus blank
                                      // indices past the alphabet all read a blank, so blanks dominate
            let rule = (
                0..nstates,
                proptest::collection::vec(0..2 * symbols, tapes),
                0..nstates,
                proptest::collection::vec(0..symbols + 2, tapes),
            );
            (
                Just((nstates, tapes, nsigma)),
                proptest::collection::vec(rule, 2..=14),
                0..nstates,
                proptest::option::of(0..nstates),
                proptest::collection::vec(0..2 * symbols, 1..=5),
                any::<prop::sample::Index>(),
                1..=max_threshold,
            )
        })
        .prop_map(
            |((nstates, tapes, nsigma), rules, accept, reject, word, head, threshold)| {
                // q0 starts; it only accepts in the one-state machine
                let start = 0;
                let accept = if nstates == 1 {
                    0
                } else {
                    1 + accept % (nstates - 1)
                };
                let states: Vec<String> = (0..nstates).map(|i| format!("q{i}")).collect();
                let sigma: Vec<String> =
                    ["a", "b"][..nsigma].iter().map(|s| s.to_string()).collect();
                let sym = |i: usize| {
                    if i < nsigma {
                        sigma[i].clone()
                    } else {
                        "_".to_string()
                    }
                };
                let act = |i: usize| match i {
                    i if i <= nsigma => sym(i),
                    i if i == nsigma + 1 => "L".to_string(),
                    _ => "R".to_string(),
                };
                let mut finals = vec![states[accept].clone()];
                if let Some(r) = reject {
                    if r != accept {
                        finals.push(states[r].clone());
                    }
                }
                let mut seen = BTreeSet::new();
                let rules: Vec<Rule> = rules
                    .into_iter()
                    .map(|(f, r, t, a)| Rule {
                        from: states[f].clone(),
                        reads: r
                            .into_iter()
                            .map(|i| Symbol::new(&sym(i.min(nsigma))))
                            .collect(),
                        to: states[t].clone(),
                        actions: a.into_iter().map(|i| Action::parse(&act(i))).collect(),
                    })
                    .filter(|r| seen.insert(r.to_string()))
                    .collect();
                let machine = MachineFile {
                    name: "random".into(),
                    tapes: tapes as i64,
                    start: states[start].clone(),
                    accept: states[accept].clone(),
                    finals,
                    states,
                    alphabet: sigma.clone(),
                    rules,
                }
                .validate()
                .expect("generated machines are valid");
                let word: Vec<String> = word.into_iter().map(|i| sym(i.min(nsigma))).collect();
                let head = head.index(word.len());
                Case {
                    machine,
                    word,
                    head,
                    threshold,
                }
            },
        )
}

// ---------------------------------------------------------------------------
// DOT checking.

pub type Attrs = Vec<(String, String)>;

#[derive(Debug, Clone, PartialEq)]
pub struct DotGraph {
    pub name: Option<String>,
    pub graph_attrs: Attrs,
    pub nodes: Vec<(String, Attrs)>,
    pub edges: Vec<(String, String, Attrs)>,
}

impl DotGraph {
    pub fn node_attr(&self, id: &str, key: &str) -> Option<&str> {
        self.nodes
            .iter()
            .find(|(n, _)| n == id)
            .and_then(|(_, attrs)| attrs.iter().find(|(k, _)| k == key))
            .map(|(_, v)| v.as_str())
    }

    pub fn node_ids(&self) -> Vec<&str> {
        self.nodes.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// Label entries of the edge `from -> to`, split on the separators.
    pub fn edge_entries(&self, from: &str, to: &str) -> Vec<String> {
        self.edges
            .iter()
            .filter(|(f, t, _)| f == from && t == to)
            .flat_map(|(_, _, attrs)| {
                let label = attrs
                    .iter()
                    .find(|(k, _)| k == "label")
                    .map(|(_, v)| v.clone())
                    .unwrap_or_default();
                split_entries(&label)
            })
            .collect()
    }
}

fn split_entries(label: &str) -> Vec<String> {
    label
        .split("],")
        .map(|e| {
            let e = e.trim_start_matches("\\n").trim();
            if e.ends_with(']') {
                e.to_string()
            } else {
                format!("{e}]")
            }
        })
        .filter(|e| e != "]")
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Quoted(String),
    Punct(&'static str),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = vec![];
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        let next = *chars.get(i + 1).ok_or("dangling escape")?;
                        s.push('\\');
                        s.push(next);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Quoted(s));
        } else if c.is_ascii_alphanumeric()
            || c == '_'
            || c == '.'
            || c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())
        {
            let start = i;
            i += 1;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '.')
            {
                i += 1;
            }
            let id: String = chars[start..i].iter().collect();
            let numeral = id
                .trim_start_matches('-')
                .chars()
                .all(|c| c.is_ascii_digit() || c == '.');
            let plain = !id.starts_with(|c: char| c.is_ascii_digit()) && !id.contains('.');
            if !numeral && !plain {
                return Err(format!("bad identifier {id}"));
            }
            out.push(Tok::Id(id));
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Tok::Punct("->"));
            i += 2;
        } else if c == '-' && chars.get(i + 1) == Some(&'-') {
            out.push(Tok::Punct("--"));
            i += 2;
        } else {
            let p = match c {
                '{' => "{",
                '}' => "}",
                '[' => "[",
                ']' => "]",
                ';' => ";",
                ',' => ",",
                '=' => "=",
                other => return Err(format!("unexpected character {other:?}")),
            };
            out.push(Tok::Punct(p));
            i += 1;
        }
    }
    Ok(out)
}

const KEYWORDS: [&str; 6] = ["strict", "graph", "digraph", "node", "edge", "subgraph"];

fn is_kw(tok: Option<&Tok>, kw: &str) -> bool {
    matches!(tok, Some(Tok::Id(s)) if s.eq_ignore_ascii_case(kw))
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn punct(&mut self, p: &str) -> bool {
        if self.peek()
            == Some(&Tok::Punct(match p {
                "{" => "{",
                "}" => "}",
                "[" => "[",
                "]" => "]",
                ";" => ";",
                "," => ",",
                "=" => "=",
                "->" => "->",
                _ => "--",
            }))
        {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), String> {
        if self.punct(p) {
            Ok(())
        } else {
            Err(format!(
                "expected {p} at token {} ({:?})",
                self.pos,
                self.peek()
            ))
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek().cloned() {
            Some(Tok::Id(s)) if !KEYWORDS.iter().any(|k| s.eq_ignore_ascii_case(k)) => {
                self.pos += 1;
                Ok(s)
            }
            Some(Tok::Quoted(s)) => {
                self.pos += 1;
                Ok(s)
            }
            other => Err(format!(
                "expected identifier at token {}, got {other:?}",
                self.pos
            )),
        }
    }

    fn attr_lists(&mut self) -> Result<Vec<(String, String)>, String> {
        let mut attrs = vec![];
        while self.punct("[") {
            while !self.punct("]") {
                let k = self.id()?;
                self.expect("=")?;
                let v = self.id()?;
                attrs.push((k, v));
                if !self.punct(",") {
                    self.punct(";");
                }
            }
        }
        Ok(attrs)
    }
}

/// Parses a DOT digraph (no subgraphs or ports), rejecting anything outside
/// the grammar.
pub fn parse_dot(text: &str) -> Result<DotGraph, String> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    if is_kw(p.peek(), "strict") {
        p.pos += 1;
    }
    if !is_kw(p.peek(), "digraph") {
        return Err("not a digraph".into());
    }
    p.pos += 1;
    let name = match p.peek() {
        Some(Tok::Punct("{")) => None,
        _ => Some(p.id()?),
    };
    p.expect("{")?;
    let mut g = DotGraph {
        name,
        graph_attrs: vec![],
        nodes: vec![],
        edges: vec![],
    };
    loop {
        if p.punct("}") {
            break;
        }
        if p.punct(";") {
            continue;
        }
        if is_kw(p.peek(), "graph") || is_kw(p.peek(), "node") || is_kw(p.peek(), "edge") {
            p.pos += 1;
            p.attr_lists()?;
            continue;
        }
        let first = p.id()?;
        if p.punct("=") {
            let v = p.id()?;
            g.graph_attrs.push((first, v));
        } else if p.punct("->") {
            let mut chain = vec![first, p.id()?];
            while p.punct("->") {
                chain.push(p.id()?);
            }
            let attrs = p.attr_lists()?;
            for w in chain.windows(2) {
                g.edges.push((w[0].clone(), w[1].clone(), attrs.clone()));
            }
        } else if p.peek() == Some(&Tok::Punct("--")) {
            return Err("undirected edge in a digraph".into());
        } else {
            let attrs = p.attr_lists()?;
            g.nodes.push((first, attrs));
        }
    }
    if p.pos != p.toks.len() {
        return Err("trailing tokens after graph".into());
    }
    for (f, t, _) in &g.edges {
        for end in [f, t] {
            if !g.nodes.iter().any(|(n, _)| n == end) {
                return Err(format!("edge endpoint {end} has no node statement"));
            }
        }
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// Property bodies shared by the property tests and the acceptance suite.

/// Computation graph ⊆ transition diagram, checked on the model and on the
/// emitted DOT.
pub fn check_subgraph(case: &Case) -> Result<(), TestCaseError> {
    let m = &case.machine;
    let g = build_cmpgraph(m, &case.word_symbols(), case.head, case.threshold).unwrap();
    for n in g.nodes() {
        prop_assert!(m.has_state(n), "node {} not a state", n);
    }
    for &i in g.edges().keys() {
        prop_assert!(i < m.rules().len());
    }
    prop_assert!(g.crimson().is_subset(g.nodes()));
    prop_assert!(g.gold().is_subset(g.nodes()));

    let full = parse_dot(&render_transition_diagram(m)).map_err(TestCaseError::fail)?;
    let sub = parse_dot(&render_cmpgraph(&g)).map_err(TestCaseError::fail)?;
    for id in sub.node_ids() {
        prop_assert!(full.node_ids().contains(&id), "node {} not in diagram", id);
    }
    for (f, t, _) in &sub.edges {
        let have = full.edge_entries(f, t);
        for entry in sub.edge_entries(f, t) {
            prop_assert!(
                have.contains(&entry),
                "entry {} on {}->{} not in diagram",
                entry,
                f,
                t
            );
        }
    }
    Ok(())
}

/// Exploration agrees exactly with the naive enumerator.
pub fn check_against_naive(case: &Case) -> Result<(), TestCaseError> {
    let m = &case.machine;
    let ex = explore(m, &case.word_symbols(), case.head, case.threshold).unwrap();
    let naive = naive_enumerate(m, &case.word_refs(), case.head, case.threshold);
    prop_assert_eq!(ex.terminal_states(), &naive.terminal);
    prop_assert_eq!(ex.cutoff_states(), &naive.cutoff);
    prop_assert_eq!(ex.cutoff_count(), naive.cutoff_count);
    let edges: BTreeMap<usize, NaiveUse> = ex
        .edges()
        .iter()
        .map(|(&i, u)| {
            (
                i,
                NaiveUse {
                    last: u.last,
                    mid: u.mid,
                    cutoff: u.cutoff,
                },
            )
        })
        .collect();
    prop_assert_eq!(&edges, &naive.edges);
    prop_assert_eq!(ex.accepting_trace().map(|t| t.len()), naive.shortest_accept);

    // highlight sets of the computation graph follow from the same summary
    let g = CmpGraph::from_exploration(m, &ex);
    if naive.shortest_accept.is_none() {
        prop_assert_eq!(g.crimson(), &naive.terminal);
        prop_assert_eq!(g.gold(), &naive.cutoff);
    } else {
        prop_assert_eq!(g.crimson(), &BTreeSet::from([m.accept().to_string()]));
        prop_assert!(g.gold().is_empty());
    }
    Ok(())
}

/// Every trace the engine hands out replays step by step.
pub fn check_trace_replay(case: &Case) -> Result<(), TestCaseError> {
    let m = &case.machine;
    let ex = explore(m, &case.word_symbols(), case.head, case.threshold).unwrap();
    let mut traces = vec![ex.first_computation()];
    traces.extend(ex.accepting_trace());
    for trace in traces {
        prop_assert!(trace.len() <= case.threshold);
        let mut cfg = trace.initial.clone();
        for (i, step) in trace.steps.iter().enumerate() {
            prop_assert_eq!(step.index, i + 1);
            prop_assert_eq!(&step.before, &cfg);
            prop_assert_eq!(&m.rules()[step.rule_index], &step.rule);
            prop_assert!(fsmlab_core::applicable_rules(m, &cfg).contains(&&step.rule));
            cfg = apply_rule(&cfg, &step.rule).unwrap();
            prop_assert_eq!(&step.after, &cfg);
        }
    }
    if let Some(t) = ex.accepting_trace() {
        prop_assert_eq!(t.last().state.as_str(), m.accept());
    }
    Ok(())
}

/// Accept and Reject persist when the threshold grows.
pub fn check_monotone(case: &Case, extra: usize) -> Result<(), TestCaseError> {
    let m = &case.machine;
    let w = case.word_symbols();
    let low = apply(m, &w, case.head, case.threshold).unwrap().kind();
    let high = apply(m, &w, case.head, case.threshold + extra)
        .unwrap()
        .kind();
    match low {
        OutcomeKind::Accept | OutcomeKind::Reject => prop_assert_eq!(low, high),
        OutcomeKind::Unknown => {}
    }
    Ok(())
}
