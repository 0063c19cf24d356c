//! Bounded execution of nondeterministic machines.
//!
//! The computation tree is expanded breadth first, children in δ order. No
//! configuration deduplication happens: two computations that reach the same
//! configuration are distinct paths, and every path is bounded by the step
//! threshold. A computation halts when it enters a final state or has no
//! applicable rule; otherwise, once it has taken `threshold` steps, it is cut
//! off. Halting is checked first, so a computation whose last allowed step
//! lands in the accept state accepts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::machine::{
    applicable_rule_indices, apply_rule, Configuration, Machine, Rule, Symbol, TapeError,
};

/// Step threshold used when the caller does not pick one.
pub const DEFAULT_THRESHOLD: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid initial tape: {0}")]
    InvalidInitial(#[from] TapeError),
    #[error("initial tape holds {0}, which is not a tape symbol of this machine")]
    UnknownSymbol(String),
    #[error("the step threshold must be at least 1")]
    ZeroThreshold,
}

/// The application of one rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Step {
    /// 1-based position within the computation.
    pub index: usize,
    /// Position of `rule` in δ.
    pub rule_index: usize,
    pub rule: Rule,
    pub before: Configuration,
    pub after: Configuration,
}

/// One computation from the initial configuration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trace {
    pub initial: Configuration,
    pub steps: Vec<Step>,
}

impl Trace {
    fn replay(machine: &Machine, initial: Configuration, rule_indices: &[usize]) -> Trace {
        let mut steps = Vec::with_capacity(rule_indices.len());
        let mut current = initial.clone();
        for (i, &ri) in rule_indices.iter().enumerate() {
            let rule = &machine.rules()[ri];
            let next = apply_rule(&current, rule).expect("explored rules are applicable");
            steps.push(Step {
                index: i + 1,
                rule_index: ri,
                rule: rule.clone(),
                before: current,
                after: next.clone(),
            });
            current = next;
        }
        Trace { initial, steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Configuration after `n` steps.
    pub fn configuration(&self, n: usize) -> &Configuration {
        match n {
            0 => &self.initial,
            n => &self.steps[n - 1].after,
        }
    }

    pub fn last(&self) -> &Configuration {
        self.configuration(self.steps.len())
    }

    pub fn configurations(&self) -> impl Iterator<Item = &Configuration> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.after))
    }

    /// One configuration per line, `⊢` before every successor:
    ///
    /// ```text
    /// (S (1 0 0 0) ((@ _) (_) (_) (_)))
    ///   ⊢ (C (2 1 1 1) ((@ _ _) (_ _) (_ _) (_ _)))
    /// ```
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for (i, cfg) in self.configurations().enumerate() {
            if i > 0 {
                out.push_str("  ⊢ ");
            }
            out.push_str(&cfg.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct ConfigurationRecord<'a> {
    state: &'a str,
    heads: Vec<usize>,
    tapes: Vec<&'a [Symbol]>,
    rule: Option<&'a Rule>,
}

impl<'a> ConfigurationRecord<'a> {
    fn new(cfg: &'a Configuration, rule: Option<&'a Rule>) -> Self {
        ConfigurationRecord {
            state: &cfg.state,
            heads: cfg.heads(),
            tapes: cfg.tapes.iter().map(|t| t.cells()).collect(),
            rule,
        }
    }
}

/// Serialized as `[{ "state", "heads", "tapes", "rule" }, …]`; the first
/// configuration has `"rule": null`.
impl Serialize for Trace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.steps.len() + 1))?;
        seq.serialize_element(&ConfigurationRecord::new(&self.initial, None))?;
        for step in &self.steps {
            seq.serialize_element(&ConfigurationRecord::new(&step.after, Some(&step.rule)))?;
        }
        seq.end()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeKind {
    Accept,
    Reject,
    Unknown,
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutcomeKind::Accept => "accept",
            OutcomeKind::Reject => "reject",
            OutcomeKind::Unknown => "unknown",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Outcome {
    Accept(Trace),
    /// Every computation halted without accepting.
    Reject,
    /// No accepting computation was found and `cutoffs` computations hit the
    /// threshold.
    Unknown {
        cutoffs: usize,
    },
}

impl Outcome {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            Outcome::Accept(_) => OutcomeKind::Accept,
            Outcome::Reject => OutcomeKind::Reject,
            Outcome::Unknown { .. } => OutcomeKind::Unknown,
        }
    }
}

/// How a rule was used across all explored computations.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, Debug)]
pub struct EdgeUse {
    /// Last step of a halting computation.
    pub last: bool,
    /// Step followed by further steps.
    pub mid: bool,
    /// Last step of a cut-off computation.
    pub cutoff: bool,
}

/// Summary of the bounded computation tree.
#[derive(Clone, Debug)]
pub struct Exploration {
    threshold: usize,
    edges: BTreeMap<usize, EdgeUse>,
    terminal_states: BTreeSet<String>,
    cutoff_states: BTreeSet<String>,
    accepting: Option<Trace>,
    cutoffs: usize,
    halted: usize,
    first_computation: Trace,
}

impl Exploration {
    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// Used rules keyed by their index in δ.
    pub fn edges(&self) -> &BTreeMap<usize, EdgeUse> {
        &self.edges
    }

    /// States in which some computation halted.
    pub fn terminal_states(&self) -> &BTreeSet<String> {
        &self.terminal_states
    }

    /// States in which some computation was cut off.
    pub fn cutoff_states(&self) -> &BTreeSet<String> {
        &self.cutoff_states
    }

    /// The first accepting computation in breadth-first order (a shortest one).
    pub fn accepting_trace(&self) -> Option<&Trace> {
        self.accepting.as_ref()
    }

    /// Number of cut-off computations.
    pub fn cutoff_count(&self) -> usize {
        self.cutoffs
    }

    /// Number of halted computations.
    pub fn halted_count(&self) -> usize {
        self.halted
    }

    /// The first computation, in breadth-first order, to halt or be cut off.
    pub fn first_computation(&self) -> &Trace {
        &self.first_computation
    }

    pub fn outcome(&self) -> Outcome {
        match (&self.accepting, self.cutoffs) {
            (Some(t), _) => Outcome::Accept(t.clone()),
            (None, 0) => Outcome::Reject,
            (None, k) => Outcome::Unknown { cutoffs: k },
        }
    }
}

pub(crate) fn initial_configuration(
    machine: &Machine,
    tape0: &[Symbol],
    head0: usize,
) -> Result<Configuration, EngineError> {
    if let Some(bad) = tape0.iter().find(|s| !machine.is_tape_symbol(s)) {
        return Err(EngineError::UnknownSymbol(bad.to_string()));
    }
    Ok(Configuration::initial(machine, tape0.to_vec(), head0)?)
}

const ROOT: usize = usize::MAX;

/// Breadth-first walk of the computation tree. With `stop_at_accept` the walk
/// ends at the first accepting computation, leaving the other summaries
/// partial; without it, or when nothing accepts, the tree is covered fully.
pub(crate) fn search(
    machine: &Machine,
    tape0: &[Symbol],
    head0: usize,
    threshold: usize,
    stop_at_accept: bool,
) -> Result<Exploration, EngineError> {
    if threshold == 0 {
        return Err(EngineError::ZeroThreshold);
    }
    let initial = initial_configuration(machine, tape0, head0)?;

    // (parent node, rule index) per tree node; node 0 is the root.
    let mut arena: Vec<(usize, usize)> = vec![(ROOT, ROOT)];
    let mut level: Vec<(usize, Configuration)> = vec![(0, initial.clone())];
    let mut edges: BTreeMap<usize, EdgeUse> = BTreeMap::new();
    let mut terminal_states = BTreeSet::new();
    let mut cutoff_states = BTreeSet::new();
    let mut accepting = None;
    let mut first = None;
    let (mut cutoffs, mut halted) = (0, 0);

    'levels: for depth in 0..=threshold {
        let mut next = Vec::new();
        for (node, cfg) in level {
            let incoming = arena[node].1;
            let rules = applicable_rule_indices(machine, &cfg);
            if rules.is_empty() {
                halted += 1;
                if incoming != ROOT {
                    edges.entry(incoming).or_default().last = true;
                }
                first.get_or_insert(node);
                let accepted = cfg.state == machine.accept() && accepting.is_none();
                terminal_states.insert(cfg.state);
                if accepted {
                    accepting = Some(node);
                    if stop_at_accept {
                        break 'levels;
                    }
                }
                continue;
            }
            if depth == threshold {
                cutoffs += 1;
                // threshold >= 1, so a cut-off node always has an incoming rule
                edges.entry(incoming).or_default().cutoff = true;
                first.get_or_insert(node);
                cutoff_states.insert(cfg.state);
                continue;
            }
            if incoming != ROOT {
                edges.entry(incoming).or_default().mid = true;
            }
            for ri in rules {
                let child = apply_rule(&cfg, &machine.rules()[ri])
                    .expect("applicable rules never violate the left edge");
                arena.push((node, ri));
                next.push((arena.len() - 1, child));
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }

    let path = |mut node: usize| {
        let mut rules = Vec::new();
        while arena[node].0 != ROOT {
            rules.push(arena[node].1);
            node = arena[node].0;
        }
        rules.reverse();
        rules
    };
    let accepting = accepting.map(|n| Trace::replay(machine, initial.clone(), &path(n)));
    let first_computation = Trace::replay(
        machine,
        initial.clone(),
        &path(first.expect("a bounded tree has at least one leaf")),
    );

    Ok(Exploration {
        threshold,
        edges,
        terminal_states,
        cutoff_states,
        accepting,
        cutoffs,
        halted,
        first_computation,
    })
}

/// Explores every computation of `machine` on `tape0` (head at `head0`) up to
/// `threshold` steps each.
pub fn explore(
    machine: &Machine,
    tape0: &[Symbol],
    head0: usize,
    threshold: usize,
) -> Result<Exploration, EngineError> {
    search(machine, tape0, head0, threshold, false)
}

/// Accept with the breadth-first-first accepting trace, Reject when every
/// computation halts without accepting, Unknown when some were cut off.
pub fn apply(
    machine: &Machine,
    tape0: &[Symbol],
    head0: usize,
    threshold: usize,
) -> Result<Outcome, EngineError> {
    Ok(search(machine, tape0, head0, threshold, true)?.outcome())
}

/// The accepting trace, if any computation accepts within the threshold.
pub fn trace_accepting(
    machine: &Machine,
    tape0: &[Symbol],
    head0: usize,
    threshold: usize,
) -> Result<Option<Trace>, EngineError> {
    Ok(search(machine, tape0, head0, threshold, true)?.accepting)
}

/// An outcome plus one concrete computation to show for it: the accepting
/// trace when there is one, otherwise the first computation to halt or be cut
/// off.
#[derive(Clone, Debug)]
pub struct Run {
    pub outcome: Outcome,
    pub computation: Trace,
}

pub fn run(
    machine: &Machine,
    tape0: &[Symbol],
    head0: usize,
    threshold: usize,
) -> Result<Run, EngineError> {
    let exploration = search(machine, tape0, head0, threshold, true)?;
    let outcome = exploration.outcome();
    let computation = match exploration.accepting {
        Some(t) => t,
        None => exploration.first_computation,
    };
    Ok(Run {
        outcome,
        computation,
    })
}
