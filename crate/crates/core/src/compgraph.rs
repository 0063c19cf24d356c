//! Computation graphs: state-level summaries of the computation tree.
//!
//! Without an accepting computation the graph holds every state and rule
//! used by any computation; states where a computation halted get a crimson
//! outline and states where one was cut off get a gold fill. With one, the
//! graph is trimmed to the first accepting computation and only the accept
//! state is crimson.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::dot::{self, NodeStyle};
use crate::engine::{search, EdgeUse, EngineError, Exploration, OutcomeKind, Trace};
use crate::machine::{Machine, Symbol};

/// How a used rule is drawn.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClass {
    /// Regular step.
    R,
    /// Last step of a halting computation.
    Sp,
    /// Last step of a cut-off computation.
    Co,
    /// Sp in one computation and Co in another.
    CoSp,
}

pub fn classify_edge(usage: EdgeUse) -> EdgeClass {
    match (usage.last, usage.cutoff) {
        (true, true) => EdgeClass::CoSp,
        (false, true) => EdgeClass::Co,
        (true, false) => EdgeClass::Sp,
        (false, false) => EdgeClass::R,
    }
}

pub const ACCEPT_MESSAGE: &str = "Word accepted.";
pub const REJECT_MESSAGE: &str = "Word rejected.";

pub fn cutoff_message(threshold: usize) -> String {
    format!("No accepting computation found; computations cut off at {threshold} steps.")
}

pub fn message_for(outcome: OutcomeKind, threshold: usize) -> String {
    match outcome {
        OutcomeKind::Accept => ACCEPT_MESSAGE.to_string(),
        OutcomeKind::Reject => REJECT_MESSAGE.to_string(),
        OutcomeKind::Unknown => cutoff_message(threshold),
    }
}

#[derive(Clone, Debug)]
pub struct CmpGraph<'m> {
    machine: &'m Machine,
    nodes: BTreeSet<String>,
    edges: BTreeMap<usize, EdgeClass>,
    crimson: BTreeSet<String>,
    gold: BTreeSet<String>,
    outcome: OutcomeKind,
    threshold: usize,
    message: String,
    accepting: Option<Trace>,
}

impl<'m> CmpGraph<'m> {
    /// Builds the graph from an exploration. An exploration that was stopped
    /// early is fine as long as it stopped on an accepting computation.
    pub fn from_exploration(machine: &'m Machine, exploration: &Exploration) -> Self {
        let threshold = exploration.threshold();
        let mut nodes = BTreeSet::new();
        nodes.insert(machine.start().to_string());
        let mut edges = BTreeMap::new();

        if let Some(trace) = exploration.accepting_trace() {
            let mut usage: BTreeMap<usize, EdgeUse> = BTreeMap::new();
            for (i, step) in trace.steps.iter().enumerate() {
                let u = usage.entry(step.rule_index).or_default();
                if i + 1 == trace.steps.len() {
                    u.last = true;
                } else {
                    u.mid = true;
                }
                nodes.insert(step.rule.to.clone());
            }
            edges.extend(usage.into_iter().map(|(i, u)| (i, classify_edge(u))));
            return CmpGraph {
                machine,
                nodes,
                edges,
                crimson: BTreeSet::from([machine.accept().to_string()]),
                gold: BTreeSet::new(),
                outcome: OutcomeKind::Accept,
                threshold,
                message: ACCEPT_MESSAGE.to_string(),
                accepting: Some(trace.clone()),
            };
        }

        for (&i, &usage) in exploration.edges() {
            let rule = &machine.rules()[i];
            nodes.insert(rule.from.clone());
            nodes.insert(rule.to.clone());
            edges.insert(i, classify_edge(usage));
        }
        let crimson = exploration.terminal_states().clone();
        let gold = exploration.cutoff_states().clone();
        let outcome = if gold.is_empty() {
            OutcomeKind::Reject
        } else {
            OutcomeKind::Unknown
        };
        CmpGraph {
            machine,
            nodes,
            edges,
            crimson,
            gold,
            outcome,
            threshold,
            message: message_for(outcome, threshold),
            accepting: None,
        }
    }

    pub fn machine(&self) -> &Machine {
        self.machine
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    /// Used rules, by δ index.
    pub fn edges(&self) -> &BTreeMap<usize, EdgeClass> {
        &self.edges
    }

    pub fn crimson(&self) -> &BTreeSet<String> {
        &self.crimson
    }

    pub fn gold(&self) -> &BTreeSet<String> {
        &self.gold
    }

    pub fn outcome(&self) -> OutcomeKind {
        self.outcome
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn message(&self) -> &str {
        &self.message
    }

    /// The computation the graph was trimmed to, on accept.
    pub fn accepting_trace(&self) -> Option<&Trace> {
        self.accepting.as_ref()
    }
}

pub fn build_cmpgraph<'m>(
    machine: &'m Machine,
    tape0: &[Symbol],
    head0: usize,
    threshold: usize,
) -> Result<CmpGraph<'m>, EngineError> {
    let exploration = search(machine, tape0, head0, threshold, true)?;
    Ok(CmpGraph::from_exploration(machine, &exploration))
}

/// DOT text: diagram conventions plus crimson outlines, gold fills (over the
/// start state's green) and the message as the graph label.
pub fn render_cmpgraph(graph: &CmpGraph<'_>) -> String {
    let machine = graph.machine;
    let states: Vec<&str> = machine
        .states()
        .iter()
        .filter(|s| graph.nodes.contains(*s))
        .map(String::as_str)
        .collect();
    let rules: Vec<usize> = graph.edges.keys().copied().collect();
    dot::render(
        machine,
        &states,
        &rules,
        |state| NodeStyle {
            shape: dot::base_shape(machine, state),
            fill: if graph.gold.contains(state) {
                Some("gold")
            } else if state == machine.start() {
                Some("green")
            } else {
                None
            },
            outline: graph.crimson.contains(state).then_some("crimson"),
        },
        Some(&graph.message),
    )
}
