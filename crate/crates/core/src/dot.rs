//! Shared DOT emission for transition diagrams and computation graphs.

use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use crate::machine::{Machine, Rule};

const KEYWORDS: [&str; 6] = ["node", "edge", "graph", "digraph", "subgraph", "strict"];

/// Entries on one drawn edge are stacked one per line from this many on.
pub(crate) const STACK_AT: usize = 3;

/// Double-quoted DOT string; real newlines become `\n` line breaks.
pub(crate) fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Unique DOT identifiers for state names.
pub(crate) struct NodeIds(HashMap<String, String>);

impl NodeIds {
    pub(crate) fn new(states: &[String]) -> Self {
        let mut taken = HashSet::new();
        let mut map = HashMap::with_capacity(states.len());
        for state in states {
            let mut base: String = state
                .chars()
                .map(|c| {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        c
                    } else {
                        '_'
                    }
                })
                .collect();
            if base.is_empty()
                || base.starts_with(|c: char| c.is_ascii_digit())
                || KEYWORDS.contains(&base.to_ascii_lowercase().as_str())
            {
                base.insert_str(0, "s_");
            }
            let mut id = base.clone();
            let mut n = 2;
            while !taken.insert(id.clone()) {
                id = format!("{base}_{n}");
                n += 1;
            }
            map.insert(state.clone(), id);
        }
        NodeIds(map)
    }

    pub(crate) fn get(&self, state: &str) -> &str {
        &self.0[state]
    }
}

/// Visual attributes of one node.
#[derive(Default)]
pub(crate) struct NodeStyle {
    pub shape: &'static str,
    pub fill: Option<&'static str>,
    pub outline: Option<&'static str>,
}

/// Shape by state variety: accept state double octagon, other finals double
/// circle, everything else circle.
pub(crate) fn base_shape(machine: &Machine, state: &str) -> &'static str {
    if state == machine.accept() {
        "doubleoctagon"
    } else if machine.is_final(state) {
        "doublecircle"
    } else {
        "circle"
    }
}

/// `[(r0 … rn-1) (a0 … an-1)]`
pub(crate) fn label_entry(rule: &Rule) -> String {
    format!("[{} {}]", rule.reads_text(), rule.actions_text())
}

pub(crate) fn edge_label(rules: &[&Rule]) -> String {
    let entries: Vec<String> = rules.iter().map(|r| label_entry(r)).collect();
    let sep = if entries.len() >= STACK_AT {
        ",\n"
    } else {
        ", "
    };
    entries.join(sep)
}

/// Emits a digraph over `states` (already in K order) and the rules at
/// `rule_indices` (ascending), one drawn edge per distinct (from, to) pair.
pub(crate) fn render(
    machine: &Machine,
    states: &[&str],
    rule_indices: &[usize],
    style: impl Fn(&str) -> NodeStyle,
    graph_label: Option<&str>,
) -> String {
    let ids = NodeIds::new(machine.states());
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(machine.name())).unwrap();
    out.push_str("    rankdir=LR;\n");
    if let Some(label) = graph_label {
        writeln!(out, "    label={};", quote(label)).unwrap();
        out.push_str("    labelloc=b;\n");
    }
    for &state in states {
        let s = style(state);
        write!(
            out,
            "    {} [label={}, shape={}",
            ids.get(state),
            quote(state),
            s.shape
        )
        .unwrap();
        if let Some(fill) = s.fill {
            write!(out, ", style=filled, fillcolor={fill}").unwrap();
        }
        if let Some(outline) = s.outline {
            write!(out, ", color={outline}, penwidth=3").unwrap();
        }
        out.push_str("];\n");
    }

    let mut groups: Vec<((&str, &str), Vec<&Rule>)> = Vec::new();
    for &i in rule_indices {
        let rule = &machine.rules()[i];
        let key = (rule.from.as_str(), rule.to.as_str());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, entries)) => entries.push(rule),
            None => groups.push((key, vec![rule])),
        }
    }
    for ((from, to), rules) in &groups {
        writeln!(
            out,
            "    {} -> {} [label={}, color=black];",
            ids.get(from),
            ids.get(to),
            quote(&edge_label(rules))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
