//! Transition diagrams.
//!
//! Start state filled green, accept state a double octagon, other final
//! states double circles, ordinary states circles. One black edge per
//! distinct (from, to) pair, labelled with one `[(reads) (actions)]` entry
//! per rule.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::dot::{self, NodeStyle};
use crate::machine::{Machine, Rule};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StateVariety {
    AcceptingFinal,
    RejectingFinal,
    Ordinary,
}

impl StateVariety {
    pub fn of(machine: &Machine, state: &str) -> Self {
        if state == machine.accept() {
            StateVariety::AcceptingFinal
        } else if machine.is_final(state) {
            StateVariety::RejectingFinal
        } else {
            StateVariety::Ordinary
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("{0} is not a state of the machine")]
    UnknownState(String),
    #[error("rule index {0} is out of range")]
    UnknownRule(usize),
    #[error("rule {rule} uses state {state}, which is not kept")]
    SubsetViolation { rule: String, state: String },
    #[error("highlighted start {0} is not among the kept states")]
    StartNotKept(String),
}

/// The states and rules kept in a phase diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subset {
    pub states: BTreeSet<String>,
    /// Indices into δ.
    pub rules: BTreeSet<usize>,
    /// State to fill green, if any.
    pub start: Option<String>,
}

impl Subset {
    /// Everything, with the machine's start highlighted.
    pub fn full(machine: &Machine) -> Self {
        Subset {
            states: machine.states().iter().cloned().collect(),
            rules: (0..machine.rules().len()).collect(),
            start: Some(machine.start().to_string()),
        }
    }

    /// `states` plus every rule whose endpoints both lie inside them.
    pub fn induced<S: AsRef<str>>(machine: &Machine, states: &[S], start: Option<&str>) -> Self {
        let states: BTreeSet<String> = states.iter().map(|s| s.as_ref().to_string()).collect();
        Self::filtered(machine, states, |_| true, start)
    }

    /// `states` plus the rules inside them that satisfy `keep`.
    pub fn filtered(
        machine: &Machine,
        states: BTreeSet<String>,
        keep: impl Fn(&Rule) -> bool,
        start: Option<&str>,
    ) -> Self {
        let rules = machine
            .rules()
            .iter()
            .enumerate()
            .filter(|(_, r)| states.contains(&r.from) && states.contains(&r.to) && keep(r))
            .map(|(i, _)| i)
            .collect();
        Subset {
            states,
            rules,
            start: start.map(str::to_string),
        }
    }
}

/// DOT text for the whole machine.
pub fn render_transition_diagram(machine: &Machine) -> String {
    render_subdiagram(machine, &Subset::full(machine)).expect("the full subset is consistent")
}

/// DOT text for a phase diagram: only the kept states and rules, with the
/// chosen state filled green.
pub fn render_subdiagram(machine: &Machine, subset: &Subset) -> Result<String, DiagramError> {
    for state in &subset.states {
        if !machine.has_state(state) {
            return Err(DiagramError::UnknownState(state.clone()));
        }
    }
    for &i in &subset.rules {
        let rule = machine.rules().get(i).ok_or(DiagramError::UnknownRule(i))?;
        for end in [&rule.from, &rule.to] {
            if !subset.states.contains(end) {
                return Err(DiagramError::SubsetViolation {
                    rule: rule.to_string(),
                    state: end.clone(),
                });
            }
        }
    }
    if let Some(start) = &subset.start {
        if !subset.states.contains(start) {
            return Err(DiagramError::StartNotKept(start.clone()));
        }
    }

    let states: Vec<&str> = machine
        .states()
        .iter()
        .filter(|s| subset.states.contains(*s))
        .map(String::as_str)
        .collect();
    let rules: Vec<usize> = subset.rules.iter().copied().collect();
    let start = subset.start.as_deref();
    Ok(dot::render(
        machine,
        &states,
        &rules,
        |state| NodeStyle {
            shape: dot::base_shape(machine, state),
            fill: (Some(state) == start).then_some("green"),
            outline: None,
        },
        None,
    ))
}
