//! Step-through sessions over one computation.
//!
//! A session holds the accepting computation when there is one, otherwise
//! the first computation (breadth-first) to halt or be cut off, so rejected
//! words can be inspected too. Invariant verdicts are computed for every
//! position up front.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::compgraph::message_for;
use crate::engine::{run, EngineError, Outcome, OutcomeKind, Trace};
use crate::machine::{Machine, Rule, Symbol};
use crate::oracle::InvariantOracle;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Unavailable,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct TapeView {
    pub head: usize,
    pub cells: Vec<Symbol>,
}

/// What the stepper shows at one position.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepView {
    pub step: usize,
    /// Number of steps in the computation.
    pub steps: usize,
    pub prev_state: Option<String>,
    pub curr_state: String,
    pub last_rule: Option<Rule>,
    pub tapes: Vec<TapeView>,
    pub invariant: Verdict,
    /// The step request could not move the cursor.
    pub at_boundary: bool,
}

#[derive(Clone, Debug)]
pub struct Session {
    machine: Arc<Machine>,
    trace: Trace,
    outcome: Outcome,
    threshold: usize,
    verdicts: Vec<Verdict>,
    cursor: usize,
}

impl Session {
    pub fn create(
        machine: Arc<Machine>,
        tape0: &[Symbol],
        head0: usize,
        threshold: usize,
        oracle: Option<&dyn InvariantOracle>,
    ) -> Result<Session, EngineError> {
        let run = run(&machine, tape0, head0, threshold)?;
        let trace = run.computation;
        let verdicts = match oracle {
            None => vec![Verdict::Unavailable; trace.len() + 1],
            Some(oracle) => {
                let cfgs: Vec<_> = trace.configurations().collect();
                match oracle.holds_all(&cfgs) {
                    Ok(v) => v
                        .into_iter()
                        .map(|h| if h { Verdict::Holds } else { Verdict::Fails })
                        .collect(),
                    Err(_) => vec![Verdict::Unavailable; trace.len() + 1],
                }
            }
        };
        Ok(Session {
            machine,
            trace,
            outcome: run.outcome,
            threshold,
            verdicts,
            cursor: 0,
        })
    }

    pub fn machine(&self) -> &Arc<Machine> {
        &self.machine
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn outcome(&self) -> &Outcome {
        &self.outcome
    }

    pub fn outcome_kind(&self) -> OutcomeKind {
        self.outcome.kind()
    }

    /// Same wording as the computation graph.
    pub fn message(&self) -> String {
        message_for(self.outcome.kind(), self.threshold)
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn step(&mut self, direction: Direction) -> StepView {
        let target = match direction {
            Direction::Forward if self.cursor < self.trace.len() => Some(self.cursor + 1),
            Direction::Backward if self.cursor > 0 => Some(self.cursor - 1),
            _ => None,
        };
        match target {
            Some(c) => {
                self.cursor = c;
                self.view_at(c, false)
            }
            None => self.view_at(self.cursor, true),
        }
    }

    pub fn view(&self) -> StepView {
        self.view_at(self.cursor, false)
    }

    fn view_at(&self, cursor: usize, at_boundary: bool) -> StepView {
        let cfg = self.trace.configuration(cursor);
        let (prev_state, last_rule) = match cursor {
            0 => (None, None),
            n => {
                let step = &self.trace.steps[n - 1];
                (Some(step.before.state.clone()), Some(step.rule.clone()))
            }
        };
        StepView {
            step: cursor,
            steps: self.trace.len(),
            prev_state,
            curr_state: cfg.state.clone(),
            last_rule,
            tapes: cfg
                .tapes
                .iter()
                .map(|t| TapeView {
                    head: t.head(),
                    cells: t.cells().to_vec(),
                })
                .collect(),
            invariant: self.verdicts[cursor],
            at_boundary,
        }
    }
}
