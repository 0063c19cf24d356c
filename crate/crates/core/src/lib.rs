//! Nondeterministic multitape Turing machines.
//!
//! * [`machine`]: definitions, validation and single steps.
//! * [`engine`]: bounded breadth-first exploration of the computation tree.
//! * [`diagram`]: DOT transition diagrams and phase subdiagrams.
//! * [`compgraph`]: computation graphs with terminal/cut-off highlighting.
//! * [`session`]: forward/backward stepping over one computation.

pub mod compgraph;
pub mod diagram;
mod dot;
pub mod engine;
pub mod file;
pub mod fixtures;
pub mod machine;
pub mod oracle;
pub mod session;

pub use compgraph::{build_cmpgraph, classify_edge, render_cmpgraph, CmpGraph, EdgeClass};
pub use diagram::{render_subdiagram, render_transition_diagram, DiagramError, Subset};
pub use engine::{
    apply, explore, run, trace_accepting, EdgeUse, EngineError, Exploration, Outcome, OutcomeKind,
    Run, Step, Trace, DEFAULT_THRESHOLD,
};
pub use file::{machine_from_value, parse_machine, LoadError, MachineFile};
pub use machine::{
    applicable_rules, apply_rule, parse_word, read_symbols, validate_machine, Action,
    Configuration, Diagnostic, DiagnosticCode, Machine, Rule, Symbol, Tape,
};
pub use oracle::{ExternalOracle, InvariantOracle, OracleError};
pub use session::{Direction, Session, StepView, Verdict};
