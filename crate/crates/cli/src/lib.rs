//! Command-line front end and step-through HTTP service for `fsmlab-core`.

pub mod cli;
pub mod server;
