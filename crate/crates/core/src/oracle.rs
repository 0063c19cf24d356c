//! Per-state invariant predicates.
//!
//! In library use a predicate is any `Fn(&Configuration) -> bool`. Across a
//! process boundary, [`ExternalOracle`] runs a command that reads one JSON
//! object per line on stdin,
//! `{ "state": str, "tapes": [{ "head": int, "cells": [str] }] }`,
//! and answers each with one line `{ "holds": bool }`.

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{Configuration, Symbol};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("invariant oracle could not be run: {0}")]
    Io(#[from] std::io::Error),
    #[error("invariant oracle gave an unreadable reply {line:?}: {source}")]
    BadReply {
        line: String,
        source: serde_json::Error,
    },
    #[error("invariant oracle answered {got} of {want} queries")]
    MissingReplies { got: usize, want: usize },
    #[error("invariant oracle command is empty")]
    EmptyCommand,
}

pub trait InvariantOracle {
    fn holds(&self, cfg: &Configuration) -> Result<bool, OracleError>;

    /// Verdicts for a whole computation.
    fn holds_all(&self, cfgs: &[&Configuration]) -> Result<Vec<bool>, OracleError> {
        cfgs.iter().map(|c| self.holds(c)).collect()
    }
}

impl<F> InvariantOracle for F
where
    F: Fn(&Configuration) -> bool,
{
    fn holds(&self, cfg: &Configuration) -> Result<bool, OracleError> {
        Ok(self(cfg))
    }
}

#[derive(Serialize)]
struct TapeQuery<'a> {
    head: usize,
    cells: &'a [Symbol],
}

#[derive(Serialize)]
struct Query<'a> {
    state: &'a str,
    tapes: Vec<TapeQuery<'a>>,
}

#[derive(Deserialize)]
struct Reply {
    holds: bool,
}

fn query_line(cfg: &Configuration) -> String {
    let q = Query {
        state: &cfg.state,
        tapes: cfg
            .tapes
            .iter()
            .map(|t| TapeQuery {
                head: t.head(),
                cells: t.cells(),
            })
            .collect(),
    };
    serde_json::to_string(&q).expect("queries always serialize")
}

/// An oracle subprocess, started once per batch of queries.
#[derive(Clone, Debug)]
pub struct ExternalOracle {
    program: String,
    args: Vec<String>,
}

impl ExternalOracle {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        ExternalOracle {
            program: program.into(),
            args,
        }
    }

    /// Splits `command` on whitespace; no shell quoting.
    pub fn from_command_line(command: &str) -> Result<Self, OracleError> {
        let mut parts = command.split_whitespace().map(str::to_string);
        let program = parts.next().ok_or(OracleError::EmptyCommand)?;
        Ok(ExternalOracle::new(program, parts.collect()))
    }
}

impl InvariantOracle for ExternalOracle {
    fn holds(&self, cfg: &Configuration) -> Result<bool, OracleError> {
        Ok(self.holds_all(&[cfg])?[0])
    }

    fn holds_all(&self, cfgs: &[&Configuration]) -> Result<Vec<bool>, OracleError> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let mut stdin = child.stdin.take().expect("stdin is piped");
        let input: String = cfgs.iter().map(|c| query_line(c) + "\n").collect();
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));

        let stdout = child.stdout.take().expect("stdout is piped");
        let mut verdicts = Vec::with_capacity(cfgs.len());
        for line in BufReader::new(stdout).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let reply: Reply = serde_json::from_str(&line)
                .map_err(|source| OracleError::BadReply { line, source })?;
            verdicts.push(reply.holds);
            if verdicts.len() == cfgs.len() {
                break;
            }
        }
        // a broken pipe just means the oracle stopped reading early
        let _ = writer.join();
        let _ = child.wait();
        if verdicts.len() != cfgs.len() {
            return Err(OracleError::MissingReplies {
                got: verdicts.len(),
                want: cfgs.len(),
            });
        }
        Ok(verdicts)
    }
}
