//! Argument parsing and the subcommands.
//!
//! Exit codes: 0 accept or success, 1 reject, 2 unknown (cut off),
//! 3 invalid machine or input, 4 usage or I/O error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::{Command as Process, ExitCode};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use fsmlab_core::compgraph::{build_cmpgraph, render_cmpgraph};
use fsmlab_core::diagram::{render_subdiagram, Subset};
use fsmlab_core::engine::{run, EngineError, OutcomeKind, DEFAULT_THRESHOLD};
use fsmlab_core::{parse_machine, parse_word, ExternalOracle, LoadError, Machine};

use crate::server;

#[derive(Parser, Debug)]
#[command(
    name = "fsmlab",
    version,
    about = "Run, trace and draw multitape Turing machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a machine file and list every problem found.
    Validate { machine: PathBuf },
    /// Print accept, reject or unknown for a word.
    Apply(RunArgs),
    /// Print the accepting computation, one configuration per line.
    Trace {
        #[command(flatten)]
        run: RunArgs,
        /// Print the computation as JSON.
        #[arg(long)]
        json: bool,
        /// Without an accepting computation, print the first one to halt or
        /// be cut off instead of just the outcome.
        #[arg(long)]
        maximal: bool,
    },
    /// Write the transition diagram, or a phase diagram, as DOT.
    Graph {
        machine: PathBuf,
        /// Keep only these states (comma separated).
        #[arg(long, value_delimiter = ',')]
        states: Option<Vec<String>>,
        /// Keep only these rules, as 0-based positions in the rule list
        /// (comma separated). Defaults to every rule between kept states.
        #[arg(long = "from-rules", value_delimiter = ',')]
        from_rules: Option<Vec<usize>>,
        /// State to fill green; defaults to the machine's start state when kept.
        #[arg(long)]
        start: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Write the computation graph for a word as DOT.
    Cmpgraph {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Serve the step-through session API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Command answering invariant queries, one JSON object per line.
        #[arg(long)]
        oracle: Option<String>,
        /// Default step threshold for new sessions.
        #[arg(long, env = "FSMLAB_THRESHOLD", default_value_t = DEFAULT_THRESHOLD)]
        threshold: usize,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    machine: PathBuf,
    /// Initial contents of tape 0 as whitespace-separated symbols, e.g. "@ _ a b".
    #[arg(long, allow_hyphen_values = true)]
    word: String,
    /// Initial head position on tape 0.
    #[arg(long, default_value_t = 0)]
    head: usize,
    /// Maximum number of steps per computation.
    #[arg(long, env = "FSMLAB_THRESHOLD", default_value_t = DEFAULT_THRESHOLD)]
    threshold: usize,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write DOT here instead of standard output.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Also render the DOT file with graphviz in this format (svg, png, pdf).
    #[arg(long, requires = "output")]
    render: Option<String>,
}

enum Failure {
    Invalid(Vec<String>),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 3,
            Failure::Usage(_) => 4,
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::Invalid(vec![e.to_string()])
    }
}

fn outcome_code(kind: OutcomeKind) -> u8 {
    match kind {
        OutcomeKind::Accept => 0,
        OutcomeKind::Reject => 1,
        OutcomeKind::Unknown => 2,
    }
}

pub fn main<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            let lines = match &failure {
                Failure::Invalid(lines) => lines.clone(),
                Failure::Usage(msg) => vec![format!("error: {msg}")],
            };
            let mut stderr = std::io::stderr().lock();
            for line in lines {
                let _ = writeln!(stderr, "{line}");
            }
            ExitCode::from(failure.code())
        }
    }
}

fn load(path: &Path) -> Result<Machine, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_machine(&text).map_err(|e| match e {
        LoadError::Malformed(err) => Failure::Invalid(vec![format!("{}: {err}", path.display())]),
        LoadError::Invalid(diags) => {
            Failure::Invalid(diags.iter().map(ToString::to_string).collect())
        }
    })
}

fn execute(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Validate { machine } => {
            let m = load(&machine)?;
            println!(
                "{}: ok ({} states, {} tapes, {} rules)",
                m.name(),
                m.states().len(),
                m.num_tapes(),
                m.rules().len()
            );
            Ok(0)
        }
        Command::Apply(args) => {
            let m = load(&args.machine)?;
            let r = run(&m, &parse_word(&args.word), args.head, args.threshold)?;
            println!("{}", r.outcome.kind());
            Ok(outcome_code(r.outcome.kind()))
        }
        Command::Trace {
            run: args,
            json,
            maximal,
        } => {
            let m = load(&args.machine)?;
            let r = run(&m, &parse_word(&args.word), args.head, args.threshold)?;
            let kind = r.outcome.kind();
            if kind != OutcomeKind::Accept && !maximal {
                println!("{kind}");
            } else if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&r.computation).expect("traces serialize")
                );
            } else {
                print!("{}", r.computation.listing());
            }
            Ok(outcome_code(kind))
        }
        Command::Graph {
            machine,
            states,
            from_rules,
            start,
            out,
        } => {
            let m = load(&machine)?;
            let subset = phase_subset(&m, states, from_rules, start)?;
            let dot = render_subdiagram(&m, &subset).map_err(|e| Failure::Usage(e.to_string()))?;
            emit(&dot, &out)?;
            Ok(0)
        }
        Command::Cmpgraph { run: args, out } => {
            let m = load(&args.machine)?;
            let g = build_cmpgraph(&m, &parse_word(&args.word), args.head, args.threshold)?;
            emit(&render_cmpgraph(&g), &out)?;
            if out.output.is_some() {
                println!("{}", g.message());
            }
            Ok(outcome_code(g.outcome()))
        }
        Command::Serve {
            port,
            host,
            oracle,
            threshold,
        } => {
            let oracle = oracle
                .map(|c| ExternalOracle::from_command_line(&c))
                .transpose()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let config = server::Config {
                oracle,
                threshold,
                idle: Duration::from_secs(30 * 60),
            };
            serve(SocketAddr::new(host, port), config)?;
            Ok(0)
        }
    }
}

fn phase_subset(
    m: &Machine,
    states: Option<Vec<String>>,
    rules: Option<Vec<usize>>,
    start: Option<String>,
) -> Result<Subset, Failure> {
    let mut subset = match (states, rules) {
        (None, None) => Subset::full(m),
        (Some(states), None) => Subset::induced(m, &states, None),
        (states, Some(rules)) => {
            let mut kept: BTreeSet<String> = states.unwrap_or_default().into_iter().collect();
            let explicit = !kept.is_empty();
            for &i in &rules {
                let rule = m
                    .rules()
                    .get(i)
                    .ok_or_else(|| Failure::Usage(format!("rule index {i} is out of range")))?;
                if !explicit {
                    kept.insert(rule.from.clone());
                    kept.insert(rule.to.clone());
                }
            }
            if !explicit {
                kept.extend(start.clone());
            }
            Subset {
                states: kept,
                rules: rules.into_iter().collect(),
                start: None,
            }
        }
    };
    subset.start = match start {
        Some(s) => Some(s),
        None => subset
            .states
            .contains(m.start())
            .then(|| m.start().to_string()),
    };
    Ok(subset)
}

fn emit(dot: &str, out: &OutputArgs) -> Result<(), Failure> {
    let Some(path) = &out.output else {
        print!("{dot}");
        return Ok(());
    };
    std::fs::write(path, dot)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    if let Some(format) = &out.render {
        let image = path.with_extension(format);
        let status = Process::new("dot")
            .arg(format!("-T{format}"))
            .arg(path)
            .arg("-o")
            .arg(&image)
            .status();
        match status {
            Ok(s) if s.success() => {}
            Ok(s) => eprintln!("warning: dot exited with {s}; only the DOT file was written"),
            Err(_) => eprintln!("warning: graphviz `dot` not found; only the DOT file was written"),
        }
    }
    Ok(())
}

fn serve(addr: SocketAddr, config: server::Config) -> Result<(), Failure> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Usage(e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Failure::Usage(format!("cannot listen on {addr}: {e}")))?;
        let bound = listener
            .local_addr()
            .map_err(|e| Failure::Usage(e.to_string()))?;
        eprintln!("listening on http://{bound}");
        axum::serve(listener, server::router(config))
            .await
            .map_err(|e| Failure::Usage(e.to_string()))
    })
}
