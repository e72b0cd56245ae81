//! Command-line front end: `validate`, `bisim`, `check` and `distinguish`
//! over `.nlmp` model files, each printing a deterministic JSON report.

pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use nlmp_core::bisim::{
    compare_bisims, largest_state, largest_traditional, smallest_stable_sigma, BisimReport,
};
use nlmp_core::logic::{distinguish, eval_state, satisfies, Distinction, StateFormula};
use nlmp_core::text::{parse_formula, parse_model, ModelDocument};
use nlmp_core::{Error, Nlmp};
use serde_json::{json, Value};

use report::{exit, CommandEcho, ErrorInfo, JsonReport};

#[derive(Debug, Parser)]
#[command(
    name = "nlmp",
    version,
    about = "Bisimulation and logic toolkit for finite NLMPs"
)]
pub struct Cli {
    /// Leave the elapsed time out of the report.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a model is well formed and measurable.
    Validate { model: PathBuf },
    /// Compute bisimilarity partitions.
    Bisim {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::All)]
        kind: Kind,
    },
    /// Evaluate a state formula.
    Check {
        model: PathBuf,
        formula: String,
        /// Exit with 4 unless this state satisfies the formula.
        #[arg(long)]
        state: Option<String>,
    },
    /// Find a formula true at exactly one of two states.
    Distinguish {
        model: PathBuf,
        s: String,
        t: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Traditional,
    State,
    Event,
    All,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Traditional => "traditional",
            Kind::State => "state",
            Kind::Event => "event",
            Kind::All => "all",
        }
    }
}

/// What a run prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses arguments and runs one command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => {
            let report = execute(&cli);
            Outcome {
                code: report.exit_code,
                stdout: report.to_json(),
                stderr: String::new(),
            }
        }
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}

/// A command's result before it is wrapped into a report.
struct Reply {
    code: i32,
    result: Option<Value>,
    error: Option<ErrorInfo>,
}

impl Reply {
    fn ok(code: i32, result: Value) -> Self {
        Reply {
            code,
            result: Some(result),
            error: None,
        }
    }

    fn fail(e: &Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Domain(_) => exit::USAGE,
            Error::Unsupported(_) => exit::UNSUPPORTED,
            Error::Precondition(_) => exit::INVARIANT,
        };
        Reply {
            code,
            result: None,
            error: Some(e.into()),
        }
    }
}

pub fn execute(cli: &Cli) -> JsonReport {
    let start = Instant::now();
    let (echo, path) = echo(&cli.command);
    let (digest, reply) = match std::fs::read(&path) {
        Err(e) => (
            None,
            Reply {
                code: exit::USAGE,
                result: None,
                error: Some(ErrorInfo {
                    kind: "io",
                    message: format!("cannot read `{}`: {e}", path.display()),
                    line: None,
                    column: None,
                }),
            },
        ),
        Ok(bytes) => {
            let digest = report::digest(&bytes);
            let reply = match String::from_utf8(bytes) {
                Err(_) => Reply::fail(&Error::Parse {
                    line: 1,
                    column: 1,
                    message: "file is not UTF-8".into(),
                }),
                Ok(text) => match parse_model(&text) {
                    Err(e) => Reply::fail(&e),
                    Ok(doc) => dispatch(&cli.command, &doc).unwrap_or_else(|e| Reply::fail(&e)),
                },
            };
            (Some(digest), reply)
        }
    };
    JsonReport {
        command: echo,
        model_digest: digest,
        status: report::status_of(reply.code),
        exit_code: reply.code,
        result: reply.result,
        error: reply.error,
        elapsed_ms: (!cli.no_timing).then(|| start.elapsed().as_millis() as u64),
    }
}

fn echo(command: &Command) -> (CommandEcho, PathBuf) {
    let mut options = BTreeMap::new();
    let (name, path) = match command {
        Command::Validate { model } => ("validate", model),
        Command::Bisim { model, kind } => {
            options.insert("kind".into(), kind.name().into());
            ("bisim", model)
        }
        Command::Check {
            model,
            formula,
            state,
        } => {
            options.insert("formula".into(), formula.clone());
            if let Some(s) = state {
                options.insert("state".into(), s.clone());
            }
            ("check", model)
        }
        Command::Distinguish { model, s, t } => {
            options.insert("s".into(), s.clone());
            options.insert("t".into(), t.clone());
            ("distinguish", model)
        }
    };
    let echo = CommandEcho {
        name: name.into(),
        model: path.display().to_string(),
        options,
    };
    (echo, path.clone())
}

fn dispatch(command: &Command, doc: &ModelDocument) -> Result<Reply, Error> {
    let m = doc.nlmp();
    if let Command::Validate { .. } = command {
        return Ok(validate(doc, &m));
    }
    let validation = m.validate();
    if !validation.is_valid() {
        return Ok(Reply::ok(
            exit::INVALID_MODEL,
            json!({ "valid": false, "findings": report::findings(&m, &validation) }),
        ));
    }
    match command {
        Command::Validate { .. } => unreachable!("handled above"),
        Command::Bisim { kind, .. } => bisim(doc, &m, *kind),
        Command::Check { formula, state, .. } => check(&m, formula, state.as_deref()),
        Command::Distinguish { s, t, .. } => cmd_distinguish(&m, s, t),
    }
}

fn validate(doc: &ModelDocument, m: &Nlmp) -> Reply {
    let validation = m.validate();
    let valid = validation.is_valid();
    let mut result = json!({
        "valid": valid,
        "lmp": doc.is_lmp(),
        "states": m.universe().names(),
        "labels": m.labels(),
        "sigma_atoms": report::sigma_atoms(m, m.sigma()),
        "pool_size": m.pool().len(),
        "findings": report::findings(m, &validation),
    });
    let mut code = if valid { exit::OK } else { exit::INVALID_MODEL };
    if let Some(l) = doc.lmp() {
        let lmp_valid = l.validate().is_valid();
        result["lmp_kernels_measurable"] = json!(lmp_valid);
        if lmp_valid != valid {
            code = exit::INVARIANT;
        }
    }
    Reply::ok(code, result)
}

fn bisim_json(m: &Nlmp, r: &BisimReport) -> Value {
    let mut v = json!({
        "partition": report::partition_names(m, &r.partition),
        "iterations": r.trace.len().saturating_sub(1),
    });
    if let Some(sigma) = &r.sigma {
        v["sigma_atoms"] = json!(report::sigma_atoms(m, sigma));
    }
    v
}

fn bisim(doc: &ModelDocument, m: &Nlmp, kind: Kind) -> Result<Reply, Error> {
    let mut result = json!({});
    let mut code = exit::OK;
    let traditional = match kind {
        Kind::Traditional => Some(largest_traditional(m)?),
        Kind::State => {
            result["state"] = bisim_json(m, &largest_state(m)?);
            None
        }
        Kind::Event => {
            result["event"] = bisim_json(m, &smallest_stable_sigma(m)?);
            None
        }
        Kind::All => {
            let c = compare_bisims(m)?;
            result["state"] = bisim_json(m, &c.state);
            result["event"] = bisim_json(m, &c.event);
            result["chain"] = json!({
                "traditional_in_state": c.traditional_in_state,
                "state_in_event": c.state_in_event,
                "all_equal": c.all_equal,
                "coincidence_required": c.coincidence_required,
            });
            if !c.consistent() {
                code = exit::INVARIANT;
            }
            Some(c.traditional)
        }
    };
    if let Some(t) = &traditional {
        result["traditional"] = bisim_json(m, t);
        if let Some(l) = doc.lmp() {
            let lmp = l.state_bisimilarity();
            result["lmp_bisimilarity"] = json!(report::partition_names(m, &lmp));
            if lmp != t.partition {
                code = exit::INVARIANT;
            }
        }
    }
    Ok(Reply::ok(code, result))
}

fn state_index(m: &Nlmp, name: &str) -> Result<usize, Error> {
    m.universe().lookup(name)
}

fn check(m: &Nlmp, formula: &str, state: Option<&str>) -> Result<Reply, Error> {
    let phi = parse_formula(formula)?;
    let denotation = eval_state(m, &phi)?;
    let mut result = json!({
        "formula": phi.to_string(),
        "denotation": report::set_names(m, &denotation),
    });
    let mut code = exit::OK;
    if let Some(name) = state {
        let s = state_index(m, name)?;
        let sat = denotation.contains(s);
        result["state"] = json!(name);
        result["satisfied"] = json!(sat);
        if !sat {
            code = exit::UNSATISFIED;
        }
    }
    Ok(Reply::ok(code, result))
}

fn constraint_count(phi: &StateFormula) -> usize {
    match phi {
        StateFormula::DiamondMulti(_, cs) => cs.len(),
        _ => 0,
    }
}

fn cmd_distinguish(m: &Nlmp, s_name: &str, t_name: &str) -> Result<Reply, Error> {
    let (s, t) = (state_index(m, s_name)?, state_index(m, t_name)?);
    match distinguish(m, s, t)? {
        Distinction::Equivalent => Ok(Reply::ok(exit::EQUIVALENT, json!({ "equivalent": true }))),
        Distinction::Formula(phi) => {
            let (at_s, at_t) = (satisfies(m, s, &phi)?, satisfies(m, t, &phi)?);
            let code = if at_s == at_t {
                exit::INVARIANT
            } else {
                exit::OK
            };
            Ok(Reply::ok(
                code,
                json!({
                    "equivalent": false,
                    "formula": phi.to_string(),
                    "constraints": constraint_count(&phi),
                    "depth": phi.depth(),
                    "satisfied": { s_name: at_s, t_name: at_t },
                }),
            ))
        }
    }
}
