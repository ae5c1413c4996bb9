//! Command-line surface: `validate`, `design`, `simulate`, `sweep`.
//!
//! Each command returns an [`Outcome`] instead of printing, so tests can
//! drive them in-process. Exit codes: 0 success, 1 domain failure (topology
//! violation, failed verdict, infeasible design), 2 input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::ScenarioConfig;
use crate::design::{evaluate_design, DesignError};
use crate::engine::EngineError;
use crate::network::validate_topology;
use crate::report::{self, fmt_sig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wbmetro", version, about = "Plan and simulate wavelength-blocker metro horseshoes")]
pub struct Cli {
    /// Reserved. The simulator is deterministic, so this flag is rejected.
    #[arg(long, global = true)]
    pub seedless: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a scenario file against the schema and topology rules.
    Validate(CommonArgs),
    /// Evaluate the node design rules for the scenario's parameters.
    Design(CommonArgs),
    /// Propagate the scenario and report per-channel verdicts.
    Simulate(CommonArgs),
    /// Run the scenario's `[sweep]` and emit a long-format table.
    Sweep(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Write the main output here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn input_error(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }

    fn domain_error(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_DOMAIN,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    if cli.seedless {
        return Outcome::input_error("--seedless is reserved: the simulator has no random state");
    }
    let (args, result) = match &cli.command {
        Command::Validate(a) => (a, validate(&a.config, a.format.unwrap_or(Format::Table))),
        Command::Design(a) => (a, design(&a.config, a.format.unwrap_or(Format::Table))),
        Command::Simulate(a) => (a, simulate(&a.config, a.format.unwrap_or(Format::Table))),
        Command::Sweep(a) => (a, sweep(&a.config, a.format.unwrap_or(Format::Csv))),
    };
    deliver(result, args.out.as_deref())
}

/// Moves the main output to `--out` when given.
fn deliver(mut o: Outcome, out: Option<&Path>) -> Outcome {
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, &o.stdout) {
            return Outcome::input_error(format!("cannot write {}: {e}", path.display()));
        }
        o.stdout.clear();
    }
    o
}

fn load(path: &Path) -> Result<ScenarioConfig, Outcome> {
    ScenarioConfig::load(path).map_err(Outcome::input_error)
}

fn to_json<S: serde::Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn validate(path: &Path, format: Format) -> Outcome {
    let cfg = match load(path) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let t = &cfg.topology;
    let errors: Vec<String> = match validate_topology(t) {
        Ok(()) => Vec::new(),
        Err(errs) => errs.iter().map(|e| e.to_string()).collect(),
    };
    let code = if errors.is_empty() { EXIT_OK } else { EXIT_DOMAIN };
    let stdout = match format {
        Format::Json => to_json(&serde_json::json!({ "valid": errors.is_empty(), "errors": errors })),
        Format::Csv => {
            let mut s = String::from("error\n");
            for e in &errors {
                let _ = writeln!(s, "\"{}\"", e.replace('"', "\"\""));
            }
            s
        }
        Format::Table => {
            if errors.is_empty() {
                format!(
                    "ok: {} slots, {} add/drop nodes, {} spans, {} km\n",
                    t.plan.n_slots,
                    t.add_drop_nodes().count(),
                    t.spans().count(),
                    fmt_sig(t.total_length_km())
                )
            } else {
                errors.iter().map(|e| format!("violation: {e}\n")).collect()
            }
        }
    };
    Outcome {
        code,
        stdout,
        stderr: String::new(),
    }
}

pub fn design(path: &Path, format: Format) -> Outcome {
    let cfg = match load(path) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let inputs = match cfg.design_inputs() {
        Ok(i) => i,
        Err(e) => return Outcome::input_error(e),
    };
    let report = match evaluate_design(&inputs) {
        Ok(r) => r,
        Err(e @ DesignError::Infeasible { .. }) => return Outcome::domain_error(e),
        Err(e) => return Outcome::input_error(e),
    };
    let stdout = match format {
        Format::Json => to_json(&report),
        Format::Table => report::design_table(&report),
        Format::Csv => {
            let mut s = String::from("constraint,pass,margin,unit\n");
            for v in &report.verdicts {
                let unit = serde_json::to_value(v.unit).expect("unit serializes");
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    v.constraint,
                    v.pass,
                    fmt_sig(v.margin),
                    unit.as_str().unwrap_or_default()
                );
            }
            s
        }
    };
    Outcome {
        code: if report.all_pass() { EXIT_OK } else { EXIT_DOMAIN },
        stdout,
        stderr: String::new(),
    }
}

fn engine_failure(e: EngineError) -> Outcome {
    Outcome::domain_error(e)
}

pub fn simulate(path: &Path, format: Format) -> Outcome {
    let cfg = match load(path) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let sim = match report::simulate(&cfg) {
        Ok(s) => s,
        Err(e) => return engine_failure(e),
    };
    let stdout = match format {
        Format::Json => to_json(&sim),
        Format::Csv => report::trace_csv(&sim.trace),
        Format::Table => report::rows_table(&sim.rows),
    };
    Outcome {
        code: if sim.all_pass() { EXIT_OK } else { EXIT_DOMAIN },
        stdout,
        stderr: report::warnings_table(sim.warnings(), &sim.trace),
    }
}

pub fn sweep(path: &Path, format: Format) -> Outcome {
    let cfg = match load(path) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let Some(spec) = cfg.sweep.clone() else {
        return Outcome::input_error(format!("{}: no [sweep] table", path.display()));
    };
    let points = match report::sweep(&cfg, &spec) {
        Ok(p) => p,
        Err(e) => return engine_failure(e),
    };
    let stdout = match format {
        Format::Csv => report::sweep_csv(&points, &spec),
        Format::Json => to_json(&serde_json::json!({ "axis": spec.axis, "points": points })),
        Format::Table => {
            let mut s = String::new();
            for p in &points {
                let _ = writeln!(s, "{} = {}", spec.axis.name(), fmt_sig(p.value));
                s.push_str(&report::rows_table(&p.rows));
                s.push('\n');
            }
            s
        }
    };
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}
