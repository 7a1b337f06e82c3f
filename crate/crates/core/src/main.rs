// SPDX-License-Identifier: Apache-2.0

//! `soctam` command-line tool.
//!
//! Exit status: 0 on success, 1 when a schedule breaks a constraint or a
//! core cannot be scheduled, 2 for usage and input errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use soctam::report;
use soctam::{
    parse_soc, prepare, schedule, tam_table, tam_table_csv, verify_schedule, Schedule, SocSpec,
    TamError,
};

#[derive(Parser)]
#[command(
    name = "soctam",
    version,
    about = "SOC wrapper design, TAM sizing and test scheduling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Wrapper outcome for every width up to --max-width.
    Wrapper {
        #[arg(long)]
        soc: PathBuf,
        #[arg(long)]
        core: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_width: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rectangle sets, T_min and the initial packing order.
    Rects {
        #[arg(long)]
        soc: PathBuf,
        #[arg(long, alias = "max-width", value_parser = clap::value_parser!(u32).range(1..))]
        tam_width: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full pipeline: wrappers, rectangles, packing and verification.
    Schedule {
        #[arg(long)]
        soc: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        tam_width: u32,
        /// Milliwatts; defaults to the file's `powerlimit`, if any.
        #[arg(long)]
        power_limit: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report times in units of T_min (text and svg).
        #[arg(long)]
        normalize: bool,
    },
    /// Check a schedule JSON file against a SOC.
    Verify {
        #[arg(long)]
        soc: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        /// Overrides the power limit recorded in the schedule.
        #[arg(long)]
        power_limit: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    /// Bad arguments or unreadable input.
    Usage(anyhow::Error),
    /// A constraint could not be met or a schedule failed verification.
    Constraint(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn load_soc(path: &Path) -> anyhow::Result<SocSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_soc(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, body: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn unsupported(cmd: &str, format: Format) -> Failure {
    let name = format
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    Failure::Usage(anyhow::anyhow!("`{cmd}` does not support --format {name}"))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Wrapper {
            soc,
            core,
            max_width,
            format,
            out,
        } => {
            let soc = load_soc(&soc)?;
            let core = soc
                .core(core)
                .ok_or_else(|| anyhow::anyhow!("unknown core {core} in soc {}", soc.name))?;
            let rows = tam_table(core, max_width).map_err(anyhow::Error::from)?;
            let body = match format {
                Format::Text => report::wrapper_table_text(core, &rows),
                Format::Csv => tam_table_csv(&rows),
                Format::Json => report::wrapper_table_json(core, &rows),
                Format::Svg => return Err(unsupported("wrapper", format)),
            };
            emit(out.as_deref(), &body)?;
        }
        Command::Rects {
            soc,
            tam_width,
            format,
            out,
        } => {
            let soc = load_soc(&soc)?;
            let prepared = prepare(&soc, tam_width).map_err(anyhow::Error::from)?;
            let body = match format {
                Format::Json => report::rects_json(&prepared.sets, prepared.t_min, &prepared.order),
                Format::Csv => report::rects_csv(&prepared.sets),
                Format::Text => report::rects_text(&prepared.sets, prepared.t_min, &prepared.order),
                Format::Svg => return Err(unsupported("rects", format)),
            };
            emit(out.as_deref(), &body)?;
        }
        Command::Schedule {
            soc,
            tam_width,
            power_limit,
            format,
            out,
            normalize,
        } => {
            let soc = load_soc(&soc)?;
            let p_max = power_limit.or(soc.default_power_limit);
            let plan = match schedule(&soc, tam_width, p_max) {
                Ok(plan) => plan,
                Err(e @ (TamError::Unschedulable { .. } | TamError::Stalled(_))) => {
                    return Err(Failure::Constraint(e.to_string()))
                }
                Err(e) => return Err(Failure::Usage(e.into())),
            };
            let violations = verify_schedule(&plan, &soc);
            if !violations.is_empty() {
                let lines: Vec<String> = violations.iter().map(ToString::to_string).collect();
                return Err(Failure::Constraint(format!(
                    "internal error: produced schedule fails verification:\n{}",
                    lines.join("\n")
                )));
            }
            let body = match format {
                Format::Text => report::schedule_text(&plan, &soc, normalize),
                Format::Json => report::schedule_json(&plan),
                Format::Csv => report::schedule_csv(&plan),
                Format::Svg => report::schedule_svg(&plan, &soc, normalize),
            };
            emit(out.as_deref(), &body)?;
        }
        Command::Verify {
            soc,
            schedule,
            power_limit,
            out,
        } => {
            let soc = load_soc(&soc)?;
            let text = fs::read_to_string(&schedule)
                .with_context(|| format!("reading {}", schedule.display()))?;
            let mut plan: Schedule = serde_json::from_str(&text)
                .with_context(|| format!("malformed schedule {}", schedule.display()))?;
            if power_limit.is_some() {
                plan.p_max = power_limit;
            }
            let violations = verify_schedule(&plan, &soc);
            if violations.is_empty() {
                emit(out.as_deref(), "OK\n")?;
            } else {
                let mut body = String::new();
                for v in &violations {
                    body.push_str(&v.to_string());
                    body.push('\n');
                }
                emit(out.as_deref(), &body)?;
                return Err(Failure::Constraint(format!(
                    "{} violation(s) found",
                    violations.len()
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Constraint(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
