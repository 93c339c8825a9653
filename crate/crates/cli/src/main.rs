mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use catkit::lifting::{parse_kinds, Kind};
use clap::{Parser, Subcommand, ValueEnum};

use commands::DEFAULT_MAX_SEARCH;
use report::{CliError, RunReport, Status};

#[derive(Parser)]
#[command(name = "catkit", version, about = "Finite categories, skeletal completion and structure transfer")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check the category laws and any structure block.
    Validate { path: PathBuf },
    /// Search for chosen structure.
    Analyze {
        path: PathBuf,
        /// Comma-separated: terminal, products, equalizers, pullbacks,
        /// exponentials, omega, pnno, topos, w-topos.
        #[arg(long, default_value = "terminal,products")]
        structure: String,
    },
    /// Skeletize, optionally transferring the file's structure block.
    Complete {
        path: PathBuf,
        #[arg(long)]
        carry_structure: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Factor a functor through the completion of its source.
    Factor {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        functor: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value = "")]
        structures: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in example.
    Demo {
        #[arg(value_parser = commands::DEMOS)]
        name: String,
    },
    /// Graphviz rendering; iso classes become clusters.
    ExportDot {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn max_search() -> Result<u64, CliError> {
    match std::env::var("CATKIT_MAX_SEARCH") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::validation(format!("CATKIT_MAX_SEARCH must be a number, got `{v}`"), None)),
        Err(_) => Ok(DEFAULT_MAX_SEARCH),
    }
}

fn kinds(list: &str) -> Result<Vec<Kind>, CliError> {
    parse_kinds(list).map_err(|e| CliError::validation(e, None))
}

fn emit(payload: serde_json::Value, out: &Option<PathBuf>, report: &mut RunReport) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let text = serde_json::to_string_pretty(&payload).expect("plain data");
            commands::write_out(path, &text)?;
            report.check("written", Status::Pass, path.display().to_string());
        }
        None => report.payload = payload,
    }
    Ok(())
}

fn run(command: &Command, report: &mut RunReport) -> Result<Option<String>, CliError> {
    match command {
        Command::Validate { path } => commands::validate(path, report)?,
        Command::Analyze { path, structure } => commands::analyze(path, &kinds(structure)?, max_search()?, report)?,
        Command::Complete {
            path,
            carry_structure,
            out,
        } => {
            let payload = commands::complete(path, *carry_structure, report)?;
            emit(payload, out, report)?;
        }
        Command::Factor {
            source,
            functor,
            target,
            structures,
            out,
        } => {
            let ks = kinds(structures)?;
            let args = commands::FactorArgs {
                source,
                functor,
                target,
                kinds: &ks,
                cap: max_search()?,
            };
            let payload = commands::factor(args, report)?;
            emit(payload, out, report)?;
        }
        Command::Demo { name } => {
            report.payload = commands::demo(name, report)?;
        }
        Command::ExportDot { path, out } => {
            let dot = commands::export_dot(path)?;
            match out {
                Some(p) => commands::write_out(p, &dot)?,
                None => return Ok(Some(dot)),
            }
        }
    }
    Ok(None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = RunReport::new(std::env::args().skip(1).collect());
    let raw = match run(&cli.command, &mut report) {
        Ok(raw) => raw,
        Err(e) => {
            report.fail_with(&e);
            None
        }
    };
    if report.error.is_none() && report.checks.iter().any(|c| c.status == Status::Fail) {
        report.status = "fail";
        report.exit_code = 4;
    }
    report.elapsed_ms = start.elapsed().as_millis();
    match raw {
        Some(text) => print!("{text}"),
        None => match cli.format {
            Format::Json => println!("{}", report.to_json()),
            Format::Text => print!("{}", report.to_text()),
        },
    }
    ExitCode::from(report.exit_code as u8)
}
