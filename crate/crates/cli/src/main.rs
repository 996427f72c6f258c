use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use amalgam_cli::config::{Format, InstanceKind, SuiteConfig};
use amalgam_cli::eval::{eval, EvalError, Query};
use amalgam_cli::runner::run;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "amalgam",
    version,
    about = "Property suites for notions of amalgamation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites of a config file and print the report.
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output format.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Answer a single query.
    Eval {
        #[command(subcommand)]
        query: Query,
    },
    /// Instances with their notions and suites.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Jsonl,
    Table,
}

fn emit(text: &str) -> ExitCode {
    let mut out = std::io::stdout().lock();
    if out
        .write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .is_err()
    {
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Check { config, format } => {
            let cfg = match SuiteConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let format = match format {
                Some(FormatArg::Jsonl) => Format::Jsonl,
                Some(FormatArg::Table) => Format::Table,
                None => cfg.format,
            };
            let report = run(&cfg);
            eprintln!("wall time: {:.3}s", report.wall_time.as_secs_f64());
            let code = emit(&report.render(format));
            if code != ExitCode::SUCCESS {
                return code;
            }
            ExitCode::from(report.summary.exit)
        }
        Command::Eval { query } => match eval(&query) {
            Ok(value) => {
                let failed = value["query"] == "recheck" && value["failed"] != value["reverified"];
                let code = emit(&format!("{value}\n"));
                if failed {
                    ExitCode::from(1)
                } else {
                    code
                }
            }
            Err(EvalError::Usage(msg)) => {
                eprintln!("usage: {msg}");
                ExitCode::from(2)
            }
            Err(EvalError::Op(e)) => {
                println!("{}", json!({ "error": e.to_string() }));
                ExitCode::from(1)
            }
        },
        Command::List => {
            let entries: Vec<_> = InstanceKind::ALL
                .iter()
                .map(|k| {
                    json!({
                        "instance": k.name(),
                        "notions": k.notions().iter().map(|(sel, name)| json!({ "selector": sel, "name": name })).collect::<Vec<_>>(),
                        "suites": k.suites(),
                    })
                })
                .collect();
            emit(&format!("{}\n", json!({ "instances": entries })))
        }
    }
}
