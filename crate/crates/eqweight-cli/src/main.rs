use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use eqweight::spaces::{builtin, BUILTINS};
use eqweight_cli::render::{render, Format};
use eqweight_cli::run::run;
use eqweight_cli::scenario::parse;

#[derive(Parser)]
#[command(name = "eqweight", version, about = "Equivariant weight spectral sequences over GF(2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a scenario.
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run on a single thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Parse and validate a scenario without running it.
    Validate { scenario: PathBuf },
    /// List the builtin spaces.
    ListBuiltins,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Table,
}

fn load(path: &PathBuf) -> Result<eqweight_cli::scenario::Scenario, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return Err(ExitCode::from(2));
        }
    };
    parse(&text).map_err(|errors| {
        for e in errors {
            eprintln!("{}: {e}", path.display());
        }
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { scenario, format, out, sequential } => {
            let s = match load(&scenario) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let report = if sequential { eqweight::par::sequential(|| run(&s)) } else { run(&s) };
            let format = match format {
                OutputFormat::Json => Format::Json,
                OutputFormat::Table => Format::Table,
            };
            let text = render(&report.value, format);
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("{}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if report.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Validate { scenario } => match load(&scenario) {
            Ok(s) => {
                println!("{}: ok ({} tasks, depth {}, window {})", s.name, s.tasks.len(), s.resolution.depth, s.window);
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::ListBuiltins => {
            for name in BUILTINS {
                let x = builtin(name).expect("listed builtins load");
                let counts: Vec<String> = (0..=x.dim()).map(|k| x.count(k).to_string()).collect();
                println!("{name:<32} |G| = {}  simplices {}", x.group().order(), counts.join(","));
            }
            ExitCode::SUCCESS
        }
    }
}
