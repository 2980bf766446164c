use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use weblab_cli::{render, run, CliError, Command, Options};

/// Exact invariants and rank of planar webs given by an implicit ODE.
#[derive(Parser, Debug)]
#[command(name = "weblab", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Web document (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Working precision; overrides the document's `order`.
    #[arg(long)]
    order: Option<usize>,
    /// Rerun the rank decision at this higher order and compare.
    #[arg(long)]
    recheck_order: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let opts = Options { order: args.order, recheck_order: args.recheck_order };
    let outcome = match std::fs::read_to_string(&args.input) {
        Ok(text) => run(args.command, &text, &opts),
        Err(source) => {
            let e = CliError::Io { path: args.input.display().to_string(), source };
            eprintln!("weblab: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let text = render(&outcome.output);
    match &args.output {
        Some(path) => {
            if let Err(source) = std::fs::write(path, text) {
                eprintln!("weblab: {}", CliError::Io { path: path.display().to_string(), source });
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(outcome.exit_code)
}
