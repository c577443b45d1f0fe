use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use novikov_cli::{parse_problem, run_command, Command, CommandError, RunOptions};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Validate,
    Invert,
    Triangularize,
    DecomposePoly,
    DecomposeSeries,
    DecomposeLaurent,
    DecomposeNovikov,
    VerifyRoundtrip,
    WittWitness,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Validate => Command::Validate,
            Cmd::Invert => Command::Invert,
            Cmd::Triangularize => Command::Triangularize,
            Cmd::DecomposePoly => Command::DecomposePoly,
            Cmd::DecomposeSeries => Command::DecomposeSeries,
            Cmd::DecomposeLaurent => Command::DecomposeLaurent,
            Cmd::DecomposeNovikov => Command::DecomposeNovikov,
            Cmd::VerifyRoundtrip => Command::VerifyRoundtrip,
            Cmd::WittWitness => Command::WittWitness,
        }
    }
}

/// Whitehead-group splittings over twisted Novikov rings.
#[derive(Debug, Parser)]
#[command(name = "novikov", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Problem file (UTF-8 JSON).
    file: PathBuf,
    /// Emit the JSON report instead of the summary.
    #[arg(long)]
    json: bool,
    /// Override the file's precision N.
    #[arg(long, value_name = "N")]
    precision: Option<i64>,
    /// Seed for sampled self-checks.
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    /// Run the k-independence and additivity self-checks.
    #[arg(long)]
    verify: bool,
    /// Include wall-clock timing in the JSON report.
    #[arg(long)]
    timing: bool,
}

fn fail(cmd: Command, json: bool, err: &CommandError) -> ExitCode {
    if json {
        println!("{}", serde_json::to_string_pretty(&err.to_json(cmd.name())).expect("JSON"));
    } else {
        eprintln!("{cmd}: {err}");
    }
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cmd = Command::from(args.command);
    let text = match fs::read_to_string(&args.file) {
        Ok(t) => t,
        Err(e) => return fail(cmd, args.json, &CommandError::Usage(format!("{}: {e}", args.file.display()))),
    };
    let pf = match parse_problem(&text) {
        Ok(pf) => pf,
        Err(e) => return fail(cmd, args.json, &e.into()),
    };
    let opts = RunOptions {
        precision: args.precision,
        seed: args.seed,
        verify: args.verify,
    };
    match run_command(cmd, &pf, &opts) {
        Ok(rep) => {
            if args.json {
                println!("{}", serde_json::to_string_pretty(&rep.to_json(args.timing)).expect("JSON"));
            } else {
                print!("{}", rep.summary());
            }
            ExitCode::from(rep.exit_code() as u8)
        }
        Err(e) => fail(cmd, args.json, &e),
    }
}
