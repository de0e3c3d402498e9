use std::process::ExitCode;

use clap::Parser;
use magicvec::cli::{self, Cli};
use magicvec::report::error_json;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() && std::env::args().any(|a| a == "--json") {
                println!("{}", error_json(None, e.to_string().trim()));
                return ExitCode::from(2);
            }
            e.exit();
        }
    };
    let json = cli.command.json();
    match cli::run(&cli.command) {
        Ok(out) => {
            if json {
                println!("{}", out.report.to_json());
            } else {
                println!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let msg = format!("{e:#}");
            if json {
                println!("{}", error_json(Some(cli.command.name()), &msg));
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::FAILURE
        }
    }
}
