use std::process::ExitCode;

use clap::Parser;
use weylpt::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match weylpt::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("weylpt: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("weylpt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
