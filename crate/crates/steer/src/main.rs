use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use needle_steer::cli::{run, Cli};
use needle_steer::exit;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::VALIDATION as u8
            } else {
                exit::OK as u8
            });
        }
    };
    match run(cli) {
        Ok(stdout) => {
            print!("{stdout}");
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
