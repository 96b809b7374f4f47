use std::process::ExitCode;

use clap::Parser;
use levykernel_cli::args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = levykernel_cli::init_threads().and_then(|()| levykernel_cli::commands::run(cli));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // numeric failures leave a JSON record on stdout for scripts
            if let Some(d) = e.diagnostic() {
                println!("{}", serde_json::to_string_pretty(&d).expect("diagnostics serialize"));
            }
            eprintln!("levykernel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
