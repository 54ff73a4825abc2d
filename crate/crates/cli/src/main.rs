use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use htorsion::{run, Cli, EXIT_INVALID, EXIT_OK};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID as u8 } else { EXIT_OK as u8 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &out.text).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => std::io::stdout().write_all(out.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                return ExitCode::from(EXIT_INVALID as u8);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
