use std::io::Write;
use std::process::ExitCode;

use expmeasure_cli::{run, EXIT_INTERNAL};

fn main() -> ExitCode {
    let out = run(std::env::args_os());
    match &out.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INTERNAL as u8);
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            let _ = stdout.flush();
        }
    }
    ExitCode::from(out.exit as u8)
}
