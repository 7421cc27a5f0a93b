use std::io::Write;
use std::process::ExitCode;

use maass::{parse_config, run, CliError, Parsed};

fn emit(out: &Option<std::path::PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("maass: {e}");
    eprintln!("maass: error category: {}", e.category());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cfg = match parse_config(&argv) {
        Ok(Parsed::Run(c)) => c,
        Ok(Parsed::Info(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&e),
    };
    for p in &cfg.provenance {
        eprintln!("maass: config {p}");
    }
    match run(&cfg) {
        Ok(out) => {
            if let Err(e) = emit(&cfg.output, &out.csv) {
                return fail(&e);
            }
            match out.failure {
                Some(e) => fail(&e),
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => fail(&e),
    }
}
