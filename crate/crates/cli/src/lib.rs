//! Library side of the `dstrips` binary, exposed for tests.

pub mod config;
pub mod output;
pub mod run;
pub mod verify;

use serde::Serialize;

/// Failure of a job, mapped to an exit code.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub error: String,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn validation(kind: &str, message: String) -> Self {
        Self { error: kind.to_string(), message, exit_code: 2 }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error serialises")
    }
}

impl From<dirichlet_strips::Error> for CliError {
    fn from(e: dirichlet_strips::Error) -> Self {
        Self { error: e.kind().to_string(), message: e.to_string(), exit_code: if e.is_numerical() { 3 } else { 2 } }
    }
}

/// Parse arguments, run the job, emit output. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match config::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                print!("{e}");
                return 0;
            }
            let err = CliError::validation("Usage", e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return 2;
        }
    };
    let result = cli.job().and_then(|job| {
        if cli.dump_config {
            println!("{}", job.to_json());
            return Ok(0);
        }
        let outcome = match job.workers() {
            Some(0) => return Err(CliError::validation("InvalidInput", "workers must be positive".into())),
            Some(n) => dirichlet_strips::scanner::with_workers(n, || run::run(&job)),
            None => run::run(&job),
        }?;
        match &job.out {
            Some(path) => output::write_atomic(path, &outcome.text)?,
            None => {
                use std::io::Write;
                let mut out = std::io::stdout().lock();
                let _ = out.write_all(outcome.text.as_bytes());
                let _ = out.flush();
            }
        }
        Ok(outcome.exit_code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code
        }
    }
}
