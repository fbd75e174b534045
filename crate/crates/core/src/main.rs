use std::io::{self, Write};
use std::process::ExitCode;

use tracing_subscriber::EnvFilter;

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_ansi(std::env::var_os("NO_COLOR").is_none())
        .with_writer(io::stderr)
        .init();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = cohortlens::cli::run_command(std::env::args_os(), &mut out, &mut io::stderr());
    let _ = out.flush();
    ExitCode::from(code as u8)
}
