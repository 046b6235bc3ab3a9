use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use crosswork::cli::{execute, Cli};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let report = execute(&cli, argv);
    let mut text = report.render(cli.format);
    text.push('\n');
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    ExitCode::from(report.exit_code() as u8)
}
