use clap::error::ErrorKind;
use clap::Parser;
use psym_cli::args::Cli;
use psym_cli::commands::{exit_code, run, CliError};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.flags.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let cmd = cli.command.command();
    let cfg = cli.flags.to_config(cmd)?;
    let report = run(cmd, &cfg)?;
    let text = report.to_json().map_err(|e| CliError::Input(e.to_string()))?;
    match &cfg.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    for w in &report.warnings {
        log::warn!("{w}");
    }
    let failed = report.failures();
    if failed > 0 {
        eprintln!("{failed} verification failure(s)");
    }
    Ok(exit_code(&report))
}
