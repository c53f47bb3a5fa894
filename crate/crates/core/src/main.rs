use std::io::{IsTerminal, Write};

use clap::Parser;
use pi_esp::cli::{run, Cli, OutputFormat, EXIT_USAGE};

fn main() {
    let cli = Cli::parse();
    let format = OutputFormat::resolve(cli.format, std::io::stdout().is_terminal());
    let outcome = run(&cli);
    if let Some(report) = &outcome.report {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(report.render(format).as_bytes());
    }
    if let Some(err) = &outcome.error {
        eprintln!("error: {err}");
        if outcome.exit_code == EXIT_USAGE {
            eprintln!("\nFor more information, try '--help'.");
        }
    }
    std::process::exit(outcome.exit_code);
}
