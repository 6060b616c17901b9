use clap::Parser;
use polarisim::{dispatch, parse_config, Command};
use std::path::PathBuf;
use std::process::ExitCode;

/// Two-cavity polariton simulator.
#[derive(Parser)]
#[command(name = "polarisim", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML run file; all defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config key, e.g. `--set model.g=20`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match parse_config(cli.config.as_deref(), &cli.set) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("polarisim: config: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }
    match dispatch(&cfg, cli.command) {
        Ok(s) => {
            print!("{}", s.report);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("polarisim: {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
