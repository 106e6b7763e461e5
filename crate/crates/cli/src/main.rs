use std::process::ExitCode;

use clap::Parser;

use proxmcmc_cli::{configure_threads, resolve_config, run_experiment, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| {
        let (experiment, args) = cli.command.split();
        let cfg = resolve_config(experiment, args)?;
        run_experiment(&cfg)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
