use std::process::ExitCode;

use clap::Parser;
use porous_adjoint_cli::{run, Cli};

fn init_logging() {
    let env = env_logger::Env::new().filter_or("POROUS_ADJOINT_LOG", "warn");
    env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .init();
}

fn init_threads(threads: Option<usize>) -> Result<(), String> {
    let Some(n) = threads else {
        return Ok(());
    };
    if n == 0 {
        return Err("--threads must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())?;
    porous_adjoint::set_factorization_threads(n);
    Ok(())
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    if let Err(e) = init_threads(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(outcome) if outcome.checks_passed => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("error: checks failed; see the written report");
            ExitCode::from(5)
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
