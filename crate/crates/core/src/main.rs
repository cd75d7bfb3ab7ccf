use clap::Parser;

use dbar_spectral::cli::{execute, Cli, RunConfig};

fn main() {
    let code = match RunConfig::from_cli(Cli::parse()) {
        Ok(config) => execute(&config),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
