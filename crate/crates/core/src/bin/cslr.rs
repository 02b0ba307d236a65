use clap::Parser;

use cslr_core::cli::Cli;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ARD_LOG", "warn")).init();
    let cli = Cli::parse(); // usage errors exit with code 2
    if let Err(error) = cli.run() {
        eprintln!("error: {error}");
        std::process::exit(error.exit_code());
    }
}
