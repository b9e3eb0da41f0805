use clap::Parser;
use pdp_entropy_cli::cli::{run, Cli};

fn main() {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    if let Err(e) = run(cli) {
        eprintln!("pdp-entropy: {e}");
        std::process::exit(e.exit_code());
    }
}
