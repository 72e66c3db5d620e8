use clap::Parser;
use sidon::app::{run, Cli, CliError};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Err(e) = run(cli, argv) {
        match &e {
            CliError::NotSidon(w) => println!("not a Sidon set: {w}"),
            _ => eprintln!("error: {e}"),
        }
        std::process::exit(e.exit_code());
    }
}
